#pragma once

#include <complex>

#include <Eigen/Dense>

#include "ppcqed/pulse_schedule.hpp"

namespace ppcqed {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

enum class Subsystem { Qubit, Resonator };

// Truncated qubit (x) resonator space. Basis index = n_q * resonator_dim + n_b.
class HilbertSpace {
public:
    static constexpr int default_dimension_cap = 4096;

    HilbertSpace(int qubit_dim, int resonator_dim, int dimension_cap = default_dimension_cap);

    int qubit_dim() const { return qubit_dim_; }
    int resonator_dim() const { return resonator_dim_; }
    int dim() const { return qubit_dim_ * resonator_dim_; }
    int index(int qubit_level, int resonator_level) const;

    friend bool operator==(const HilbertSpace& a, const HilbertSpace& b) {
        return a.qubit_dim_ == b.qubit_dim_ && a.resonator_dim_ == b.resonator_dim_;
    }

private:
    int qubit_dim_;
    int resonator_dim_;
};

// Dense operator on a HilbertSpace. Immutable once built.
class Operator {
public:
    static constexpr double hermiticity_tolerance = 1e-12;

    // When `hermitian` is set the matrix is checked against its adjoint
    // (relative to its largest entry) and DomainError thrown on failure.
    Operator(HilbertSpace space, Matrix matrix, bool hermitian = false);

    const HilbertSpace& space() const { return space_; }
    const Matrix& matrix() const { return matrix_; }
    bool is_hermitian() const { return hermitian_; }

    // max |A - A^dagger| entry.
    double hermiticity_defect() const;
    double max_abs() const;

    Operator adjoint() const;

    friend Operator operator+(const Operator& a, const Operator& b);
    friend Operator operator-(const Operator& a, const Operator& b);
    friend Operator operator*(const Operator& a, const Operator& b);
    friend Operator operator*(double s, const Operator& a);
    friend Operator operator*(Complex s, const Operator& a);

private:
    HilbertSpace space_;
    Matrix matrix_;
    bool hermitian_ = false;
};

Operator commutator(const Operator& a, const Operator& b);

// Device parameters, rad/s throughout.
struct SystemParams {
    double qubit_frequency = 0.0;      // omega_q at the operating flux
    double anharmonicity = 0.0;        // alpha <= 0
    double resonator_frequency = 0.0;  // omega_b
    double single_photon_coupling = 0.0;  // g0
    double parasitic_coupling = 0.0;   // g_ab, dipolar
    double resonator_decay = 0.0;      // kappa_b, total
    double qubit_relaxation = 0.0;     // gamma_1 = 1/T1
    double qubit_linewidth = 0.0;      // gamma_q

    void validate() const;
};

// Sideband drive. Detuning and sum frequency are always derived on demand.
struct DriveParams {
    double frequency = 0.0;        // omega_d
    double amplitude = 0.0;        // epsilon_d
    double qubit_frequency = 0.0;  // omega_q the detuning refers to

    double detuning() const { return frequency - qubit_frequency; }
    double sum_frequency() const { return qubit_frequency + frequency; }
};

Operator identity(const HilbertSpace& space);
Operator annihilation(const HilbertSpace& space, Subsystem subsystem);
Operator creation(const HilbertSpace& space, Subsystem subsystem);
Operator number(const HilbertSpace& space, Subsystem subsystem);

// Two-level operators; require qubit_dim == 2. sigma_z = |e><e| - |g><g|.
Operator sigma_minus(const HilbertSpace& space);
Operator sigma_plus(const HilbertSpace& space);
Operator sigma_z(const HilbertSpace& space);
Operator sigma_x(const HilbertSpace& space);

// b^dagger b + sigma_+ sigma_-.
Operator excitation_number(const HilbertSpace& space);

/// omega_q a^dag a + (alpha/2) a^dag a^dag a a + omega_b b^dag b.
Operator kerr_hamiltonian(const SystemParams& params, const HilbertSpace& space);

/// g0 a^dag a (b + b^dag).
Operator photon_pressure_interaction(double g0, const HilbertSpace& space);

/// Lab-frame Kerr + photon-pressure Hamiltonian (no drive).
Operator full_hamiltonian(const SystemParams& params, const HilbertSpace& space);

/// Frame co-rotating with the sideband drive, RWA on the drive:
/// -Delta_q a^dag a + (alpha/2) a^dag a^dag a a + omega_b b^dag b
///   + g0 a^dag a (b + b^dag) + epsilon_d (a + a^dag).
Operator rotating_frame_hamiltonian(const SystemParams& params, const DriveParams& drive,
                                    const HilbertSpace& space);

/// Rotating frame displaced by a real steady-state amplitude <a>, Kerr term
/// dropped: -Delta_q a^dag a + omega_b b^dag b + g (a + a^dag)(b + b^dag)
/// with g = g0 <a>, optionally keeping the residual g0 a^dag a (b + b^dag).
Operator displaced_frame_hamiltonian(const SystemParams& params, const DriveParams& drive,
                                     double mean_amplitude, const HilbertSpace& space,
                                     bool keep_nonlinear_residual);

/// -(Delta_q/2) sigma_z + omega_b b^dag b + g (sigma_+ b + sigma_- b^dag).
/// Conserves excitation_number().
Operator linearized_jc_hamiltonian(double g, double qubit_detuning, double resonator_frequency,
                                   const HilbertSpace& space);

struct ChevronFrameOptions {
    bool counter_rotating = false;  // adds g (sigma_+ b^dag + sigma_- b)
};

/// Chevron simulation frame: (delta/2) sigma_z + g(t)(sigma_+ b + sigma_- b^dag)
///   + epsilon(t)(sigma_+ + sigma_-), delta the sideband detuning.
Operator driven_chevron_hamiltonian(double sideband_detuning, const PulseSegment& segment,
                                    const HilbertSpace& space,
                                    const ChevronFrameOptions& options = {});
Operator driven_chevron_hamiltonian(double sideband_detuning, const PulseSchedule& schedule,
                                    double t, const HilbertSpace& space,
                                    const ChevronFrameOptions& options = {});

}  // namespace ppcqed
