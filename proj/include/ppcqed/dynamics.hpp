#pragma once

#include <span>
#include <vector>

#include "ppcqed/fitting.hpp"
#include "ppcqed/pulse_schedule.hpp"
#include "ppcqed/quantum_core.hpp"

namespace ppcqed {

struct InvariantReport {
    double max_trace_error = 0.0;
    double max_hermiticity_error = 0.0;
    double min_eigenvalue = 1.0;
    int positivity_checks = 0;
};

class DensityMatrix {
public:
    static constexpr double hermiticity_tolerance = 1e-10;
    static constexpr double trace_tolerance = 1e-8;
    static constexpr double positivity_tolerance = 1e-8;

    // Validates all three invariants; throws NumericalError on breach.
    DensityMatrix(HilbertSpace space, Matrix matrix);

    static DensityMatrix pure(const HilbertSpace& space, int qubit_level, int resonator_level);

    const HilbertSpace& space() const { return space_; }
    const Matrix& matrix() const { return matrix_; }

    double trace_error() const;
    double hermiticity_error() const;
    double min_eigenvalue() const;
    double expectation(const Operator& op) const;
    // Population of qubit level n (reduced over the resonator).
    double qubit_population(int level) const;

private:
    HilbertSpace space_;
    Matrix matrix_;
};

struct CollapseChannel {
    Operator op;
    double rate = 0.0;
};

/// -i[H, rho] + sum_k r_k (L_k rho L_k^dag - {L_k^dag L_k, rho}/2).
Matrix lindblad_rhs(const Operator& hamiltonian, const Matrix& rho,
                    std::span<const CollapseChannel> collapse);
Matrix lindblad_rhs(const Operator& hamiltonian, const DensityMatrix& rho,
                    std::span<const CollapseChannel> collapse);

// kappa_b L[b] and gamma_1 L[sigma_-]; channels with zero rate are omitted.
std::vector<CollapseChannel> device_collapse(const SystemParams& params, const HilbertSpace& space);

struct EvolveOptions {
    double dt_max = 0.25e-9;       // s
    bool record_steps = false;     // otherwise only t = 0 and segment ends
    int positivity_checkpoints = 10;
    ChevronFrameOptions frame{};
};

struct Trajectory {
    std::vector<double> times;
    std::vector<DensityMatrix> states;
    InvariantReport report;
    long long steps = 0;
};

// Step size used inside one segment: min(dt_max, 1 / (50 f_max)) with f_max
// the largest of |delta|, g, epsilon, gamma_1, kappa_b divided by 2 pi.
double rk4_step_limit(const PulseSegment& segment, const SystemParams& params, double detuning,
                      double dt_max);

/// Fixed-step classic RK4 integration of the Lindblad equation in the chevron
/// frame. Segment edges are always step edges. Invariants are checked at every
/// stored point (positivity at evenly spaced checkpoints); a breach throws
/// NumericalError.
Trajectory evolve(const DensityMatrix& initial, const PulseSchedule& schedule,
                  const SystemParams& params, double detuning, const EvolveOptions& options = {});

// Instantaneous ideal pi rotation of a two-level qubit: rho -> X rho X.
DensityMatrix apply_ideal_pi(const DensityMatrix& rho);

enum class Preparation { Ground, ExcitedQubit, Fock1Resonator };

struct ChevronOptions {
    double dt_max = 0.25e-9;
    double pi_pulse_duration = 0.0;  // 0 = ideal instantaneous preparation
    int resonator_dim = 5;
    int threads = 1;
    ChevronFrameOptions frame{};
};

struct ChevronResult {
    std::vector<double> detunings;  // rad/s
    std::vector<double> times;      // s
    std::vector<double> excited;    // row-major [detuning][time]
    InvariantReport report;

    double at(std::size_t detuning_index, std::size_t time_index) const {
        return excited[detuning_index * times.size() + time_index];
    }
};

/// For every detuning: prepare, then apply the sideband coupling g_pulse for
/// each duration in `times` and record the excited-state probability.
/// Fock1Resonator prepares |e,1> through pi, resonant swap of pi/(2 g), pi.
ChevronResult chevron_experiment(const SystemParams& params, double g_pulse,
                                 std::span<const double> detunings, std::span<const double> times,
                                 Preparation preparation, const ChevronOptions& options = {});

struct RabiFit {
    double coupling = 0.0;  // g, the trace oscillates as cos(2 g t)
    double decay = 0.0;     // Gamma
    double amplitude = 0.0;
    double offset = 0.0;
    fit::FitResult fit;
};

/// Least-squares fit of A exp(-Gamma t) cos(2 g t) + C, initialised from the
/// periodogram peak of the mean-subtracted trace.
RabiFit rabi_frequency_fit(std::span<const double> times, std::span<const double> excited);

}  // namespace ppcqed
