#include "ppcqed/quantum_core.hpp"

#include <cmath>
#include <string>

#include "ppcqed/errors.hpp"

namespace ppcqed {

namespace {

Matrix ladder(int dim) {
    Matrix m = Matrix::Zero(dim, dim);
    for (int n = 1; n < dim; ++n) m(n - 1, n) = std::sqrt(static_cast<double>(n));
    return m;
}

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

Matrix embed(const HilbertSpace& space, Subsystem subsystem, const Matrix& local) {
    if (subsystem == Subsystem::Qubit) {
        return kron(local, Matrix::Identity(space.resonator_dim(), space.resonator_dim()));
    }
    return kron(Matrix::Identity(space.qubit_dim(), space.qubit_dim()), local);
}

void require_two_level(const HilbertSpace& space, const char* what) {
    if (space.qubit_dim() != 2) {
        throw DimensionError(std::string(what) + " requires a two-level qubit (qubit_dim == 2)");
    }
}

void require_same_space(const Operator& a, const Operator& b) {
    if (!(a.space() == b.space())) throw DimensionError("operators live on different spaces");
}

}  // namespace

HilbertSpace::HilbertSpace(int qubit_dim, int resonator_dim, int dimension_cap)
    : qubit_dim_(qubit_dim), resonator_dim_(resonator_dim) {
    if (qubit_dim < 2 || resonator_dim < 2) {
        throw DimensionError("each subsystem needs at least two levels");
    }
    if (static_cast<long long>(qubit_dim) * resonator_dim > dimension_cap) {
        throw DimensionError("Hilbert space dimension exceeds cap of " + std::to_string(dimension_cap));
    }
}

int HilbertSpace::index(int qubit_level, int resonator_level) const {
    if (qubit_level < 0 || qubit_level >= qubit_dim_ || resonator_level < 0 ||
        resonator_level >= resonator_dim_) {
        throw DimensionError("basis level outside truncation");
    }
    return qubit_level * resonator_dim_ + resonator_level;
}

Operator::Operator(HilbertSpace space, Matrix matrix, bool hermitian)
    : space_(space), matrix_(std::move(matrix)), hermitian_(hermitian) {
    if (matrix_.rows() != space_.dim() || matrix_.cols() != space_.dim()) {
        throw DimensionError("operator matrix does not match Hilbert space dimension");
    }
    if (hermitian_ && hermiticity_defect() > hermiticity_tolerance * std::max(1.0, max_abs())) {
        throw DomainError("operator flagged Hermitian but A != A^dagger");
    }
}

double Operator::hermiticity_defect() const {
    return (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
}

double Operator::max_abs() const { return matrix_.cwiseAbs().maxCoeff(); }

Operator Operator::adjoint() const { return Operator(space_, matrix_.adjoint(), hermitian_); }

Operator operator+(const Operator& a, const Operator& b) {
    require_same_space(a, b);
    return Operator(a.space_, a.matrix_ + b.matrix_, a.hermitian_ && b.hermitian_);
}

Operator operator-(const Operator& a, const Operator& b) {
    require_same_space(a, b);
    return Operator(a.space_, a.matrix_ - b.matrix_, a.hermitian_ && b.hermitian_);
}

Operator operator*(const Operator& a, const Operator& b) {
    require_same_space(a, b);
    return Operator(a.space_, a.matrix_ * b.matrix_);
}

Operator operator*(double s, const Operator& a) { return Operator(a.space_, s * a.matrix_, a.hermitian_); }

Operator operator*(Complex s, const Operator& a) { return Operator(a.space_, s * a.matrix_); }

Operator commutator(const Operator& a, const Operator& b) { return a * b - b * a; }

void SystemParams::validate() const {
    if (!(qubit_frequency > 0.0)) throw DomainError("qubit_frequency must be positive");
    if (!(resonator_frequency > 0.0)) throw DomainError("resonator_frequency must be positive");
    if (anharmonicity > 0.0) throw DomainError("anharmonicity must be <= 0");
    if (resonator_decay < 0.0 || qubit_relaxation < 0.0 || qubit_linewidth < 0.0) {
        throw DomainError("decay rates must be non-negative");
    }
}

Operator identity(const HilbertSpace& space) {
    return Operator(space, Matrix::Identity(space.dim(), space.dim()), true);
}

Operator annihilation(const HilbertSpace& space, Subsystem subsystem) {
    const int d = subsystem == Subsystem::Qubit ? space.qubit_dim() : space.resonator_dim();
    return Operator(space, embed(space, subsystem, ladder(d)));
}

Operator creation(const HilbertSpace& space, Subsystem subsystem) {
    return annihilation(space, subsystem).adjoint();
}

Operator number(const HilbertSpace& space, Subsystem subsystem) {
    const auto a = annihilation(space, subsystem);
    return Operator(space, a.matrix().adjoint() * a.matrix(), true);
}

Operator sigma_minus(const HilbertSpace& space) {
    require_two_level(space, "sigma_minus");
    return annihilation(space, Subsystem::Qubit);
}

Operator sigma_plus(const HilbertSpace& space) { return sigma_minus(space).adjoint(); }

Operator sigma_z(const HilbertSpace& space) {
    require_two_level(space, "sigma_z");
    Matrix local = Matrix::Zero(2, 2);
    local(0, 0) = -1.0;
    local(1, 1) = 1.0;
    return Operator(space, embed(space, Subsystem::Qubit, local), true);
}

Operator sigma_x(const HilbertSpace& space) {
    require_two_level(space, "sigma_x");
    Matrix local = Matrix::Zero(2, 2);
    local(0, 1) = 1.0;
    local(1, 0) = 1.0;
    return Operator(space, embed(space, Subsystem::Qubit, local), true);
}

Operator excitation_number(const HilbertSpace& space) {
    return number(space, Subsystem::Resonator) + number(space, Subsystem::Qubit);
}

Operator kerr_hamiltonian(const SystemParams& params, const HilbertSpace& space) {
    const Matrix a = annihilation(space, Subsystem::Qubit).matrix();
    const Matrix b = annihilation(space, Subsystem::Resonator).matrix();
    const Matrix ad = a.adjoint();
    Matrix h = params.qubit_frequency * (ad * a) + 0.5 * params.anharmonicity * (ad * ad * a * a) +
               params.resonator_frequency * (b.adjoint() * b);
    return Operator(space, std::move(h), true);
}

Operator photon_pressure_interaction(double g0, const HilbertSpace& space) {
    const Matrix a = annihilation(space, Subsystem::Qubit).matrix();
    const Matrix b = annihilation(space, Subsystem::Resonator).matrix();
    const Matrix x = b + b.adjoint();
    // a^dag a and (b + b^dag) act on different factors and commute.
    Matrix h = g0 * (a.adjoint() * a) * x;
    return Operator(space, std::move(h), true);
}

Operator full_hamiltonian(const SystemParams& params, const HilbertSpace& space) {
    return kerr_hamiltonian(params, space) +
           photon_pressure_interaction(params.single_photon_coupling, space);
}

Operator rotating_frame_hamiltonian(const SystemParams& params, const DriveParams& drive,
                                    const HilbertSpace& space) {
    const Matrix a = annihilation(space, Subsystem::Qubit).matrix();
    const Matrix b = annihilation(space, Subsystem::Resonator).matrix();
    const Matrix ad = a.adjoint();
    Matrix h = -drive.detuning() * (ad * a) + 0.5 * params.anharmonicity * (ad * ad * a * a) +
               params.resonator_frequency * (b.adjoint() * b) +
               params.single_photon_coupling * (ad * a) * (b + b.adjoint()) +
               drive.amplitude * (a + ad);
    return Operator(space, std::move(h), true);
}

Operator displaced_frame_hamiltonian(const SystemParams& params, const DriveParams& drive,
                                     double mean_amplitude, const HilbertSpace& space,
                                     bool keep_nonlinear_residual) {
    const Matrix a = annihilation(space, Subsystem::Qubit).matrix();
    const Matrix b = annihilation(space, Subsystem::Resonator).matrix();
    const Matrix ad = a.adjoint();
    const Matrix x_b = b + b.adjoint();
    const double g = params.single_photon_coupling * mean_amplitude;
    Matrix h = -drive.detuning() * (ad * a) + params.resonator_frequency * (b.adjoint() * b) +
               g * (a + ad) * x_b;
    if (keep_nonlinear_residual) h += params.single_photon_coupling * (ad * a) * x_b;
    return Operator(space, std::move(h), true);
}

Operator linearized_jc_hamiltonian(double g, double qubit_detuning, double resonator_frequency,
                                   const HilbertSpace& space) {
    require_two_level(space, "linearized_jc_hamiltonian");
    const Matrix sm = sigma_minus(space).matrix();
    const Matrix b = annihilation(space, Subsystem::Resonator).matrix();
    Matrix h = -0.5 * qubit_detuning * sigma_z(space).matrix() +
               resonator_frequency * (b.adjoint() * b) + g * (sm.adjoint() * b + sm * b.adjoint());
    return Operator(space, std::move(h), true);
}

Operator driven_chevron_hamiltonian(double sideband_detuning, const PulseSegment& segment,
                                    const HilbertSpace& space, const ChevronFrameOptions& options) {
    require_two_level(space, "driven_chevron_hamiltonian");
    const Matrix sm = sigma_minus(space).matrix();
    const Matrix sp = sm.adjoint();
    const Matrix b = annihilation(space, Subsystem::Resonator).matrix();
    const Matrix bd = b.adjoint();
    Matrix h = 0.5 * sideband_detuning * sigma_z(space).matrix();
    if (segment.coupling != 0.0) {
        h += segment.coupling * (sp * b + sm * bd);
        if (options.counter_rotating) h += segment.coupling * (sp * bd + sm * b);
    }
    const double eps = PulseSchedule::effective_drive(segment);
    if (eps != 0.0) h += eps * (sp + sm);
    return Operator(space, std::move(h), true);
}

Operator driven_chevron_hamiltonian(double sideband_detuning, const PulseSchedule& schedule,
                                    double t, const HilbertSpace& space,
                                    const ChevronFrameOptions& options) {
    return driven_chevron_hamiltonian(sideband_detuning, schedule.segment_at(t), space, options);
}

}  // namespace ppcqed
