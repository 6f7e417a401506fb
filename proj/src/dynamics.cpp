#include "ppcqed/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>
#include <thread>

#include <fftw3.h>

#include "ppcqed/constants.hpp"
#include "ppcqed/errors.hpp"

namespace ppcqed {

namespace {

void require_two_level(const HilbertSpace& space) {
    if (space.qubit_dim() != 2) throw DimensionError("chevron dynamics require qubit_dim == 2");
}

Matrix excited_projector(const HilbertSpace& space) {
    const Matrix sm = sigma_minus(space).matrix();
    return sm.adjoint() * sm;
}

// RHS with the anti-commutator folded into a non-Hermitian effective Hamiltonian.
struct Liouvillian {
    Matrix h_eff;
    std::vector<std::pair<Matrix, double>> jumps;

    Liouvillian(const Operator& h, std::span<const CollapseChannel> collapse)
        : h_eff(h.matrix()) {
        for (const auto& c : collapse) {
            if (!(c.op.space() == h.space())) throw DimensionError("collapse operator on a different space");
            if (c.rate < 0.0) throw DomainError("collapse rates must be non-negative");
            if (c.rate == 0.0) continue;
            h_eff -= Complex(0.0, 0.5 * c.rate) * (c.op.matrix().adjoint() * c.op.matrix());
            jumps.emplace_back(c.op.matrix(), c.rate);
        }
    }

    Matrix operator()(const Matrix& rho) const {
        const Complex minus_i(0.0, -1.0);
        Matrix hr = h_eff * rho;
        Matrix out = minus_i * hr + minus_i * (-hr.adjoint());  // rho Hermitian: (H rho)^dag = rho H^dag
        for (const auto& [l, r] : jumps) out.noalias() += r * (l * rho * l.adjoint());
        return out;
    }
};

class InvariantTracker {
public:
    InvariantTracker(InvariantReport& report) : report_(report) {}

    void check(const Matrix& rho, double t, bool positivity) {
        const double trace_err = std::abs(rho.trace() - Complex(1.0, 0.0));
        const double herm_err = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
        report_.max_trace_error = std::max(report_.max_trace_error, trace_err);
        report_.max_hermiticity_error = std::max(report_.max_hermiticity_error, herm_err);
        if (trace_err >= DensityMatrix::trace_tolerance ||
            herm_err >= DensityMatrix::hermiticity_tolerance) {
            fail(t, trace_err, herm_err, 0.0);
        }
        if (positivity) {
            Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
            const double min_eig = es.eigenvalues().minCoeff();
            report_.min_eigenvalue = std::min(report_.min_eigenvalue, min_eig);
            ++report_.positivity_checks;
            if (min_eig <= -DensityMatrix::positivity_tolerance) fail(t, trace_err, herm_err, min_eig);
        }
    }

private:
    [[noreturn]] static void fail(double t, double trace_err, double herm_err, double min_eig) {
        std::ostringstream msg;
        msg << "density-matrix invariant breached at t = " << t << " s: |tr - 1| = " << trace_err
            << ", max|rho - rho^dag| = " << herm_err << ", min eigenvalue = " << min_eig;
        throw NumericalError(msg.str());
    }

    InvariantReport& report_;
};

void merge_report(InvariantReport& into, const InvariantReport& from) {
    into.max_trace_error = std::max(into.max_trace_error, from.max_trace_error);
    into.max_hermiticity_error = std::max(into.max_hermiticity_error, from.max_hermiticity_error);
    into.min_eigenvalue = std::min(into.min_eigenvalue, from.min_eigenvalue);
    into.positivity_checks += from.positivity_checks;
}

}  // namespace

DensityMatrix::DensityMatrix(HilbertSpace space, Matrix matrix)
    : space_(space), matrix_(std::move(matrix)) {
    if (matrix_.rows() != space_.dim() || matrix_.cols() != space_.dim()) {
        throw DimensionError("density matrix does not match Hilbert space dimension");
    }
    if (hermiticity_error() >= hermiticity_tolerance) throw NumericalError("density matrix is not Hermitian");
    if (trace_error() >= trace_tolerance) throw NumericalError("density matrix trace differs from 1");
    if (min_eigenvalue() <= -positivity_tolerance) throw NumericalError("density matrix is not positive");
}

DensityMatrix DensityMatrix::pure(const HilbertSpace& space, int qubit_level, int resonator_level) {
    Matrix m = Matrix::Zero(space.dim(), space.dim());
    const int i = space.index(qubit_level, resonator_level);
    m(i, i) = 1.0;
    return DensityMatrix(space, std::move(m));
}

double DensityMatrix::trace_error() const { return std::abs(matrix_.trace() - Complex(1.0, 0.0)); }

double DensityMatrix::hermiticity_error() const {
    return (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (matrix_ + matrix_.adjoint()), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

double DensityMatrix::expectation(const Operator& op) const {
    if (!(op.space() == space_)) throw DimensionError("observable on a different space");
    return (op.matrix() * matrix_).trace().real();
}

double DensityMatrix::qubit_population(int level) const {
    if (level < 0 || level >= space_.qubit_dim()) throw DimensionError("qubit level outside truncation");
    double p = 0.0;
    for (int n = 0; n < space_.resonator_dim(); ++n) {
        const int i = space_.index(level, n);
        p += matrix_(i, i).real();
    }
    return p;
}

Matrix lindblad_rhs(const Operator& hamiltonian, const Matrix& rho,
                    std::span<const CollapseChannel> collapse) {
    if (rho.rows() != hamiltonian.space().dim() || rho.cols() != hamiltonian.space().dim()) {
        throw DimensionError("density matrix and Hamiltonian dimensions differ");
    }
    const Complex minus_i(0.0, -1.0);
    const Matrix& h = hamiltonian.matrix();
    Matrix out = minus_i * (h * rho - rho * h);
    for (const auto& c : collapse) {
        if (!(c.op.space() == hamiltonian.space())) throw DimensionError("collapse operator on a different space");
        if (c.rate < 0.0) throw DomainError("collapse rates must be non-negative");
        const Matrix& l = c.op.matrix();
        const Matrix ldl = l.adjoint() * l;
        out += c.rate * (l * rho * l.adjoint() - 0.5 * (ldl * rho + rho * ldl));
    }
    return out;
}

Matrix lindblad_rhs(const Operator& hamiltonian, const DensityMatrix& rho,
                    std::span<const CollapseChannel> collapse) {
    if (!(rho.space() == hamiltonian.space())) throw DimensionError("state and Hamiltonian spaces differ");
    return lindblad_rhs(hamiltonian, rho.matrix(), collapse);
}

std::vector<CollapseChannel> device_collapse(const SystemParams& params, const HilbertSpace& space) {
    std::vector<CollapseChannel> out;
    if (params.resonator_decay > 0.0) {
        out.push_back({annihilation(space, Subsystem::Resonator), params.resonator_decay});
    }
    if (params.qubit_relaxation > 0.0) {
        out.push_back({annihilation(space, Subsystem::Qubit), params.qubit_relaxation});
    }
    return out;
}

double rk4_step_limit(const PulseSegment& segment, const SystemParams& params, double detuning,
                      double dt_max) {
    if (!(dt_max > 0.0)) throw DomainError("dt_max must be positive");
    const double omega_max = std::max({std::abs(detuning), std::abs(segment.coupling),
                                       std::abs(PulseSchedule::effective_drive(segment)),
                                       params.qubit_relaxation, params.resonator_decay});
    if (omega_max == 0.0) return dt_max;
    const double f_max = omega_max / (2.0 * constants::pi);
    return std::min(dt_max, 1.0 / (50.0 * f_max));
}

Trajectory evolve(const DensityMatrix& initial, const PulseSchedule& schedule,
                  const SystemParams& params, double detuning, const EvolveOptions& options) {
    if (schedule.empty()) throw ScheduleError("evolve needs a non-empty schedule");
    const HilbertSpace& space = initial.space();
    require_two_level(space);
    const auto collapse = device_collapse(params, space);

    // Step plan per segment.
    std::vector<long long> steps_per_segment;
    long long total_steps = 0;
    for (const auto& seg : schedule.segments()) {
        const double h_max = rk4_step_limit(seg, params, detuning, options.dt_max);
        const double n = std::ceil(seg.duration / h_max * (1.0 - 1e-12));
        if (!(n >= 1.0) || n > 1e10 || seg.duration / n < 1e-21) {
            throw NumericalError("RK4 step-size underflow");
        }
        steps_per_segment.push_back(static_cast<long long>(n));
        total_steps += static_cast<long long>(n);
    }

    Trajectory traj;
    const long long stored_estimate = options.record_steps ? total_steps + 1
                                                            : static_cast<long long>(schedule.size()) + 1;
    const long long stride = std::max<long long>(1, stored_estimate / std::max(1, options.positivity_checkpoints));
    InvariantTracker tracker(traj.report);
    long long stored = 0;
    auto store = [&](double t, const Matrix& rho, bool force_positivity) {
        const bool positivity = force_positivity || (stored % stride == 0);
        tracker.check(rho, t, positivity);
        traj.times.push_back(t);
        traj.states.emplace_back(space, rho);
        ++stored;
    };

    Matrix rho = initial.matrix();
    double t = 0.0;
    store(t, rho, true);
    for (std::size_t s = 0; s < schedule.size(); ++s) {
        const PulseSegment& seg = schedule.segments()[s];
        const Liouvillian rhs(driven_chevron_hamiltonian(detuning, seg, space, options.frame), collapse);
        const long long n = steps_per_segment[s];
        const double h = seg.duration / static_cast<double>(n);
        const double t0 = schedule.edge(s);
        for (long long k = 0; k < n; ++k) {
            const Matrix k1 = rhs(rho);
            const Matrix k2 = rhs(rho + (0.5 * h) * k1);
            const Matrix k3 = rhs(rho + (0.5 * h) * k2);
            const Matrix k4 = rhs(rho + h * k3);
            rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            ++traj.steps;
            t = (k + 1 == n) ? schedule.edge(s + 1) : t0 + static_cast<double>(k + 1) * h;
            if (options.record_steps && k + 1 < n) store(t, rho, false);
        }
        store(t, rho, s + 1 == schedule.size());
    }
    return traj;
}

DensityMatrix apply_ideal_pi(const DensityMatrix& rho) {
    const Matrix x = sigma_x(rho.space()).matrix();
    return DensityMatrix(rho.space(), x * rho.matrix() * x);
}

ChevronResult chevron_experiment(const SystemParams& params, double g_pulse,
                                 std::span<const double> detunings, std::span<const double> times,
                                 Preparation preparation, const ChevronOptions& options) {
    if (detunings.empty() || times.empty()) throw DomainError("chevron axes must be non-empty");
    for (std::size_t i = 1; i < detunings.size(); ++i) {
        if (!(detunings[i] > detunings[i - 1])) throw DomainError("detuning axis must be increasing");
    }
    if (times.front() < 0.0) throw DomainError("pulse durations must be non-negative");
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (!(times[i] > times[i - 1])) throw DomainError("time axis must be increasing");
    }
    if (!(g_pulse > 0.0)) throw DomainError("sideband coupling must be positive");

    const HilbertSpace space(2, options.resonator_dim);
    const Matrix projector = excited_projector(space);
    EvolveOptions evolve_opts;
    evolve_opts.dt_max = options.dt_max;
    evolve_opts.frame = options.frame;

    auto qubit_pi = [&](const DensityMatrix& rho, InvariantReport& report) {
        if (options.pi_pulse_duration <= 0.0) return apply_ideal_pi(rho);
        PulseSegment pulse{options.pi_pulse_duration, 0.0,
                           constants::pi / (2.0 * options.pi_pulse_duration), true};
        auto traj = evolve(rho, PulseSchedule({pulse}), params, 0.0, evolve_opts);
        merge_report(report, traj.report);
        return traj.states.back();
    };

    // Shared preparation, independent of the sideband detuning.
    InvariantReport prep_report;
    DensityMatrix prepared = DensityMatrix::pure(space, 0, 0);
    if (preparation != Preparation::Ground) prepared = qubit_pi(prepared, prep_report);
    if (preparation == Preparation::Fock1Resonator) {
        PulseSegment swap{constants::pi / (2.0 * g_pulse), g_pulse, 0.0, false};
        auto traj = evolve(prepared, PulseSchedule({swap}), params, 0.0, evolve_opts);
        merge_report(prep_report, traj.report);
        prepared = qubit_pi(traj.states.back(), prep_report);
    }

    // Pulse durations become segment edges so every sample is a step edge.
    PulseSchedule schedule;
    std::vector<double> edges;
    double previous = 0.0;
    for (double tau : times) {
        if (tau > previous) schedule.append({tau - previous, g_pulse, 0.0, false});
        previous = tau;
    }

    ChevronResult result;
    result.detunings.assign(detunings.begin(), detunings.end());
    result.times.assign(times.begin(), times.end());
    result.excited.assign(detunings.size() * times.size(), 0.0);
    std::vector<InvariantReport> reports(detunings.size());

    auto run_row = [&](std::size_t row) {
        const double p0 = (projector * prepared.matrix()).trace().real();
        std::size_t col = 0;
        if (times.front() == 0.0) result.excited[row * times.size() + col++] = p0;
        if (schedule.empty()) return;
        const auto traj = evolve(prepared, schedule, params, detunings[row], evolve_opts);
        reports[row] = traj.report;
        for (std::size_t k = 1; k < traj.states.size(); ++k, ++col) {
            result.excited[row * times.size() + col] =
                (projector * traj.states[k].matrix()).trace().real();
        }
    };

    const int threads = std::max(1, std::min<int>(options.threads, static_cast<int>(detunings.size())));
    if (threads == 1) {
        for (std::size_t row = 0; row < detunings.size(); ++row) run_row(row);
    } else {
        std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
        std::vector<std::jthread> pool;
        for (int w = 0; w < threads; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t row = static_cast<std::size_t>(w); row < detunings.size();
                         row += static_cast<std::size_t>(threads)) {
                        run_row(row);
                    }
                } catch (...) {
                    errors[static_cast<std::size_t>(w)] = std::current_exception();
                }
            });
        }
        pool.clear();
        for (auto& e : errors) {
            if (e) std::rethrow_exception(e);
        }
    }
    result.report = prep_report;
    for (const auto& r : reports) merge_report(result.report, r);
    return result;
}

RabiFit rabi_frequency_fit(std::span<const double> times, std::span<const double> excited) {
    const std::size_t n = times.size();
    if (n != excited.size()) throw DimensionError("time and probability traces differ in length");
    if (n < 10) throw DegenerateDataError("Rabi fit needs at least 10 samples");
    for (std::size_t i = 1; i < n; ++i) {
        if (!(times[i] > times[i - 1])) throw DegenerateDataError("Rabi fit needs increasing times");
    }
    const double span = times.back() - times.front();
    double mean = 0.0;
    for (double p : excited) mean += p / static_cast<double>(n);
    const auto [pmin, pmax] = std::minmax_element(excited.begin(), excited.end());
    if (*pmax - *pmin <= 1e-12) throw DegenerateDataError("flat Rabi trace");

    // Periodogram on a uniform resampling, zero padded 16x.
    const std::size_t padded = [&] {
        std::size_t p = 1;
        while (p < 16 * n) p <<= 1;
        return p;
    }();
    const double dt = span / static_cast<double>(n - 1);
    std::vector<double> signal(padded, 0.0);
    for (std::size_t i = 0, j = 0; i < n; ++i) {
        const double t = times.front() + static_cast<double>(i) * dt;
        while (j + 2 < n && times[j + 1] < t) ++j;
        const double w = std::clamp((t - times[j]) / (times[j + 1] - times[j]), 0.0, 1.0);
        signal[i] = (1.0 - w) * excited[j] + w * excited[j + 1] - mean;
    }
    std::vector<fftw_complex> spectrum(padded / 2 + 1);
    fftw_plan plan = fftw_plan_dft_r2c_1d(static_cast<int>(padded), signal.data(), spectrum.data(),
                                          FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
    std::size_t peak = 1;
    double peak_power = -1.0;
    for (std::size_t k = 1; k < spectrum.size(); ++k) {
        const double power = spectrum[k][0] * spectrum[k][0] + spectrum[k][1] * spectrum[k][1];
        if (power > peak_power) {
            peak_power = power;
            peak = k;
        }
    }
    const double f_peak = static_cast<double>(peak) / (static_cast<double>(padded) * dt);
    if (f_peak * span < 1.0 - 1e-9) {
        throw DegenerateDataError("Rabi trace spans less than one oscillation");
    }
    const double g_init = constants::pi * f_peak;  // cos(2 g t) oscillates at 2g = 2 pi f

    fit::Objective objective = [&](std::span<const double> p) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double model = p[0] * std::exp(-p[1] * times[i]) * std::cos(2.0 * p[2] * times[i]) + p[3];
            const double r = model - excited[i];
            sum += r * r;
        }
        return sum;
    };

    const double amp = 0.5 * (*pmax - *pmin);
    const std::vector<double> steps{0.1 * amp, 0.05 * g_init, 0.01 * g_init, 0.1 * amp};
    fit::SimplexResult best;
    bool have = false;
    // Phase-sign tie break: start from both amplitude signs, keep the lower residual.
    for (double sign : {1.0, -1.0}) {
        const std::vector<double> x0{sign * amp, 0.0, g_init, mean};
        auto run = fit::minimize_simplex(objective, x0, steps);
        if (!have || run.value < best.value) {
            best = run;
            have = true;
        }
    }
    if (!best.converged) throw ConvergenceError("Rabi fit did not converge within the iteration cap");

    RabiFit out;
    out.fit = fit::make_fit_result(objective, best, steps, static_cast<int>(n),
                                   {"amplitude", "decay", "coupling", "offset"});
    out.amplitude = best.x[0];
    out.decay = best.x[1];
    out.coupling = std::abs(best.x[2]);
    out.offset = best.x[3];
    out.fit.parameters[2].value = out.coupling;
    return out;
}

}  // namespace ppcqed
