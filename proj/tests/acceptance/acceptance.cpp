// Acceptance checks, one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "ppcqed/calibration.hpp"
#include "ppcqed/circuit_estimator.hpp"
#include "ppcqed/constants.hpp"
#include "ppcqed/device.hpp"
#include "ppcqed/dynamics.hpp"
#include "ppcqed/pipeline.hpp"
#include "ppcqed/spectroscopy.hpp"

using namespace ppcqed;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

double rel(double value, double reference) { return std::abs(value / reference - 1.0); }

struct Outcome {
    bool pass = true;
    std::string detail;

    void check(bool ok, const std::string& what) {
        if (!ok) pass = false;
        if (!detail.empty()) detail += "; ";
        detail += what + (ok ? "" : " [x]");
    }
};

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string fmt(const char* f, double a, double b) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

// Time of the first local minimum of a sampled trace, refined by a parabola
// through the three samples around it.
double first_minimum(const std::vector<double>& t, const std::vector<double>& p) {
    for (std::size_t i = 1; i + 1 < p.size(); ++i) {
        if (p[i] <= p[i - 1] && p[i] < p[i + 1]) {
            const double h = t[i + 1] - t[i];
            const double denom = p[i - 1] - 2.0 * p[i] + p[i + 1];
            return t[i] + 0.5 * h * (p[i - 1] - p[i + 1]) / denom;
        }
    }
    return NAN;
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
    return v;
}

SystemParams closed_device() {
    auto p = device::system_params();
    p.resonator_decay = 0.0;
    p.qubit_relaxation = 0.0;
    return p;
}

InvariantReport worst;  // accumulated over every trajectory simulated here

void absorb(const InvariantReport& r) {
    worst.max_trace_error = std::max(worst.max_trace_error, r.max_trace_error);
    worst.max_hermiticity_error = std::max(worst.max_hermiticity_error, r.max_hermiticity_error);
    worst.min_eigenvalue = std::min(worst.min_eigenvalue, r.min_eigenvalue);
    worst.positivity_checks += r.positivity_checks;
}

Outcome estimator_chain() {
    Outcome o;
    const auto start = Clock::now();
    const auto chain = circuit::estimate_chain(device::idc_geometry(), device::squid_geometry(),
                                               hz_to_rad(device::resonator_frequency_hz),
                                               hz_to_rad(device::flux_sensitivity_hz));
    const double elapsed = seconds_since(start);
    o.check(rel(chain.capacitance, 1.26e-12) < 0.02, fmt("C=%.4g pF (%.2f%%)", chain.capacitance * 1e12,
                                                          100 * rel(chain.capacitance, 1.26e-12)));
    o.check(rel(chain.inductance, 1.06e-9) < 0.02, fmt("L=%.4g nH (%.2f%%)", chain.inductance * 1e9,
                                                        100 * rel(chain.inductance, 1.06e-9)));
    o.check(rel(chain.zero_point_current, 36.8e-9) < 0.02,
            fmt("Izpf=%.4g nA (%.2f%%)", chain.zero_point_current * 1e9, 100 * rel(chain.zero_point_current, 36.8e-9)));
    o.check(rel(chain.mutual_inductance, 25.9e-12) < 0.02,
            fmt("M=%.4g pH (%.2f%%)", chain.mutual_inductance * 1e12, 100 * rel(chain.mutual_inductance, 25.9e-12)));
    o.check(rel(chain.zero_point_flux, 461e-6) < 0.02,
            fmt("Phizpf=%.4g uPhi0 (%.2f%%)", chain.zero_point_flux * 1e6, 100 * rel(chain.zero_point_flux, 461e-6)));
    const double g0 = rad_to_hz(chain.single_photon_coupling);
    o.check(rel(g0, 12.0e6) < 0.02, fmt("g0/2pi=%.4g MHz (%.2f%%)", g0 * 1e-6, 100 * rel(g0, 12.0e6)));
    o.check(elapsed < 1.0, fmt("%.3g s", elapsed));
    return o;
}

Outcome critical_photons() {
    Outcome o;
    const auto start = Clock::now();
    const double n = calibration::critical_photon_number(hz_to_rad(1.75e9), hz_to_rad(2.5e6));
    o.check(std::abs(n - 122500.0) < 1e-6, fmt("n_crit=%.10g", n));
    o.check(rel(n, 125000.0) < 0.05, "consistent with 125000");
    o.check(seconds_since(start) < 1.0, fmt("%.3g s", seconds_since(start)));
    return o;
}

Outcome chevron() {
    Outcome o;
    const auto closed = closed_device();
    const double g = hz_to_rad(device::rabi_coupling_hz);
    const auto fine = linspace(0.0, 150e-9, 601);
    const std::vector<double> zero{0.0};

    auto trace = [&](Preparation prep) {
        const auto r = chevron_experiment(closed, g, zero, fine, prep);
        absorb(r.report);
        return first_minimum(fine, r.excited);
    };
    const double t1 = trace(Preparation::ExcitedQubit);
    const double t2 = trace(Preparation::Fock1Resonator);
    o.check(std::abs(t1 - 90.5e-9) <= 1e-9, fmt("t_pi=%.3f ns", t1 * 1e9));
    o.check(std::abs(t2 - 64.0e-9) <= 1e-9, fmt("t_pi,2=%.3f ns", t2 * 1e9));

    const auto start = Clock::now();
    const auto detunings = linspace(hz_to_rad(-10e6), hz_to_rad(10e6), 41);
    const auto times = linspace(0.0, 500e-9, 101);
    const auto grid = chevron_experiment(device::system_params(), g, detunings, times, Preparation::ExcitedQubit);
    absorb(grid.report);
    const double elapsed = seconds_since(start);
    o.check(grid.excited.size() == 41u * 101u && elapsed < 60.0, fmt("41x101 open-system grid %.2f s", elapsed));
    return o;
}

Outcome ladder() {
    Outcome o;
    const auto closed = closed_device();
    const double g = hz_to_rad(device::rabi_coupling_hz);
    const HilbertSpace space(2, 6);
    PulseSchedule schedule;
    const auto times = linspace(0.0, 400e-9, 201);
    for (std::size_t i = 1; i < times.size(); ++i) schedule.append({times[i] - times[i - 1], g, 0.0, false});
    double base = 0.0;
    for (int n = 1; n <= 3; ++n) {
        const auto traj = evolve(DensityMatrix::pure(space, 1, n - 1), schedule, closed, 0.0);
        absorb(traj.report);
        std::vector<double> pe;
        for (const auto& rho : traj.states) pe.push_back(rho.qubit_population(1));
        const auto fit = rabi_frequency_fit(traj.times, pe);
        if (n == 1) base = fit.coupling;
        const double ratio = fit.coupling / base;
        const double err = std::abs(ratio / std::sqrt(n) - 1.0);
        o.check(err < 0.01 && rel(fit.coupling, std::sqrt(n) * g) < 0.01,
                fmt("n=%.0f ratio %.6f", n, ratio));
    }
    return o;
}

// Column-stacked Liouvillian: vec(A rho B) = (B^T kron A) vec(rho).
Eigen::MatrixXcd liouvillian(const Matrix& h, const std::vector<CollapseChannel>& channels) {
    const auto d = h.rows();
    const Matrix id = Matrix::Identity(d, d);
    auto kron = [](const Matrix& a, const Matrix& b) {
        Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        return out;
    };
    const Complex i(0.0, 1.0);
    Matrix l = -i * (kron(id, h) - kron(h.transpose(), id));
    for (const auto& c : channels) {
        const Matrix& a = c.op.matrix();
        const Matrix ada = a.adjoint() * a;
        l += c.rate * (kron(a.conjugate(), a) - 0.5 * kron(id, ada) - 0.5 * kron(ada.transpose(), id));
    }
    return l;
}

Outcome lindblad() {
    Outcome o;
    const HilbertSpace space(2, 3);
    const auto params = device::system_params();
    const double g = hz_to_rad(device::rabi_coupling_hz);
    const double delta = hz_to_rad(1.3e6);
    const PulseSegment segment{300e-9, g, 0.0, false};
    PulseSchedule schedule;
    schedule.append(segment);
    const auto rho0 = DensityMatrix::pure(space, 1, 0);
    const auto traj = evolve(rho0, schedule, params, delta);
    absorb(traj.report);

    const auto channels = device_collapse(params, space);
    const Matrix h = driven_chevron_hamiltonian(delta, segment, space).matrix();
    const Eigen::MatrixXcd prop = (liouvillian(h, channels) * segment.duration).exp();
    const auto d = space.dim();
    Eigen::VectorXcd v = Eigen::Map<const Eigen::VectorXcd>(rho0.matrix().data(), d * d);
    const Eigen::VectorXcd out = prop * v;
    const Matrix expected = Eigen::Map<const Matrix>(out.data(), d, d);
    const double dev = (traj.states.back().matrix() - expected).cwiseAbs().maxCoeff();

    o.check(dev < 1e-8, fmt("RK4 vs exp(Lt) on 2x3: %.3g", dev));
    o.check(worst.max_trace_error < 1e-8, fmt("max |tr-1|=%.3g", worst.max_trace_error));
    o.check(worst.max_hermiticity_error < 1e-10, fmt("max herm=%.3g", worst.max_hermiticity_error));
    o.check(worst.min_eigenvalue > -1e-8, fmt("min eig=%.3g", worst.min_eigenvalue));
    o.check(worst.positivity_checks >= 10, fmt("%.0f positivity checks", worst.positivity_checks));
    return o;
}

Outcome calibration_loop() {
    Outcome o;
    const auto dev = device::system_params();
    const double detuning = -dev.resonator_frequency;
    const double sum = 2.0 * dev.qubit_frequency - dev.resonator_frequency;
    const double lo = pipeline::drive_amplitude_for_occupation(1e-4, detuning, dev.anharmonicity);
    const double hi = pipeline::drive_amplitude_for_occupation(1.0, detuning, dev.anharmonicity);
    double worst_err = 0.0;
    for (int i = 0; i < 50; ++i) {
        const double eps = lo * std::pow(hi / lo, i / 49.0);
        const double n = calibration::kerr_steady_state(detuning, dev.anharmonicity, eps).occupation;
        const double shift = calibration::ac_stark_shift(eps, dev.anharmonicity, detuning, sum);
        const double back = calibration::photon_number_from_stark({shift, dev.anharmonicity, detuning, sum});
        worst_err = std::max(worst_err, rel(back, n));
    }
    o.check(worst_err < 1e-8, fmt("50 amplitudes, worst rel err %.3g", worst_err));
    return o;
}

Outcome normal_modes() {
    Outcome o;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const HilbertSpace space(2, 2);
    double worst_err = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const double wb = hz_to_rad(4e9 + 1e9 * u(rng));
        const double dq = -wb + hz_to_rad(50e6 * u(rng));
        const double g = hz_to_rad(10e6 * (0.5 + 0.5 * u(rng)));
        const Matrix h = linearized_jc_hamiltonian(g, dq, wb, space).matrix();
        const std::vector<int> idx{space.index(1, 0), space.index(0, 1)};
        Eigen::Matrix2cd block;
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) block(r, c) = h(idx[r], idx[c]);
        const Eigen::Vector2d ev = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd>(block).eigenvalues();
        const double ground = h(space.index(0, 0), space.index(0, 0)).real();
        const auto modes = spectroscopy::normal_mode_frequencies(wb, dq, g);
        const double scale = std::max(std::abs(wb), std::abs(dq));
        worst_err = std::max({worst_err, std::abs(ev(1) - ground - modes.upper) / scale,
                              std::abs(ev(0) - ground - modes.lower) / scale});
    }
    o.check(worst_err < 1e-14, fmt("1000 draws, worst rel err %.3g", worst_err));
    const double g = hz_to_rad(2.81e6);
    const double wb = hz_to_rad(4.347e9);
    const auto m = spectroscopy::normal_mode_frequencies(wb, -wb, g);
    const double split_err = std::abs((m.upper - m.lower) / (2.0 * g) - 1.0);
    o.check(split_err < 1e-12, fmt("resonant splitting/2g - 1 = %.3g", split_err));
    return o;
}

std::vector<spectroscopy::SpectrumPoint> notch_data(const spectroscopy::NotchParams& p, double noise,
                                                    std::mt19937_64* rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<spectroscopy::SpectrumPoint> data;
    const double kappa = p.total_rate();
    for (double w : linspace(p.resonator_frequency - 5.0 * kappa, p.resonator_frequency + 5.0 * kappa, 201)) {
        auto s = spectroscopy::s21_notch(w, p);
        if (noise > 0.0) s += spectroscopy::Complex(noise * normal(*rng), noise * normal(*rng));
        data.push_back({w, s});
    }
    return data;
}

std::vector<spectroscopy::CrossingSpectrum> branch_data(const spectroscopy::CrossingInit& truth, double noise,
                                                        std::mt19937_64* rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<spectroscopy::CrossingSpectrum> spectra;
    const double g = truth.coupling;
    for (double x : linspace(-6.0 * g, 6.0 * g, 41)) {
        const double drive = truth.crossing_drive_frequency + x;
        const auto m = spectroscopy::crossing_branches(drive, truth);
        spectroscopy::CrossingSpectrum s{drive, {m.lower, m.upper}};
        if (noise > 0.0)
            for (auto& v : s.minima) v += noise * normal(*rng);
        spectra.push_back(s);
    }
    return spectra;
}

Outcome fit_round_trips() {
    Outcome o;
    auto truth = device::notch_params();
    truth.mismatch_phase = 0.2;
    {
        auto init = truth;
        init.resonator_frequency += 0.3 * truth.total_rate();
        init.internal_rate *= 1.3;
        init.external_rate *= 0.7;
        init.mismatch_phase = 0.0;
        const auto fit = spectroscopy::notch_from_fit(spectroscopy::fit_notch(notch_data(truth, 0.0, nullptr), init));
        const double err = std::max({rel(fit.resonator_frequency, truth.resonator_frequency),
                                     rel(fit.internal_rate, truth.internal_rate),
                                     rel(fit.external_rate, truth.external_rate),
                                     rel(fit.mismatch_phase, truth.mismatch_phase)});
        o.check(err < 1e-6, fmt("notch noiseless worst rel %.3g", err));
    }
    {
        double worst_w = 0.0, worst_k = 0.0;
        for (int seed = 0; seed < 100; ++seed) {
            std::mt19937_64 rng(1000 + seed);
            auto init = truth;
            init.internal_rate *= 1.2;
            init.external_rate *= 0.8;
            const auto fit = spectroscopy::notch_from_fit(spectroscopy::fit_notch(notch_data(truth, 0.01, &rng), init));
            worst_w = std::max(worst_w, std::abs(fit.resonator_frequency - truth.resonator_frequency) / truth.total_rate());
            worst_k = std::max({worst_k, rel(fit.internal_rate, truth.internal_rate), rel(fit.external_rate, truth.external_rate)});
        }
        o.check(worst_w < 0.1 && worst_k < 0.05,
                fmt("notch sigma=0.01 x100: omega_b %.3g linewidths, kappa %.3g", worst_w, worst_k));
    }
    const auto wb = hz_to_rad(device::resonator_frequency_hz);
    const spectroscopy::CrossingInit cross{wb, hz_to_rad(device::crossing_coupling_hz),
                                           hz_to_rad(device::qubit_frequency_hz) - wb};
    {
        auto init = cross;
        init.coupling *= 1.2;
        init.crossing_drive_frequency += 0.5 * cross.coupling;
        init.resonator_frequency -= 0.1 * cross.coupling;
        const auto fit = spectroscopy::fit_avoided_crossing(branch_data(cross, 0.0, nullptr), init);
        const double err = std::max({rel(fit.value("coupling"), cross.coupling),
                                     rel(fit.value("resonator_frequency"), cross.resonator_frequency),
                                     rel(fit.value("crossing_drive_frequency"), cross.crossing_drive_frequency)});
        o.check(err < 1e-6, fmt("crossing noiseless worst rel %.3g", err));
    }
    {
        double worst_g = 0.0;
        for (int seed = 0; seed < 100; ++seed) {
            std::mt19937_64 rng(5000 + seed);
            const auto fit = spectroscopy::fit_avoided_crossing(branch_data(cross, 0.05 * cross.coupling, &rng), cross);
            worst_g = std::max(worst_g, rel(fit.value("coupling"), cross.coupling));
        }
        o.check(worst_g < 0.03, fmt("crossing sigma=0.05g x100: worst g err %.3g", worst_g));
    }
    return o;
}

pipeline::G0PipelineConfig pipeline_config(double s21_noise, double stark_noise, std::uint64_t seed) {
    pipeline::G0PipelineConfig c;
    c.device = device::system_params();
    c.resonator = device::notch_params();
    c.g0_true = hz_to_rad(device::g0_hz);
    const double n_ref = std::pow(device::crossing_coupling_hz / device::g0_hz, 2);
    c.drive_amplitudes = pipeline::drive_amplitudes_for_powers(
        {device::sideband_powers_dbm.begin(), device::sideband_powers_dbm.end()}, device::reference_power_dbm,
        n_ref, -c.device.resonator_frequency, c.device.anharmonicity);
    c.s21_noise = s21_noise;
    c.stark_noise = stark_noise;
    c.seed = seed;
    return c;
}

Outcome g0_pipeline() {
    Outcome o;
    const auto start = Clock::now();
    const double g0 = hz_to_rad(device::g0_hz);
    {
        const auto r = pipeline::run_g0_pipeline(pipeline_config(0.0, 0.0, 0));
        o.check(rel(r.g0(), g0) < 1e-3, fmt("noiseless g0/2pi=%.6g MHz (rel %.2g)", rad_to_hz(r.g0()) * 1e-6, rel(r.g0(), g0)));
        double n_max = 0.0;
        for (const auto& p : r.points) n_max = std::max(n_max, p.photon_number);
        o.check(n_max < 1.0, fmt("max calibrated n=%.4f", n_max));
    }
    double worst_err = 0.0;
    for (int seed = 0; seed < 25; ++seed) {
        const auto r = pipeline::run_g0_pipeline(pipeline_config(0.01, 0.03, 100 + seed));
        worst_err = std::max(worst_err, rel(r.g0(), g0));
    }
    o.check(worst_err < 0.03, fmt("noisy x25 worst rel err %.3g", worst_err));
    const double elapsed = seconds_since(start);
    o.check(elapsed < 300.0, fmt("%.1f s", elapsed));
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"estimator chain reproduces device numbers", estimator_chain},
        {"critical photon number", critical_photons},
        {"chevron pi times and grid runtime", chevron},
        {"sqrt(n) Jaynes-Cummings ladder", ladder},
        {"Lindblad invariants and propagator oracle", lindblad},
        {"Stark calibration closed loop", calibration_loop},
        {"normal-mode identity", normal_modes},
        {"fit round trips", fit_round_trips},
        {"end-to-end g0 pipeline", g0_pipeline},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        if (!o.pass) ++failed;
        std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
        std::fflush(stdout);
    }
    return failed;
}
