#include "ppcqed/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "ppcqed/calibration.hpp"
#include "ppcqed/errors.hpp"

namespace ppcqed::pipeline {

namespace {

struct Resolved {
    double sweep_half_span;
    double probe_half_span;
    double probe_step;
    double min_depth;
    double merge_width;
};

double sideband_detuning(const G0PipelineConfig& c) { return -c.device.resonator_frequency; }

double sum_frequency(const G0PipelineConfig& c) {
    return 2.0 * c.device.qubit_frequency - c.device.resonator_frequency;
}

Resolved resolve(const G0PipelineConfig& c) {
    double g_max = 0.0;
    for (double eps : c.drive_amplitudes) {
        const auto kerr = calibration::kerr_steady_state(sideband_detuning(c), c.device.anharmonicity, eps);
        g_max = std::max(g_max, c.g0_true * std::sqrt(kerr.occupation));
    }
    const double kappa = c.resonator.total_rate();
    const double gamma = c.device.qubit_linewidth;
    Resolved r{};
    r.sweep_half_span = c.sweep_half_span > 0.0 ? c.sweep_half_span : 4.0 * g_max + 4.0 * gamma + 20.0 * kappa;
    const double s = r.sweep_half_span;
    r.probe_half_span = c.probe_half_span > 0.0
                            ? c.probe_half_span
                            : 0.5 * (s + std::sqrt(s * s + 4.0 * g_max * g_max)) + 10.0 * kappa;
    r.probe_step = c.probe_step > 0.0 ? c.probe_step : 0.1 * kappa;
    r.min_depth = c.min_depth > 0.0 ? c.min_depth : std::max(0.02, 5.0 * c.s21_noise);
    r.merge_width = 0.5 * (kappa + gamma);
    return r;
}

}  // namespace

void G0PipelineConfig::validate() const {
    device.validate();
    resonator.validate();
    if (g0_true < 0.0) throw DomainError("g0 must be non-negative");
    if (drive_amplitudes.size() < 2) throw DomainError("pipeline needs at least two drive amplitudes");
    for (double eps : drive_amplitudes) {
        if (!(eps > 0.0)) throw DomainError("drive amplitudes must be positive");
    }
    if (sweep_points < 5) throw DomainError("crossing sweep needs at least 5 drive frequencies");
    if (sweep_half_span < 0.0 || probe_half_span < 0.0 || probe_step < 0.0 || min_depth < 0.0) {
        throw DomainError("spans, steps and thresholds must be non-negative");
    }
    if (s21_noise < 0.0 || stark_noise < 0.0) throw DomainError("noise levels must be non-negative");
    if (!(resonator.total_rate() > 0.0)) throw DomainError("resonator linewidth must be positive");
}

std::vector<double> probe_grid(const G0PipelineConfig& config) {
    const auto r = resolve(config);
    const auto n = static_cast<long>(std::ceil(2.0 * r.probe_half_span / r.probe_step));
    std::vector<double> grid(static_cast<std::size_t>(n + 1));
    const double start = config.resonator.resonator_frequency - r.probe_half_span;
    const double step = 2.0 * r.probe_half_span / static_cast<double>(n);
    for (long i = 0; i <= n; ++i) grid[static_cast<std::size_t>(i)] = start + step * static_cast<double>(i);
    return grid;
}

double drive_amplitude_for_occupation(double photon_number, double detuning, double anharmonicity) {
    if (photon_number < 0.0) throw DomainError("occupation must be non-negative");
    return std::sqrt(photon_number) * std::abs(anharmonicity * photon_number - detuning);
}

std::vector<double> drive_amplitudes_for_powers(const std::vector<double>& powers_dbm,
                                                double reference_dbm, double reference_occupation,
                                                double detuning, double anharmonicity) {
    const double reference = drive_amplitude_for_occupation(reference_occupation, detuning, anharmonicity);
    std::vector<double> out;
    out.reserve(powers_dbm.size());
    for (double p : powers_dbm) out.push_back(reference * std::pow(10.0, (p - reference_dbm) / 20.0));
    return out;
}

G0PipelineResult run_g0_pipeline(const G0PipelineConfig& config) {
    config.validate();
    const auto r = resolve(config);
    const auto probes = probe_grid(config);
    const double detuning = sideband_detuning(config);
    const double sum = sum_frequency(config);
    const auto& dev = config.device;

    std::mt19937_64 rng(config.seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    G0PipelineResult result;
    std::vector<spectroscopy::CouplingPoint> couplings;
    std::vector<double> mags(probes.size());

    for (double eps : config.drive_amplitudes) {
        PowerPoint point;
        point.drive_amplitude = eps;
        point.photon_number_true = calibration::kerr_steady_state(detuning, dev.anharmonicity, eps).occupation;
        point.coupling_true = config.g0_true * std::sqrt(point.photon_number_true);
        const double shift = calibration::ac_stark_shift(eps, dev.anharmonicity, detuning, sum);
        const double shifted_qubit = dev.qubit_frequency + shift;
        const double center = shifted_qubit - config.resonator.resonator_frequency;

        std::vector<spectroscopy::CrossingSpectrum> spectra;
        for (int j = 0; j < config.sweep_points; ++j) {
            const double u = 2.0 * j / static_cast<double>(config.sweep_points - 1) - 1.0;
            const double drive = center + r.sweep_half_span * u;
            const spectroscopy::HybridLineshape line{config.resonator, drive - shifted_qubit,
                                                     point.coupling_true, dev.qubit_linewidth};
            for (std::size_t k = 0; k < probes.size(); ++k) {
                auto s = spectroscopy::s21_hybridized(probes[k], line);
                if (config.s21_noise > 0.0) {
                    s += spectroscopy::Complex(config.s21_noise * normal(rng), config.s21_noise * normal(rng));
                }
                mags[k] = std::abs(s);
            }
            spectra.push_back({drive, spectroscopy::extract_minima(probes, mags, r.merge_width, r.min_depth)});
            point.minima_count += static_cast<int>(spectra.back().minima.size());
        }

        auto init = spectroscopy::initial_crossing_guess(spectra);
        init.resonator_frequency = config.resonator.resonator_frequency;
        const auto crossing = spectroscopy::fit_avoided_crossing(spectra, init);
        point.coupling = crossing.value("coupling");
        point.coupling_uncertainty = crossing.uncertainty("coupling");
        point.crossing_drive_frequency = crossing.value("crossing_drive_frequency");

        point.stark_shift = shift * (1.0 + config.stark_noise * normal(rng));
        point.photon_number = calibration::photon_number_from_stark(
            {point.stark_shift, dev.anharmonicity, detuning, sum});

        // A relative shift error e moves sqrt(n) by e/2; carried as an error on g.
        const double calibration_sigma = 0.5 * point.coupling * config.stark_noise;
        couplings.push_back({point.photon_number, point.coupling,
                             std::hypot(point.coupling_uncertainty, calibration_sigma)});
        result.points.push_back(point);
        result.crossings.push_back(std::move(spectra));
    }
    result.g0_fit = spectroscopy::fit_g0(couplings);
    return result;
}

}  // namespace ppcqed::pipeline
