#pragma once

#include <cstdint>
#include <vector>

#include "ppcqed/fitting.hpp"
#include "ppcqed/quantum_core.hpp"
#include "ppcqed/spectroscopy.hpp"

namespace ppcqed::pipeline {

// Synthetic reproduction of the sideband-power series: avoided crossings at
// several drive amplitudes, Stark-shift photon calibration, and the
// g against sqrt(n) fit.
struct G0PipelineConfig {
    SystemParams device;
    spectroscopy::NotchParams resonator;
    double g0_true = 0.0;                  // rad/s
    std::vector<double> drive_amplitudes;  // epsilon_d, rad/s
    int sweep_points = 41;                 // drive frequencies per crossing
    double sweep_half_span = 0.0;          // rad/s around the crossing, 0 = auto
    double probe_half_span = 0.0;          // rad/s around omega_b, 0 = auto
    double probe_step = 0.0;               // rad/s, 0 = auto
    double s21_noise = 0.0;                // std dev per quadrature
    double stark_noise = 0.0;              // relative std dev of the measured shift
    double min_depth = 0.0;                // dip threshold, 0 = auto
    std::uint64_t seed = 0;

    void validate() const;
};

struct PowerPoint {
    double drive_amplitude = 0.0;
    double photon_number_true = 0.0;
    double coupling_true = 0.0;
    double stark_shift = 0.0;            // measured (noisy) shift
    double photon_number = 0.0;          // calibrated from the shift
    double coupling = 0.0;               // fitted g
    double coupling_uncertainty = 0.0;
    double crossing_drive_frequency = 0.0;
    int minima_count = 0;
};

struct G0PipelineResult {
    std::vector<PowerPoint> points;
    std::vector<std::vector<spectroscopy::CrossingSpectrum>> crossings;  // per power
    fit::FitResult g0_fit;

    double g0() const { return g0_fit.value("g0"); }
};

// Probe frequencies around omega_b, with the automatic span and step resolved.
std::vector<double> probe_grid(const G0PipelineConfig& config);

// Drive amplitude giving `photon_number` on the Kerr steady-state branch at
// qubit detuning Delta_q.
double drive_amplitude_for_occupation(double photon_number, double detuning, double anharmonicity);

// Drive amplitudes for source powers in dBm, scaled so that `reference_dbm`
// produces `reference_occupation` (amplitude ~ 10^(P/20)).
std::vector<double> drive_amplitudes_for_powers(const std::vector<double>& powers_dbm,
                                                double reference_dbm, double reference_occupation,
                                                double detuning, double anharmonicity);

G0PipelineResult run_g0_pipeline(const G0PipelineConfig& config);

}  // namespace ppcqed::pipeline
