#pragma once

#include <vector>

namespace ppcqed::calibration {

// Steady state of the driven Kerr oscillator, n (alpha n - Delta)^2 = eps^2.
struct KerrSteadyState {
    double occupation = 0.0;     // mean qubit occupation on the physical branch
    int root_multiplicity = 1;   // number of real non-negative roots, 1 or 3
    bool bistable = false;       // root_multiplicity == 3
    std::vector<double> roots;   // all real non-negative roots, ascending
};

// Inputs to the AC-Stark calibration. Sign convention: Delta_q = omega_d -
// omega_q < 0 for a red-sideband drive, and the shift has the sign of alpha.
struct StarkCalibration {
    double stark_shift = 0.0;     // delta omega_q, rad/s
    double anharmonicity = 0.0;   // alpha < 0
    double detuning = 0.0;        // Delta_q != 0
    double sum_frequency = 0.0;   // Sigma = omega_q + omega_d > 0

    void validate() const;
};

/// Solves the steady-state cubic through its companion matrix and returns the
/// smallest non-negative real root. alpha = 0 reduces to eps^2 / Delta^2.
KerrSteadyState kerr_steady_state(double detuning, double anharmonicity, double drive_amplitude);

/// Residual of the steady-state cubic at occupation n.
double kerr_cubic_residual(double occupation, double detuning, double anharmonicity,
                           double drive_amplitude);

/// Drive amplitude at which the lower branch folds into the middle one,
/// sqrt(4 |Delta|^3 / (27 |alpha|)); infinite when Delta / alpha <= 0.
double fold_drive_amplitude(double detuning, double anharmonicity);

/// Bracketed co- plus counter-rotating factor 1/Delta^2 + 2/(|Delta| Sigma) + 1/Sigma^2.
double stark_factor(double detuning, double sum_frequency);

/// delta omega_q = eps^2 alpha / 2 * stark_factor.
double ac_stark_shift(double drive_amplitude, double anharmonicity, double detuning,
                      double sum_frequency);

/// Drive amplitude squared implied by a measured shift.
double drive_power_from_stark(const StarkCalibration& cal);

/// Photon number from a measured Stark shift: the shift fixes eps^2, the
/// steady-state cubic then gives the occupation.
double photon_number_from_stark(const StarkCalibration& cal);

/// alpha - 2 g0^2 omega_b / (omega_b^2 + gamma_b^2/4).
double effective_kerr(double anharmonicity, double g0, double resonator_frequency,
                      double resonator_linewidth);

/// Delta^2 / (4 g_ab^2).
double critical_photon_number(double detuning, double parasitic_coupling);

}  // namespace ppcqed::calibration
