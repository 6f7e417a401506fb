#pragma once

#include <complex>
#include <span>
#include <vector>

#include "ppcqed/fitting.hpp"

namespace ppcqed::spectroscopy {

using Complex = std::complex<double>;

struct NotchParams {
    double resonator_frequency = 0.0;  // rad/s
    double internal_rate = 0.0;        // kappa_int, rad/s
    double external_rate = 0.0;        // kappa_ext, rad/s
    double mismatch_phase = 0.0;       // theta, (-pi, pi]

    void validate() const;
    double total_rate() const { return internal_rate + external_rate; }
};

struct NormalModePair {
    double upper = 0.0;  // omega_+
    double lower = 0.0;  // omega_-
};

struct SpectrumPoint {
    double frequency = 0.0;  // probe, rad/s
    Complex s21;
};

/// 1 - kappa_ext e^{i theta} / (kappa + 2 i (omega - omega_b)).
Complex s21_notch(double omega, const NotchParams& p);

/// omega_pm = (omega_b - Delta_q)/2 pm sqrt(Delta_qb^2 + 4 g^2)/2, Delta_qb = omega_b + Delta_q.
NormalModePair normal_mode_frequencies(double resonator_frequency, double qubit_detuning, double g);

// Sideband-hybridised resonator seen through the feedline. Each normal mode
// carries its resonator participation w: external rate w kappa_ext and
// linewidth w kappa_b + (1 - w) gamma_q.
struct HybridLineshape {
    NotchParams resonator;
    double qubit_detuning = 0.0;  // Delta_q = omega_d - omega_q
    double coupling = 0.0;        // g
    double qubit_linewidth = 0.0; // gamma_q
};

Complex s21_hybridized(double omega, const HybridLineshape& p);

// Resonator weight of the upper and lower normal modes (sum to one).
std::pair<double, double> resonator_participation(double resonator_frequency, double qubit_detuning,
                                                  double g);

// Complex affine baseline c0 + c1 (omega - center), fitted to points farther
// than `exclusion` from `center`, divided out of the data.
std::vector<SpectrumPoint> subtract_background(std::span<const SpectrumPoint> data, double center,
                                               double exclusion);

struct NotchFitOptions {
    fit::SimplexOptions simplex{};
};

/// Simplex least-squares fit of s21_notch over (omega_b, kappa_int, kappa_ext, theta).
/// Parameters: resonator_frequency, internal_rate, external_rate, mismatch_phase.
fit::FitResult fit_notch(std::span<const SpectrumPoint> data, const NotchParams& init,
                         const NotchFitOptions& options = {});

NotchParams notch_from_fit(const fit::FitResult& result);

/// Local minima of |S21| deeper than `min_depth` below one, refined by a
/// least-squares parabola over the samples below half depth (at most
/// +-linewidth/2). Dips without a sample below half depth on each side of the
/// minimum are discarded. Minima closer than one linewidth are merged,
/// keeping the deeper.
std::vector<double> extract_minima(std::span<const double> frequencies,
                                   std::span<const double> magnitudes, double linewidth,
                                   double min_depth);

struct CrossingSpectrum {
    double drive_frequency = 0.0;  // omega_d, rad/s
    std::vector<double> minima;    // response minima, rad/s
};

struct CrossingInit {
    double resonator_frequency = 0.0;
    double coupling = 0.0;
    double crossing_drive_frequency = 0.0;  // omega_d where Delta_qb = 0
};

// Branch positions against drive frequency; Delta_q = omega_d - omega_dc - omega_b.
NormalModePair crossing_branches(double drive_frequency, const CrossingInit& p);

// Starting point from the spectrum with the narrowest two-dip splitting: its
// midpoint, half-splitting and drive frequency. Throws DegenerateDataError
// when no spectrum shows two minima.
CrossingInit initial_crossing_guess(std::span<const CrossingSpectrum> spectra);

/// Fits the two normal-mode branches to per-drive response minima; every
/// minimum is compared with the branch it lies closest to.
/// Parameters: resonator_frequency, coupling, crossing_drive_frequency.
fit::FitResult fit_avoided_crossing(std::span<const CrossingSpectrum> spectra, const CrossingInit& init,
                                    const fit::SimplexOptions& options = {});

struct CouplingPoint {
    double photon_number = 0.0;
    double coupling = 0.0;  // g, rad/s
    double sigma = 0.0;     // optional uncertainty of g; 0 = unweighted
};

/// Weighted least squares g = g0 sqrt(n) through the origin. Parameter: g0.
fit::FitResult fit_g0(std::span<const CouplingPoint> points);

}  // namespace ppcqed::spectroscopy
