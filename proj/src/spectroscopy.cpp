#include "ppcqed/spectroscopy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>

#include "ppcqed/constants.hpp"
#include "ppcqed/errors.hpp"

namespace ppcqed::spectroscopy {

namespace {

double wrap_phase(double theta) {
    double w = std::remainder(theta, 2.0 * constants::pi);
    if (w <= -constants::pi) w += 2.0 * constants::pi;
    return w;
}

// Each minimum belongs to the branch it lies closest to.
template <typename Visit>
void assign_branches(const CrossingSpectrum& s, const NormalModePair& modes, Visit&& visit) {
    for (double v : s.minima) visit(v, std::abs(v - modes.upper) < std::abs(v - modes.lower));
}

}  // namespace

void NotchParams::validate() const {
    if (!(resonator_frequency > 0.0)) throw DomainError("notch resonator frequency must be positive");
    if (internal_rate < 0.0 || external_rate < 0.0) throw DomainError("notch decay rates must be non-negative");
    if (!(mismatch_phase > -constants::pi && mismatch_phase <= constants::pi)) {
        throw DomainError("notch mismatch phase must lie in (-pi, pi]");
    }
}

Complex s21_notch(double omega, const NotchParams& p) {
    const Complex denominator(p.total_rate(), 2.0 * (omega - p.resonator_frequency));
    return 1.0 - p.external_rate * std::polar(1.0, p.mismatch_phase) / denominator;
}

NormalModePair normal_mode_frequencies(double resonator_frequency, double qubit_detuning, double g) {
    if (g < 0.0) throw DomainError("coupling must be non-negative");
    const double d_qb = resonator_frequency + qubit_detuning;
    const double half_split = 0.5 * std::sqrt(d_qb * d_qb + 4.0 * g * g);
    const double center = 0.5 * (resonator_frequency - qubit_detuning);
    return {center + half_split, center - half_split};
}

std::pair<double, double> resonator_participation(double resonator_frequency, double qubit_detuning,
                                                  double g) {
    const double d_qb = resonator_frequency + qubit_detuning;
    const double root = std::sqrt(d_qb * d_qb + 4.0 * g * g);
    if (root == 0.0) return {1.0, 0.0};
    const double upper = 0.5 * (d_qb + root) / root;
    return {upper, 1.0 - upper};
}

Complex s21_hybridized(double omega, const HybridLineshape& p) {
    const auto modes = normal_mode_frequencies(p.resonator.resonator_frequency, p.qubit_detuning, p.coupling);
    const auto [w_up, w_lo] =
        resonator_participation(p.resonator.resonator_frequency, p.qubit_detuning, p.coupling);
    const double kappa = p.resonator.total_rate();
    const Complex phase = std::polar(1.0, p.resonator.mismatch_phase);
    Complex s = 1.0;
    for (auto [w, center] : {std::pair{w_up, modes.upper}, std::pair{w_lo, modes.lower}}) {
        if (w <= 0.0) continue;
        const double width = w * kappa + (1.0 - w) * p.qubit_linewidth;
        s -= w * p.resonator.external_rate * phase / Complex(width, 2.0 * (omega - center));
    }
    return s;
}

std::vector<SpectrumPoint> subtract_background(std::span<const SpectrumPoint> data, double center,
                                               double exclusion) {
    std::vector<std::size_t> wings;
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (std::abs(data[i].frequency - center) > exclusion) wings.push_back(i);
    }
    if (wings.size() < 2) throw DegenerateDataError("background fit needs at least two off-resonant points");
    Eigen::MatrixXcd design(static_cast<Eigen::Index>(wings.size()), 2);
    Eigen::VectorXcd rhs(static_cast<Eigen::Index>(wings.size()));
    for (std::size_t r = 0; r < wings.size(); ++r) {
        const auto& p = data[wings[r]];
        design(static_cast<Eigen::Index>(r), 0) = 1.0;
        design(static_cast<Eigen::Index>(r), 1) = p.frequency - center;
        rhs(static_cast<Eigen::Index>(r)) = p.s21;
    }
    const Eigen::VectorXcd c = design.colPivHouseholderQr().solve(rhs);
    std::vector<SpectrumPoint> out(data.begin(), data.end());
    for (auto& p : out) {
        const Complex baseline = c(0) + c(1) * (p.frequency - center);
        if (std::abs(baseline) == 0.0) throw DegenerateDataError("background vanishes inside the data range");
        p.s21 /= baseline;
    }
    return out;
}

fit::FitResult fit_notch(std::span<const SpectrumPoint> data, const NotchParams& init,
                         const NotchFitOptions& options) {
    init.validate();
    if (data.size() < 8) throw DegenerateDataError("notch fit needs at least 8 points");
    const auto [lo, hi] = std::minmax_element(data.begin(), data.end(), [](const auto& a, const auto& b) {
        return a.frequency < b.frequency;
    });
    const double kappa = init.total_rate();
    if (!(kappa > 0.0)) throw DomainError("initial linewidth must be positive");
    if (hi->frequency - lo->frequency < 3.0 * kappa) {
        throw DegenerateDataError("notch data must span at least three linewidths");
    }
    double variation = 0.0;
    for (const auto& p : data) variation = std::max(variation, std::abs(p.s21 - data.front().s21));
    if (variation < 1e-9) throw DegenerateDataError("flat response: no resonance to fit");

    fit::Objective objective = [&](std::span<const double> x) {
        if (x[1] < 0.0 || x[2] < 0.0 || x[1] + x[2] <= 0.0) return std::numeric_limits<double>::infinity();
        const NotchParams p{x[0], x[1], x[2], x[3]};
        double sum = 0.0;
        for (const auto& d : data) sum += std::norm(s21_notch(d.frequency, p) - d.s21);
        return sum;
    };
    const std::vector<double> x0{init.resonator_frequency, init.internal_rate, init.external_rate,
                                 init.mismatch_phase};
    const std::vector<double> steps{0.1 * kappa, 0.1 * std::max(init.internal_rate, 0.1 * kappa),
                                    0.1 * std::max(init.external_rate, 0.1 * kappa), 0.1};
    const auto run = fit::minimize_simplex(objective, x0, steps, options.simplex);
    if (!run.converged) throw ConvergenceError("notch fit did not converge within the iteration cap");
    auto result = fit::make_fit_result(objective, run, steps, static_cast<int>(2 * data.size()),
                                       {"resonator_frequency", "internal_rate", "external_rate",
                                        "mismatch_phase"});
    result.parameters[3].value = wrap_phase(result.parameters[3].value);
    return result;
}

NotchParams notch_from_fit(const fit::FitResult& result) {
    return {result.value("resonator_frequency"), result.value("internal_rate"),
            result.value("external_rate"), result.value("mismatch_phase")};
}

std::vector<double> extract_minima(std::span<const double> frequencies,
                                   std::span<const double> magnitudes, double linewidth,
                                   double min_depth) {
    const std::size_t n = frequencies.size();
    if (n != magnitudes.size()) throw DimensionError("frequency and magnitude arrays differ in length");
    if (!(linewidth > 0.0)) throw DomainError("linewidth must be positive");

    struct Candidate {
        double frequency;
        double depth_value;
    };
    std::vector<Candidate> found;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double m = magnitudes[i];
        if (!(m <= magnitudes[i - 1] && m < magnitudes[i + 1])) continue;
        if (1.0 - m < min_depth) continue;

        // Window where the dip is deeper than half its depth below one.
        const double half = 1.0 - 0.5 * (1.0 - m);
        std::size_t a = i;
        std::size_t b = i;
        while (a > 0 && magnitudes[a - 1] < half && frequencies[i] - frequencies[a - 1] < 0.5 * linewidth) --a;
        while (b + 1 < n && magnitudes[b + 1] < half && frequencies[b + 1] - frequencies[i] < 0.5 * linewidth) ++b;
        // A real dip is resolved by the grid; single-sample dips are noise.
        if (a == i || b == i) continue;
        Eigen::MatrixXd design(static_cast<Eigen::Index>(b - a + 1), 3);
        Eigen::VectorXd rhs(static_cast<Eigen::Index>(b - a + 1));
        const double scale = std::max(frequencies[b] - frequencies[a], 1e-300);
        for (std::size_t k = a; k <= b; ++k) {
            const double x = (frequencies[k] - frequencies[i]) / scale;
            design(static_cast<Eigen::Index>(k - a), 0) = 1.0;
            design(static_cast<Eigen::Index>(k - a), 1) = x;
            design(static_cast<Eigen::Index>(k - a), 2) = x * x;
            rhs(static_cast<Eigen::Index>(k - a)) = magnitudes[k];
        }
        const Eigen::Vector3d c = design.colPivHouseholderQr().solve(rhs);
        double f = frequencies[i];
        if (c(2) > 0.0) {
            const double x = std::clamp(-c(1) / (2.0 * c(2)), (frequencies[a] - frequencies[i]) / scale,
                                        (frequencies[b] - frequencies[i]) / scale);
            f = frequencies[i] + x * scale;
        }
        found.push_back({f, m});
    }

    std::sort(found.begin(), found.end(), [](const auto& x, const auto& y) { return x.frequency < y.frequency; });
    std::vector<Candidate> merged;
    for (const auto& c : found) {
        if (!merged.empty() && c.frequency - merged.back().frequency < linewidth) {
            if (c.depth_value < merged.back().depth_value) merged.back() = c;
            continue;
        }
        merged.push_back(c);
    }
    std::vector<double> out;
    out.reserve(merged.size());
    for (const auto& c : merged) out.push_back(c.frequency);
    return out;
}

NormalModePair crossing_branches(double drive_frequency, const CrossingInit& p) {
    const double qubit_detuning = drive_frequency - p.crossing_drive_frequency - p.resonator_frequency;
    return normal_mode_frequencies(p.resonator_frequency, qubit_detuning, std::abs(p.coupling));
}

CrossingInit initial_crossing_guess(std::span<const CrossingSpectrum> spectra) {
    double best_split = 0.0;
    CrossingInit guess;
    for (const auto& s : spectra) {
        if (s.minima.size() < 2) continue;
        const auto [lo, hi] = std::minmax_element(s.minima.begin(), s.minima.end());
        const double split = *hi - *lo;
        if (split > 0.0 && (best_split == 0.0 || split < best_split)) {
            best_split = split;
            guess = {0.5 * (*hi + *lo), 0.5 * split, s.drive_frequency};
        }
    }
    if (best_split == 0.0) throw DegenerateDataError("no drive frequency shows both normal modes");
    return guess;
}

fit::FitResult fit_avoided_crossing(std::span<const CrossingSpectrum> spectra, const CrossingInit& init,
                                    const fit::SimplexOptions& options) {
    if (!(init.coupling > 0.0)) throw DomainError("initial coupling must be positive");
    int upper_count = 0;
    int lower_count = 0;
    int n_data = 0;
    for (const auto& s : spectra) {
        assign_branches(s, crossing_branches(s.drive_frequency, init), [&](double, bool upper) {
            (upper ? upper_count : lower_count)++;
            ++n_data;
        });
    }
    if (upper_count == 0 || lower_count == 0) {
        throw DegenerateDataError("avoided-crossing fit needs minima on both branches");
    }
    if (n_data < 4) throw DegenerateDataError("avoided-crossing fit needs at least 4 minima");

    fit::Objective objective = [&](std::span<const double> x) {
        const CrossingInit p{x[0], x[1], x[2]};
        double sum = 0.0;
        for (const auto& s : spectra) {
            const auto modes = crossing_branches(s.drive_frequency, p);
            assign_branches(s, modes, [&](double v, bool upper) {
                const double r = v - (upper ? modes.upper : modes.lower);
                sum += r * r;
            });
        }
        return sum;
    };
    const std::vector<double> x0{init.resonator_frequency, init.coupling, init.crossing_drive_frequency};
    const double step = 0.05 * init.coupling;
    const std::vector<double> steps{step, step, step};
    const auto run = fit::minimize_simplex(objective, x0, steps, options);
    if (!run.converged) throw ConvergenceError("avoided-crossing fit did not converge");
    auto result = fit::make_fit_result(objective, run, steps, n_data,
                                       {"resonator_frequency", "coupling", "crossing_drive_frequency"});
    result.parameters[1].value = std::abs(result.parameters[1].value);
    return result;
}

fit::FitResult fit_g0(std::span<const CouplingPoint> points) {
    if (points.size() < 2) throw DegenerateDataError("g0 fit needs at least two points");
    const bool weighted = std::all_of(points.begin(), points.end(), [](const auto& p) { return p.sigma > 0.0; });
    bool all_equal = true;
    for (const auto& p : points) {
        if (!(p.photon_number > 0.0)) throw DomainError("photon numbers must be positive");
        if (p.photon_number != points.front().photon_number) all_equal = false;
    }
    if (all_equal) throw DegenerateDataError("g0 fit needs distinct photon numbers");

    double sxx = 0.0;
    double sxy = 0.0;
    for (const auto& p : points) {
        const double w = weighted ? 1.0 / (p.sigma * p.sigma) : 1.0;
        const double x = std::sqrt(p.photon_number);
        sxx += w * x * x;
        sxy += w * x * p.coupling;
    }
    const double g0 = sxy / sxx;
    double chi2 = 0.0;
    for (const auto& p : points) {
        const double w = weighted ? 1.0 / (p.sigma * p.sigma) : 1.0;
        const double r = p.coupling - g0 * std::sqrt(p.photon_number);
        chi2 += w * r * r;
    }
    const double s2 = chi2 / static_cast<double>(points.size() - 1);

    fit::FitResult out;
    out.parameters.push_back({"g0", g0, std::sqrt(s2 / sxx)});
    out.residual_norm = std::sqrt(chi2);
    out.iterations = 1;
    out.converged = true;
    return out;
}

}  // namespace ppcqed::spectroscopy
