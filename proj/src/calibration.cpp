#include "ppcqed/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "ppcqed/errors.hpp"

namespace ppcqed::calibration {

namespace {

double cubic(double n, double d, double a, double e2) {
    const double s = a * n - d;
    return n * s * s - e2;
}

double cubic_slope(double n, double d, double a) {
    const double s = a * n - d;
    return s * s + 2.0 * a * n * s;
}

// Newton polish; keeps the step only while it lowers the residual.
double polish(double n, double d, double a, double e2) {
    for (int i = 0; i < 4; ++i) {
        const double f = cubic(n, d, a, e2);
        const double fp = cubic_slope(n, d, a);
        if (fp == 0.0 || f == 0.0) break;
        const double next = n - f / fp;
        if (!(std::abs(cubic(next, d, a, e2)) < std::abs(f))) break;
        n = next;
    }
    return n;
}

}  // namespace

void StarkCalibration::validate() const {
    if (!(anharmonicity < 0.0)) throw DomainError("Stark calibration requires alpha < 0");
    if (detuning == 0.0 || !std::isfinite(detuning)) throw DomainError("Stark calibration requires Delta_q != 0");
    if (!(sum_frequency > 0.0)) throw DomainError("Stark calibration requires Sigma > 0");
}

double kerr_cubic_residual(double occupation, double detuning, double anharmonicity,
                           double drive_amplitude) {
    return cubic(occupation, detuning, anharmonicity, drive_amplitude * drive_amplitude);
}

KerrSteadyState kerr_steady_state(double detuning, double anharmonicity, double drive_amplitude) {
    if (anharmonicity > 0.0) throw DomainError("kerr_steady_state requires alpha <= 0");
    const double e2 = drive_amplitude * drive_amplitude;
    KerrSteadyState out;
    if (anharmonicity == 0.0) {
        if (detuning == 0.0) {
            if (e2 != 0.0) throw DomainError("resonant linear oscillator has no steady state");
            out.roots = {0.0};
            return out;
        }
        out.occupation = e2 / (detuning * detuning);
        out.roots = {out.occupation};
        return out;
    }

    // Monic form n^3 + c2 n^2 + c1 n + c0.
    const double c2 = -2.0 * detuning / anharmonicity;
    const double c1 = (detuning * detuning) / (anharmonicity * anharmonicity);
    const double c0 = -e2 / (anharmonicity * anharmonicity);
    Eigen::Matrix3d companion = Eigen::Matrix3d::Zero();
    companion(1, 0) = 1.0;
    companion(2, 1) = 1.0;
    companion(0, 2) = -c0;
    companion(1, 2) = -c1;
    companion(2, 2) = -c2;
    const Eigen::Vector3cd eig = Eigen::EigenSolver<Eigen::Matrix3d>(companion, false).eigenvalues();

    std::vector<double> real_roots;
    for (int i = 0; i < 3; ++i) {
        if (std::abs(eig[i].imag()) < 1e-9 * (1.0 + std::abs(eig[i].real()))) {
            real_roots.push_back(eig[i].real());
        }
    }
    if (real_roots.empty()) throw NumericalError("steady-state cubic returned no real root");
    for (double& r : real_roots) {
        r = polish(r, detuning, anharmonicity, e2);
        // The cubic is non-negative on n >= 0 only; tiny negative roots are rounding.
        if (r < 0.0 && r > -1e-14 * (1.0 + std::abs(c2))) r = 0.0;
    }
    std::sort(real_roots.begin(), real_roots.end());
    if (real_roots.front() < 0.0) {
        throw NumericalError("steady-state cubic has a negative real root");
    }
    out.roots = real_roots;
    out.occupation = real_roots.front();
    out.root_multiplicity = real_roots.size() == 1 ? 1 : 3;
    out.bistable = out.root_multiplicity == 3;
    return out;
}

double fold_drive_amplitude(double detuning, double anharmonicity) {
    if (anharmonicity == 0.0 || detuning / anharmonicity <= 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    const double d = std::abs(detuning);
    return std::sqrt(4.0 * d * d * d / (27.0 * std::abs(anharmonicity)));
}

double stark_factor(double detuning, double sum_frequency) {
    if (detuning == 0.0) throw DomainError("Stark shift requires Delta_q != 0");
    if (!(sum_frequency > 0.0)) throw DomainError("Stark shift requires Sigma > 0");
    const double d = std::abs(detuning);
    return 1.0 / (d * d) + 2.0 / (d * sum_frequency) + 1.0 / (sum_frequency * sum_frequency);
}

double ac_stark_shift(double drive_amplitude, double anharmonicity, double detuning,
                      double sum_frequency) {
    return 0.5 * drive_amplitude * drive_amplitude * anharmonicity *
           stark_factor(detuning, sum_frequency);
}

double drive_power_from_stark(const StarkCalibration& cal) {
    cal.validate();
    if (cal.stark_shift == 0.0) return 0.0;
    if (cal.stark_shift / cal.anharmonicity < 0.0) {
        throw DomainError("Stark shift must carry the sign of the anharmonicity");
    }
    return 2.0 * cal.stark_shift / cal.anharmonicity / stark_factor(cal.detuning, cal.sum_frequency);
}

double photon_number_from_stark(const StarkCalibration& cal) {
    const double e2 = drive_power_from_stark(cal);
    if (e2 == 0.0) return 0.0;
    return kerr_steady_state(cal.detuning, cal.anharmonicity, std::sqrt(e2)).occupation;
}

double effective_kerr(double anharmonicity, double g0, double resonator_frequency,
                      double resonator_linewidth) {
    if (!(resonator_frequency > 0.0)) throw DomainError("resonator frequency must be positive");
    return anharmonicity - 2.0 * g0 * g0 * resonator_frequency /
                               (resonator_frequency * resonator_frequency +
                                0.25 * resonator_linewidth * resonator_linewidth);
}

double critical_photon_number(double detuning, double parasitic_coupling) {
    if (!(parasitic_coupling > 0.0)) throw DomainError("parasitic coupling must be positive");
    return detuning * detuning / (4.0 * parasitic_coupling * parasitic_coupling);
}

}  // namespace ppcqed::calibration
