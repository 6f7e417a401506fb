#include "ppcqed/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include <Eigen/Dense>

#include "ppcqed/errors.hpp"

namespace ppcqed::fit {

namespace {

struct Vertex {
    std::vector<double> u;
    double f = 0.0;
};

class ScaledObjective {
public:
    ScaledObjective(const Objective& objective, std::span<const double> x0,
                    std::span<const double> steps)
        : objective_(objective), x0_(x0.begin(), x0.end()), steps_(steps.begin(), steps.end()),
          buffer_(x0.size()) {}

    double operator()(const std::vector<double>& u) {
        for (std::size_t i = 0; i < u.size(); ++i) buffer_[i] = x0_[i] + steps_[i] * u[i];
        const double f = objective_(buffer_);
        return std::isfinite(f) ? f : std::numeric_limits<double>::infinity();
    }

    std::vector<double> to_x(const std::vector<double>& u) const {
        std::vector<double> x(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) x[i] = x0_[i] + steps_[i] * u[i];
        return x;
    }

private:
    const Objective& objective_;
    std::vector<double> x0_;
    std::vector<double> steps_;
    std::vector<double> buffer_;
};

// One Nelder-Mead run from an initial simplex. Returns iterations used and
// whether a tolerance (rather than the budget) stopped it.
std::pair<int, bool> nelder_mead(ScaledObjective& f, std::vector<Vertex>& simplex, int budget,
                                 const SimplexOptions& options) {
    const std::size_t n = simplex.size() - 1;
    auto by_value = [](const Vertex& a, const Vertex& b) { return a.f < b.f; };
    std::vector<double> centroid(n), trial(n), trial2(n);
    int it = 0;
    while (true) {
        std::sort(simplex.begin(), simplex.end(), by_value);
        const Vertex& best = simplex.front();
        double diameter = 0.0;
        double scale = 1.0;
        for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(best.u[i]));
        for (std::size_t v = 1; v <= n; ++v) {
            for (std::size_t i = 0; i < n; ++i) {
                diameter = std::max(diameter, std::abs(simplex[v].u[i] - best.u[i]));
            }
        }
        const double spread = simplex.back().f - best.f;
        if (diameter < options.x_tolerance * scale) return {it, true};
        if (std::isfinite(spread) && spread <= options.f_tolerance * std::abs(best.f)) return {it, true};
        if (it >= budget) return {it, false};
        ++it;

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t v = 0; v < n; ++v) {
            for (std::size_t i = 0; i < n; ++i) centroid[i] += simplex[v].u[i] / static_cast<double>(n);
        }
        Vertex& worst = simplex.back();
        for (std::size_t i = 0; i < n; ++i) trial[i] = centroid[i] + (centroid[i] - worst.u[i]);
        const double f_reflect = f(trial);

        if (f_reflect < simplex.front().f) {
            for (std::size_t i = 0; i < n; ++i) trial2[i] = centroid[i] + 2.0 * (centroid[i] - worst.u[i]);
            const double f_expand = f(trial2);
            if (f_expand < f_reflect) {
                worst.u = trial2;
                worst.f = f_expand;
            } else {
                worst.u = trial;
                worst.f = f_reflect;
            }
            continue;
        }
        if (f_reflect < simplex[n - 1].f) {
            worst.u = trial;
            worst.f = f_reflect;
            continue;
        }
        // Contraction, outside when the reflection beat the worst vertex.
        const bool outside = f_reflect < worst.f;
        for (std::size_t i = 0; i < n; ++i) {
            trial2[i] = outside ? centroid[i] + 0.5 * (trial[i] - centroid[i])
                                : centroid[i] + 0.5 * (worst.u[i] - centroid[i]);
        }
        const double f_contract = f(trial2);
        if (f_contract < std::min(f_reflect, worst.f)) {
            worst.u = trial2;
            worst.f = f_contract;
            continue;
        }
        // Shrink toward the best vertex.
        for (std::size_t v = 1; v <= n; ++v) {
            for (std::size_t i = 0; i < n; ++i) {
                simplex[v].u[i] = simplex[0].u[i] + 0.5 * (simplex[v].u[i] - simplex[0].u[i]);
            }
            simplex[v].f = f(simplex[v].u);
        }
    }
}

std::vector<Vertex> build_simplex(ScaledObjective& f, const std::vector<double>& center,
                                  double size, std::mt19937_64* rng) {
    const std::size_t n = center.size();
    // Axis-aligned on the first run; randomly rotated on restarts.
    Eigen::MatrixXd basis = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n),
                                                      static_cast<Eigen::Index>(n));
    if (rng != nullptr) {
        std::normal_distribution<double> normal(0.0, 1.0);
        Eigen::MatrixXd g(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        for (Eigen::Index i = 0; i < g.rows(); ++i) {
            for (Eigen::Index j = 0; j < g.cols(); ++j) g(i, j) = normal(*rng);
        }
        basis = Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ();
    }
    std::vector<Vertex> simplex(n + 1);
    simplex[0].u = center;
    simplex[0].f = f(center);
    for (std::size_t v = 0; v < n; ++v) {
        simplex[v + 1].u = center;
        for (std::size_t i = 0; i < n; ++i) {
            simplex[v + 1].u[i] += size * basis(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(v));
        }
        simplex[v + 1].f = f(simplex[v + 1].u);
    }
    return simplex;
}

}  // namespace

SimplexResult minimize_simplex(const Objective& objective, std::span<const double> x0,
                               std::span<const double> steps, const SimplexOptions& options) {
    if (x0.empty() || x0.size() != steps.size()) {
        throw std::invalid_argument("minimize_simplex: x0 and steps must have equal, non-zero size");
    }
    for (double s : steps) {
        if (!(s > 0.0) || !std::isfinite(s)) throw std::invalid_argument("simplex steps must be positive");
    }
    ScaledObjective f(objective, x0, steps);
    std::mt19937_64 rng(options.seed);

    const std::size_t n = x0.size();
    std::vector<Vertex> simplex = build_simplex(f, std::vector<double>(n, 0.0), 1.0, nullptr);
    SimplexResult result;
    auto [used, ok] = nelder_mead(f, simplex, options.max_iterations, options);
    result.iterations = used;
    result.converged = ok;
    Vertex best = *std::min_element(simplex.begin(), simplex.end(),
                                    [](const Vertex& a, const Vertex& b) { return a.f < b.f; });

    // Restart until the objective stops improving.
    double restart_size = 0.1;
    while (ok && result.restarts < options.max_restarts && result.iterations < options.max_iterations) {
        simplex = build_simplex(f, best.u, restart_size, &rng);
        std::tie(used, ok) = nelder_mead(f, simplex, options.max_iterations - result.iterations, options);
        result.iterations += used;
        ++result.restarts;
        const Vertex& candidate = *std::min_element(
            simplex.begin(), simplex.end(), [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
        const bool improved = candidate.f < best.f - options.f_tolerance * std::abs(best.f);
        if (candidate.f < best.f) best = candidate;
        result.converged = ok;
        if (!improved) break;
        restart_size = std::max(restart_size * 0.1, 1e-6);
    }
    result.x = f.to_x(best.u);
    result.value = best.f;
    return result;
}

const FitParameter& FitResult::parameter(std::string_view name) const {
    for (const auto& p : parameters) {
        if (p.name == name) return p;
    }
    throw std::out_of_range("no fit parameter named " + std::string(name));
}

CurvatureReport curvature(const Objective& objective, std::span<const double> x,
                          std::span<const double> steps, int n_data) {
    const std::size_t n = x.size();
    std::vector<double> point(x.begin(), x.end());
    auto eval = [&](std::size_t i, double di, std::size_t j, double dj) {
        std::vector<double> p = point;
        p[i] += di * steps[i];
        p[j] += dj * steps[j];
        return objective(p);
    };
    const double f0 = objective(point);

    CurvatureReport report;
    const double hg = 1e-6;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = (eval(i, hg, i, 0.0) - eval(i, -hg, i, 0.0)) / (2.0 * hg);
        report.gradient_norm = std::max(report.gradient_norm, std::abs(d));
    }

    const double h = 1e-3;
    Eigen::MatrixXd hess(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            double value = 0.0;
            if (i == j) {
                value = (eval(i, h, i, 0.0) - 2.0 * f0 + eval(i, -h, i, 0.0)) / (h * h);
            } else {
                value = (eval(i, h, j, h) - eval(i, h, j, -h) - eval(i, -h, j, h) + eval(i, -h, j, -h)) /
                        (4.0 * h * h);
            }
            hess(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = value;
            hess(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = value;
        }
    }
    report.curvature_scale = hess.diagonal().cwiseAbs().maxCoeff();

    report.uncertainties.assign(n, std::numeric_limits<double>::quiet_NaN());
    const int dof = n_data - static_cast<int>(n);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(hess);
    if (dof > 0 && lu.isInvertible()) {
        const double s2 = std::max(f0, 0.0) / dof;
        const Eigen::MatrixXd cov = 2.0 * s2 * lu.inverse();
        for (std::size_t i = 0; i < n; ++i) {
            const double var = cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
            if (var >= 0.0) report.uncertainties[i] = std::sqrt(var) * steps[i];
        }
    }
    return report;
}

FitResult make_fit_result(const Objective& objective, const SimplexResult& run,
                          std::span<const double> steps, int n_data,
                          const std::vector<std::string>& names) {
    FitResult out;
    const CurvatureReport c = curvature(objective, run.x, steps, n_data);
    for (std::size_t i = 0; i < names.size(); ++i) {
        out.parameters.push_back({names[i], run.x[i], c.uncertainties[i]});
    }
    out.residual_norm = std::sqrt(std::max(run.value, 0.0));
    out.iterations = run.iterations;
    out.gradient_norm = c.gradient_norm;
    out.converged = run.converged && c.gradient_norm <= 1e-6 * c.curvature_scale + 1e-300;
    return out;
}

}  // namespace ppcqed::fit
