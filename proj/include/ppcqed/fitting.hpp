#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ppcqed::fit {

using Objective = std::function<double(std::span<const double>)>;

struct SimplexOptions {
    int max_iterations = 10000;   // total across restarts
    double x_tolerance = 1e-9;    // simplex diameter, in units of the initial steps
    double f_tolerance = 1e-12;   // relative spread of objective values
    int max_restarts = 6;
    std::uint64_t seed = 0x5eedULL;
};

struct SimplexResult {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
    int restarts = 0;
    bool converged = false;
};

// Nelder-Mead simplex descent. Works in coordinates normalised by `steps`
// (x = x0 + steps * u) and restarts from the best vertex with a freshly
// oriented simplex, drawn from a seeded generator, until a restart no longer
// improves the objective.
SimplexResult minimize_simplex(const Objective& objective, std::span<const double> x0,
                               std::span<const double> steps, const SimplexOptions& options = {});

struct FitParameter {
    std::string name;
    double value = 0.0;
    double uncertainty = 0.0;
};

struct FitResult {
    std::vector<FitParameter> parameters;
    double residual_norm = 0.0;  // sqrt of the sum of squared residuals
    int iterations = 0;
    bool converged = false;
    double gradient_norm = 0.0;  // max |df/du| at the optimum, normalised coordinates

    const FitParameter& parameter(std::string_view name) const;
    double value(std::string_view name) const { return parameter(name).value; }
    double uncertainty(std::string_view name) const { return parameter(name).uncertainty; }
};

struct CurvatureReport {
    std::vector<double> uncertainties;
    double gradient_norm = 0.0;
    double curvature_scale = 0.0;  // largest diagonal Hessian entry
};

// Finite-difference gradient and Hessian of a sum-of-squares objective at x,
// in coordinates scaled by `steps`. Uncertainties follow from the quadratic
// expansion: cov = 2 s^2 H^-1 with s^2 = f / (n_data - n_params).
CurvatureReport curvature(const Objective& objective, std::span<const double> x,
                          std::span<const double> steps, int n_data);

// Assembles a FitResult from a simplex run. `converged` additionally requires
// the normalised gradient to be small against the curvature.
FitResult make_fit_result(const Objective& objective, const SimplexResult& run,
                          std::span<const double> steps, int n_data,
                          const std::vector<std::string>& names);

}  // namespace ppcqed::fit
