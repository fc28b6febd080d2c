#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace kernelid {

struct QuadratureOptions {
    double abs_tol = 1e-10;     // per panel
    double panel_width = 1.0;   // [a, b] is cut into panels no wider than this
    int min_depth = 2;
    int max_depth = 48;
};

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    std::size_t evaluations = 0;
    bool converged = true;
};

// Adaptive Simpson with Richardson correction, run independently on each
// panel. Breakpoints inside (a, b) become panel boundaries, which is where
// kinks and jumps of the integrand should sit.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureOptions& options = {}, std::span<const double> breakpoints = {});

}  // namespace kernelid
