#include "kernelid/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace kernelid {

namespace {

struct Simpson {
    const std::function<double(double)>& f;
    const QuadratureOptions& options;
    QuadratureResult& result;

    double eval(double x) {
        ++result.evaluations;
        return f(x);
    }

    // [a, b] with fa, fm, fb known; whole is the Simpson estimate on [a, b].
    double refine(double a, double b, double fa, double fm, double fb, double whole, double tol, int depth) {
        const double m = 0.5 * (a + b);
        const double lm = 0.5 * (a + m);
        const double rm = 0.5 * (m + b);
        const double flm = eval(lm);
        const double frm = eval(rm);
        const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        const double delta = left + right - whole;
        const bool collapsed = lm <= a || m <= lm || rm <= m || b <= rm;
        if ((depth >= options.min_depth || collapsed) && std::fabs(delta) <= 15.0 * tol) {
            result.error_estimate += std::fabs(delta) / 15.0;
            return left + right + delta / 15.0;
        }
        if (depth >= options.max_depth || collapsed) {
            result.converged = false;
            result.error_estimate += std::fabs(delta);
            return left + right + delta / 15.0;
        }
        return refine(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
               refine(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
    }

    // Endpoints are sampled one ulp inside so a jump sitting on a panel
    // boundary contributes its one-sided limit.
    double panel(double a, double b) {
        const double fa = eval(std::nextafter(a, b));
        const double fb = eval(std::nextafter(b, a));
        const double fm = eval(0.5 * (a + b));
        const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        return refine(a, b, fa, fm, fb, whole, options.abs_tol, 0);
    }
};

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureOptions& options, std::span<const double> breakpoints) {
    QuadratureResult result;
    if (!(b > a)) return result;

    std::vector<double> cuts{a, b};
    for (double x : breakpoints) {
        if (x > a && x < b) cuts.push_back(x);
    }
    if (options.panel_width > 0.0) {
        const double first = std::floor(a / options.panel_width) + 1.0;
        for (double k = first; k * options.panel_width < b; k += 1.0) cuts.push_back(k * options.panel_width);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    Simpson simpson{f, options, result};
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) total += simpson.panel(cuts[i], cuts[i + 1]);
    result.value = total;
    return result;
}

}  // namespace kernelid
