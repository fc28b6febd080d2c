#include "kernelid/operators.hpp"

#include "kernelid/error.hpp"
#include "kernelid/gp.hpp"
#include "kernelid/parallel.hpp"
#include "kernelid/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

namespace kernelid {

namespace {

std::string fmt(double x) {
    std::ostringstream out;
    out.precision(15);
    out << x;
    return out.str();
}

Eigen::VectorXd scalar_vector(double x) {
    Eigen::VectorXd v(1);
    v(0) = x;
    return v;
}

// sum / integral over [0, H) of g(s) v(s) and of |g(s)|.
template <typename G>
std::pair<Eigen::VectorXd, double> truncated_pairing(const BoundedSignal& v, G g, TimeDomain domain, double horizon,
                                                     std::span<const double> breakpoints) {
    Eigen::VectorXd value = Eigen::VectorXd::Zero(v.dim());
    double l1 = 0.0;
    if (domain == TimeDomain::Discrete) {
        const auto end = static_cast<long long>(std::ceil(horizon));
        for (long long s = 0; s < end; ++s) {
            const double sd = static_cast<double>(s);
            const double gs = g(sd);
            value += gs * v(sd);
            l1 += std::fabs(gs);
        }
        return {value, l1};
    }
    QuadratureOptions options;
    options.abs_tol = 1e-13;
    options.panel_width = 0.5;
    for (Eigen::Index c = 0; c < v.dim(); ++c) {
        value(c) = integrate([&](double s) { return g(s) * v(s)(c); }, 0.0, horizon, options, breakpoints).value;
    }
    l1 = integrate([&](double s) { return std::fabs(g(s)); }, 0.0, horizon, options, breakpoints).value;
    return {value, l1};
}

}  // namespace

BoundedSignal::BoundedSignal(Fn fn, Eigen::Index dim, double sup_norm, double probe_horizon, std::string label)
    : fn_(std::move(fn)), dim_(dim), sup_norm_(sup_norm), probe_horizon_(probe_horizon), label_(std::move(label)) {
    if (!std::isfinite(sup_norm) || sup_norm < 0.0) throw InvalidArgument("sup norm must be finite and >= 0");
    if (dim < 1) throw InvalidArgument("signal dimension must be >= 1");
}

BoundedSignal BoundedSignal::scalar(const Signal& s, TimeDomain domain, double probe_horizon) {
    double sup = 0.0;
    if (s.sup_bound()) {
        sup = *s.sup_bound();
    } else {
        const double step = domain == TimeDomain::Discrete ? 1.0 : 0.05;
        const auto n = static_cast<long long>(std::floor(probe_horizon / step));
        for (long long i = 0; i <= n; ++i) sup = std::max(sup, std::fabs(s(step * static_cast<double>(i))));
    }
    return BoundedSignal([s](double t) { return scalar_vector(s(t)); }, 1, sup, probe_horizon, s.label());
}

Functional Functional::lv(const BoundedSignal& v) { return {v, v.sup_norm(), "L_v[" + v.label() + "]"}; }

Functional Functional::convolution(const BoundedSignal& u, double t) {
    BoundedSignal shifted([u, t](double s) { return u(t - s); }, u.dim(), u.sup_norm(), u.probe_horizon(),
                          u.label() + "(" + fmt(t) + "-s)");
    return {shifted, u.sup_norm(), "L_{u,t}[" + u.label() + ", t=" + fmt(t) + "]"};
}

Functional Functional::fourier(double omega, TimeDomain domain) {
    const bool ok = domain == TimeDomain::Discrete ? (omega >= 0.0 && omega <= std::numbers::pi)
                                                   : (omega >= 0.0 && std::isfinite(omega));
    if (!ok) {
        throw FrequencyOutOfRange("omega = " + fmt(omega) + " outside " +
                                  (domain == TimeDomain::Discrete ? "[0, pi]" : "[0, inf)"));
    }
    BoundedSignal v(
        [omega](double t) {
            Eigen::VectorXd out(2);
            out(0) = std::cos(omega * t);
            out(1) = -std::sin(omega * t);
            return out;
        },
        2, 1.0, std::numeric_limits<double>::infinity(), "e^{-j" + fmt(omega) + "t}");
    return {v, 1.0, "F_" + fmt(omega)};
}

double default_operator_horizon(const RkhsElement& g) {
    const Kernel& k = g.kernel();
    const bool discrete = k.domain() == TimeDomain::Discrete;
    double last = 0.0;
    for (double c : g.centers()) last = std::max(last, c);
    double h = discrete ? 64.0 : 12.5;
    while (h <= last) h *= 2.0;
    const double cap = discrete ? 65536.0 : 3200.0;
    if (!k.envelope()) return std::min(4.0 * h, cap);
    while (h < cap) {
        const double tail = k.envelope()->tail(k.domain(), h);
        if (tail <= 1e-10) break;
        h *= 2.0;
    }
    return std::min(h, cap);
}

Application apply_functional(const Functional& op, const RkhsElement& g, std::optional<double> horizon) {
    const double h = horizon.value_or(default_operator_horizon(g));
    const Kernel& k = g.kernel();
    std::vector<double> breaks(g.centers().begin(), g.centers().end());
    std::sort(breaks.begin(), breaks.end());
    auto [value, l1] = truncated_pairing(op.v, [&g](double s) { return eval_rkhs(g, s); }, k.domain(), h, breaks);
    Application app;
    app.value = std::move(value);
    app.horizon = h;
    app.l1_norm = l1;
    // |g(s)| <= ||g||_H k(s,s)^(1/2)
    if (k.envelope()) {
        const double norm = rkhs_norm(g);
        const double env_tail = h >= k.envelope()->first_valid_horizon(k.domain())
                                    ? k.envelope()->tail(k.domain(), h)
                                    : std::numeric_limits<double>::infinity();
        app.l1_tail = norm * env_tail;
        app.tail_allowance = op.v.sup_norm() * app.l1_tail;
    } else {
        app.l1_tail = std::numeric_limits<double>::infinity();
        app.tail_allowance = std::numeric_limits<double>::infinity();
    }
    return app;
}

Application apply_functional(const Functional& op, const Signal& g, TimeDomain domain, double horizon) {
    auto [value, l1] = truncated_pairing(op.v, [&g](double s) { return g(s); }, domain, horizon, {});
    Application app;
    app.value = std::move(value);
    app.horizon = horizon;
    app.l1_norm = l1;
    if (g.envelope() && horizon >= g.envelope()->first_valid_horizon(domain)) {
        app.l1_tail = g.envelope()->tail(domain, horizon);
    } else {
        app.l1_tail = std::numeric_limits<double>::infinity();
    }
    app.tail_allowance = op.v.sup_norm() * app.l1_tail;
    return app;
}

Application apply_lv(const BoundedSignal& v, const RkhsElement& g, std::optional<double> horizon) {
    return apply_functional(Functional::lv(v), g, horizon);
}

Application convolve(const BoundedSignal& u, double t, const RkhsElement& g, std::optional<double> horizon) {
    return apply_functional(Functional::convolution(u, t), g, horizon);
}

Application fourier(double omega, const RkhsElement& g, std::optional<double> horizon) {
    return apply_functional(Functional::fourier(omega, g.kernel().domain()), g, horizon);
}

OperatorBoundReport verify_continuity_bound(const Kernel& kernel, const Functional& op, std::size_t n_samples,
                                            std::uint64_t seed, const ContinuityOptions& options) {
    const MeasureResult m = dsri_measure(kernel, std::nullopt, options.measure);
    if (!m.certified()) {
        throw InvalidArgument("'" + kernel.label() + "' has no certified finite M(k) (status " +
                              std::string(to_string(m.status)) + ")");
    }
    if (!kernel.envelope()) throw InvalidArgument("'" + kernel.label() + "' carries no envelope for the truncation tail");
    if (options.max_centers < 1) throw InvalidArgument("max_centers must be >= 1");

    OperatorBoundReport report;
    report.operator_label = op.label;
    report.kernel = kernel.label();
    report.l1_norm_bound = op.l1_norm_bound;
    report.m_of_k = m.value;
    report.m_error_bound = m.error_bound;
    report.rkhs_bound = op.l1_norm_bound * m.value;
    report.n_samples = n_samples;
    const double m_upper = m.upper_bound();

    struct Sample {
        double ratio = 0.0;
        double embedding = 0.0;
        bool violated = false;
        bool embedding_violated = false;
        std::string witness;
    };
    std::vector<Sample> samples(n_samples);
    const bool discrete = kernel.domain() == TimeDomain::Discrete;

    parallel_for(n_samples, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            std::mt19937_64 rng(path_seed(seed, i));
            const std::size_t n_centers = 1 + static_cast<std::size_t>(rng() % options.max_centers);
            std::set<double> chosen;
            while (chosen.size() < n_centers) {
                const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
                double c = u * options.center_horizon;
                if (discrete) c = std::floor(u * (std::floor(options.center_horizon) + 1.0));
                chosen.insert(c);
            }
            std::vector<double> centers(chosen.begin(), chosen.end());
            std::vector<double> coeffs = standard_normals(rng(), centers.size());
            RkhsElement raw(kernel, centers, coeffs);
            const double norm = rkhs_norm(raw);
            Sample& s = samples[i];
            if (!(norm > 0.0)) continue;
            const RkhsElement g = raw.scaled(1.0 / norm);
            const Application app = apply_functional(op, g);
            const double magnitude = app.value.norm();
            const double unit_norm = 1.0;  // by construction, up to rounding
            const double slack = 1e-12 * std::max(1.0, m_upper);
            s.ratio = magnitude / unit_norm;
            s.embedding = app.l1_norm / unit_norm;
            if (magnitude > op.l1_norm_bound * m_upper + app.tail_allowance + slack) {
                s.violated = true;
                s.witness = "sample " + std::to_string(i) + ": |L g| = " + fmt(magnitude) + " > " +
                            fmt(op.l1_norm_bound * m_upper) + " (tail allowance " + fmt(app.tail_allowance) +
                            ", horizon " + fmt(app.horizon) + ", centers " + std::to_string(centers.size()) + ")";
            }
            if (app.l1_norm > m_upper + slack) {
                s.embedding_violated = true;
                s.witness += " ||g||_1 = " + fmt(app.l1_norm) + " > M(k) = " + fmt(m_upper);
            }
        }
    });

    std::string first_witness;
    for (const auto& s : samples) {
        report.max_observed_ratio = std::max(report.max_observed_ratio, s.ratio);
        report.max_embedding_ratio = std::max(report.max_embedding_ratio, s.embedding);
        if (s.violated) ++report.violations;
        if (s.embedding_violated) ++report.embedding_violations;
        if ((s.violated || s.embedding_violated) && first_witness.empty()) first_witness = s.witness;
    }
    if (report.violations > 0 || report.embedding_violations > 0) {
        throw BoundViolated(op.label + " on '" + kernel.label() + "': " + std::to_string(report.violations) +
                            " bound and " + std::to_string(report.embedding_violations) +
                            " embedding violations; first " + first_witness);
    }
    return report;
}

}  // namespace kernelid
