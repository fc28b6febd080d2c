#include "kernelid/dsri.hpp"

#include "kernelid/error.hpp"
#include "kernelid/parallel.hpp"
#include "kernelid/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace kernelid {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double x) {
    std::ostringstream out;
    out.precision(12);
    out << x;
    return out.str();
}

// Neumaier's variant of Kahan summation.
struct CompensatedSum {
    double sum = 0.0;
    double comp = 0.0;
    void add(double x) {
        const double t = sum + x;
        if (std::fabs(sum) >= std::fabs(x)) {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    double value() const { return sum + comp; }
};

double checked(double value, const Kernel& k, double s, double t) {
    if (!std::isfinite(value)) {
        throw NonFiniteEntry("'" + k.label() + "' at (" + fmt(s) + ", " + fmt(t) + ") = " + fmt(value));
    }
    return value;
}

double diag_power(const Kernel& k, double t, double q) {
    const double d = std::max(0.0, checked(k.diagonal(t), k, t, t));
    if (q == 1.0) return std::sqrt(d);
    if (q == 2.0) return d;
    return std::pow(d, q / 2.0);
}

double abs_power(double x, double p) {
    const double a = std::fabs(x);
    return p == 1.0 ? a : p == 2.0 ? a * a : std::pow(a, p);
}

std::optional<TailEnvelope> resolve(const Kernel& k, const std::optional<TailEnvelope>& given) {
    if (given) return given->present() ? given : std::nullopt;
    if (k.envelope() && k.envelope()->present()) return k.envelope();
    return std::nullopt;
}

QuadratureOptions quad_options(double tol) {
    QuadratureOptions q;
    q.abs_tol = tol;
    q.panel_width = 0.5;
    return q;
}

MeasureMethod tail_method(TimeDomain domain) {
    return domain == TimeDomain::Discrete ? MeasureMethod::SeriesWithTail : MeasureMethod::QuadratureWithTail;
}

double start_horizon(TimeDomain domain, const MeasureOptions& o) {
    return domain == TimeDomain::Discrete ? o.discrete_start : o.continuous_start;
}

double max_horizon(TimeDomain domain, const MeasureOptions& o) {
    return domain == TimeDomain::Discrete ? o.discrete_max : o.continuous_max;
}

// Running sum (or integral) of k(t,t)^(q/2) over [0, T).
class SingleAccumulator {
public:
    SingleAccumulator(const Kernel& k, double q, double quad_tol) : k_(k), q_(q), quad_tol_(quad_tol) {}

    void extend_to(double horizon) {
        if (horizon <= horizon_) return;
        if (k_.domain() == TimeDomain::Discrete) {
            const auto end = static_cast<long long>(std::ceil(horizon));
            for (auto t = static_cast<long long>(horizon_); t < end; ++t) sum_.add(diag_power(k_, static_cast<double>(t), q_));
        } else {
            const auto r = integrate([this](double t) { return diag_power(k_, t, q_); }, horizon_, horizon,
                                     quad_options(quad_tol_));
            if (!r.converged) throw QuadratureFailure("diagonal of '" + k_.label() + "' on [" + fmt(horizon_) + ", " + fmt(horizon) + "]");
            sum_.add(r.value);
            quad_error_ += r.error_estimate;
        }
        horizon_ = horizon;
    }

    double value() const { return sum_.value(); }
    double rounding() const { return quad_error_ + 4.0 * kEps * std::fabs(sum_.value()); }

private:
    const Kernel& k_;
    double q_;
    double quad_tol_;
    double horizon_ = 0.0;
    CompensatedSum sum_;
    double quad_error_ = 0.0;
};

// Running double sum (or integral) of |k(s,t)|^p over [0, T)^2, optionally
// restricted to a band |s - t| <= band.
class DoubleAccumulator {
public:
    DoubleAccumulator(const Kernel& k, double p, std::optional<double> band, double quad_tol)
        : k_(k), p_(p), band_(band), quad_tol_(quad_tol) {}

    void extend_to(double horizon) {
        if (horizon <= horizon_) return;
        if (k_.domain() == TimeDomain::Discrete) {
            extend_discrete(static_cast<std::size_t>(std::ceil(horizon)));
        } else {
            extend_continuous(horizon);
        }
        horizon_ = horizon;
    }

    double value() const { return sum_.value(); }
    double rounding() const { return quad_error_ + 4.0 * kEps * std::fabs(sum_.value()); }

private:
    void extend_discrete(std::size_t end) {
        const auto begin = static_cast<std::size_t>(horizon_);
        std::vector<double> rows(end - begin, 0.0);
        const long long b = band_ ? static_cast<long long>(std::floor(*band_)) : -1;
        parallel_for(end - begin, [&](std::size_t lo, std::size_t hi) {
            for (std::size_t i = lo; i < hi; ++i) {
                const auto s = static_cast<long long>(begin + i);
                const double sd = static_cast<double>(s);
                CompensatedSum row;
                const long long t_start = b >= 0 ? std::max(0LL, s - b) : 0LL;
                for (long long t = t_start; t < s; ++t) {
                    const double td = static_cast<double>(t);
                    row.add(2.0 * abs_power(checked(k_(sd, td), k_, sd, td), p_));
                }
                row.add(abs_power(checked(k_(sd, sd), k_, sd, sd), p_));
                rows[i] = row.value();
            }
        });
        for (double r : rows) sum_.add(r);
    }

    void extend_continuous(double horizon) {
        if (band_ && *band_ == 0.0) return;  // a zero-width band has no area
        const double inner_tol = quad_tol_ * 1e-2;
        double inner_error = 0.0;
        auto inner = [&](double s) {
            const double lo = band_ ? std::max(0.0, s - *band_) : 0.0;
            if (s <= lo) return 0.0;
            const auto r = integrate([this, s](double t) { return abs_power(checked(k_(s, t), k_, s, t), p_); }, lo, s,
                                     quad_options(inner_tol));
            if (!r.converged) throw QuadratureFailure("inner integral of '" + k_.label() + "' at s = " + fmt(s));
            inner_error = std::max(inner_error, r.error_estimate);
            return 2.0 * r.value;
        };
        const auto r = integrate(inner, horizon_, horizon, quad_options(quad_tol_));
        if (!r.converged) throw QuadratureFailure("outer integral of '" + k_.label() + "'");
        sum_.add(r.value);
        quad_error_ += r.error_estimate + 2.0 * inner_error * (horizon - horizon_);
    }

    const Kernel& k_;
    double p_;
    std::optional<double> band_;
    double quad_tol_;
    double horizon_ = 0.0;
    CompensatedSum sum_;
    double quad_error_ = 0.0;
};

MeasureResult closed_form_result(const Kernel& k, const std::optional<TailEnvelope>& env) {
    MeasureResult r;
    r.status = MeasureStatus::Finite;
    r.method = MeasureMethod::ClosedForm;
    r.value = *k.closed_form_measure();
    r.error_bound = 4.0 * kEps * std::fabs(r.value);
    r.envelope_used = env;
    return r;
}

template <typename Accumulator, typename TailFn>
MeasureResult run_with_tail(const Kernel& k, Accumulator& acc, double start, double max, TailFn tail_at,
                            const MeasureOptions& o) {
    MeasureResult r;
    double horizon = start;
    double tail = kInf;
    while (true) {
        acc.extend_to(horizon);
        tail = tail_at(horizon);
        r.partial_sum_trace.push_back({horizon, acc.value(), tail});
        if (tail <= o.tol || horizon >= max) break;
        horizon = std::min(2.0 * horizon, max);
    }
    if (!std::isfinite(tail)) throw InternalAssertion("tail bound not finite at horizon " + fmt(horizon));
    r.status = MeasureStatus::Finite;
    r.method = tail_method(k.domain());
    // The true value lies in [partial, partial + tail]; report the midpoint.
    r.value = acc.value() + 0.5 * tail;
    r.error_bound = 0.5 * tail + acc.rounding();
    return r;
}

// Doubling test used when no summable envelope is available.
template <typename Accumulator>
bool grows_every_doubling(Accumulator& acc, double start, double max, const MeasureOptions& o, MeasureResult& r) {
    double horizon = start;
    acc.extend_to(horizon);
    r.partial_sum_trace.push_back({horizon, acc.value(), kInf});
    bool growing = true;
    while (horizon < max) {
        const double previous = acc.value();
        horizon = std::min(2.0 * horizon, max);
        acc.extend_to(horizon);
        r.partial_sum_trace.push_back({horizon, acc.value(), kInf});
        if (!(acc.value() - previous > o.divergence_epsilon)) growing = false;
    }
    return growing;
}

MeasureResult single_measure(const Kernel& k, double q, const std::optional<TailEnvelope>& given,
                             const MeasureOptions& o) {
    const auto env = resolve(k, given);
    const TimeDomain domain = k.domain();
    if (q == 1.0 && o.allow_closed_form && k.closed_form_measure()) return closed_form_result(k, env);

    SingleAccumulator acc(k, q, o.tol);
    if (env) {
        const TailEnvelope raised = env->raised(q);
        if (raised.summable(domain)) {
            if (o.verify_envelope) verify_envelope(k, *env, q);
            const double start = std::max(start_horizon(domain, o), raised.first_valid_horizon(domain));
            auto r = run_with_tail(k, acc, start, std::max(start, max_horizon(domain, o)),
                                   [&](double h) { return raised.tail(domain, h); }, o);
            r.envelope_used = env;
            if (!env->certified) r.method = MeasureMethod::Heuristic;
            return r;
        }
    }

    MeasureResult r;
    const double max = max_horizon(domain, o);
    if (grows_every_doubling(acc, start_horizon(domain, o), max, o, r)) {
        r.status = MeasureStatus::Divergent;
        r.value = acc.value();
        r.error_bound = kInf;
        r.note = "partial sums grew by more than " + fmt(o.divergence_epsilon) + " on every doubling up to " + fmt(max);
        return r;
    }
    if (auto fitted = fit_envelope(k, max)) {
        const TailEnvelope raised = fitted->raised(q);
        if (raised.summable(domain)) {
            const double tail = raised.tail(domain, max);
            if (std::isfinite(tail)) {
                r.status = MeasureStatus::Finite;
                r.method = MeasureMethod::Heuristic;
                r.value = acc.value() + 0.5 * tail;
                r.error_bound = 0.5 * tail + acc.rounding();
                r.envelope_used = fitted;
                r.partial_sum_trace.back().tail_bound = tail;
                r.note = "tail from a fitted envelope; not a certified bound";
                return r;
            }
        }
    }
    r.status = MeasureStatus::Unknown;
    r.value = acc.value();
    r.error_bound = kInf;
    r.note = "no summable envelope and no divergence evidence";
    return r;
}

MeasureResult double_measure(const Kernel& k, double p, const std::optional<TailEnvelope>& given,
                             const MeasureOptions& o) {
    const auto env = resolve(k, given);
    const TimeDomain domain = k.domain();
    const auto band = k.band();
    double max = o.continuous_max;
    if (domain == TimeDomain::Discrete) {
        max = band ? o.discrete_max : std::min(o.discrete_max, static_cast<double>(o.double_sum_cap));
    }

    if (env) {
        if (band) {
            // Pairs with max(s,t) >= T inside the band have min(s,t) >= T - b,
            // and |k(s,t)|^p <= env(min)^(2p) by Cauchy-Schwarz.
            const TailEnvelope raised = env->raised(2.0 * p);
            if (raised.summable(domain)) {
                if (o.verify_envelope) verify_envelope(k, *env, 1.0);
                const double b = domain == TimeDomain::Discrete ? std::floor(*band) : *band;
                const double multiplicity = domain == TimeDomain::Discrete ? 2.0 * b + 1.0 : 2.0 * b;
                DoubleAccumulator acc(k, p, band, o.tol);
                const double start = std::max(start_horizon(domain, o), raised.first_valid_horizon(domain) + b);
                auto r = run_with_tail(k, acc, start, std::max(start, max),
                                       [&](double h) {
                                           return multiplicity == 0.0 ? 0.0 : multiplicity * raised.tail(domain, h - b);
                                       },
                                       o);
                r.envelope_used = env;
                if (!env->certified) r.method = MeasureMethod::Heuristic;
                return r;
            }
        }
        const TailEnvelope raised = env->raised(p);
        if (raised.summable(domain)) {
            if (o.verify_envelope) verify_envelope(k, *env, 1.0);
            // Rectangle bound: sum over max(s,t) >= T of d(s)^p d(t)^p = 2 P tau + tau^2.
            SingleAccumulator diag(k, p, o.tol);
            DoubleAccumulator acc(k, p, band, o.tol);
            const double start = std::max(start_horizon(domain, o), raised.first_valid_horizon(domain));
            auto r = run_with_tail(k, acc, start, std::max(start, max),
                                   [&](double h) {
                                       diag.extend_to(h);
                                       const double big_p = diag.value() + diag.rounding();
                                       const double tau = raised.tail(domain, h);
                                       return 2.0 * big_p * tau + tau * tau;
                                   },
                                   o);
            r.envelope_used = env;
            if (!env->certified) r.method = MeasureMethod::Heuristic;
            return r;
        }
    }

    MeasureResult r;
    DoubleAccumulator acc(k, p, band, o.tol);
    if (grows_every_doubling(acc, start_horizon(domain, o), max, o, r)) {
        r.status = MeasureStatus::Divergent;
        r.value = acc.value();
        r.error_bound = kInf;
        r.note = "partial double sums grew by more than " + fmt(o.divergence_epsilon) + " on every doubling up to " +
                 fmt(max);
        return r;
    }
    if (auto fitted = fit_envelope(k, max)) {
        const TailEnvelope raised = fitted->raised(p);
        if (raised.summable(domain)) {
            SingleAccumulator diag(k, p, o.tol);
            diag.extend_to(max);
            const double tau = raised.tail(domain, max);
            const double tail = 2.0 * diag.value() * tau + tau * tau;
            if (std::isfinite(tail)) {
                r.status = MeasureStatus::Finite;
                r.method = MeasureMethod::Heuristic;
                r.value = acc.value() + 0.5 * tail;
                r.error_bound = 0.5 * tail + acc.rounding();
                r.envelope_used = fitted;
                r.partial_sum_trace.back().tail_bound = tail;
                r.note = "tail from a fitted envelope; not a certified bound";
                return r;
            }
        }
    }
    r.status = MeasureStatus::Unknown;
    r.value = acc.value();
    r.error_bound = kInf;
    r.note = "no summable envelope and no divergence evidence";
    return r;
}

std::vector<double> envelope_probe_points(TimeDomain domain, double onset) {
    std::vector<double> points;
    if (domain == TimeDomain::Discrete) {
        const double first = std::ceil(onset);
        for (int i = 0; i < 100; ++i) points.push_back(first + i);
        for (int i = 0; i < 100; ++i) points.push_back(std::round(first + std::pow(4096.0, (i + 1) / 100.0)));
    } else {
        for (int i = 0; i < 100; ++i) points.push_back(onset + 0.37 * i);
        for (int i = 0; i < 100; ++i) points.push_back(onset + std::pow(200.0, (i + 1) / 100.0));
    }
    return points;
}

}  // namespace

std::string_view to_string(MeasureStatus status) {
    switch (status) {
        case MeasureStatus::Finite: return "finite";
        case MeasureStatus::Divergent: return "divergent";
        case MeasureStatus::Unknown: return "unknown";
    }
    return "unknown";
}

std::string_view to_string(MeasureMethod method) {
    switch (method) {
        case MeasureMethod::ClosedForm: return "closed_form";
        case MeasureMethod::SeriesWithTail: return "series_with_tail";
        case MeasureMethod::QuadratureWithTail: return "quadrature_with_tail";
        case MeasureMethod::Heuristic: return "heuristic";
    }
    return "heuristic";
}

std::string_view to_string(ProbeVerdict verdict) {
    return verdict == ProbeVerdict::ConsistentWithStable ? "consistent_with_stable" : "probe_diverged";
}

std::string_view to_string(FlagState state) {
    switch (state) {
        case FlagState::Yes: return "yes";
        case FlagState::No: return "no";
        case FlagState::Unknown: return "unknown";
    }
    return "unknown";
}

void verify_envelope(const Kernel& k, const TailEnvelope& envelope, double q) {
    if (!envelope.present()) return;
    for (double t : envelope_probe_points(k.domain(), envelope.onset)) {
        const double profile = diag_power(k, t, 1.0);
        const double bound = envelope(t);
        // A subnormal diagonal has lost its relative precision; its root is
        // below 1.5e-154 and cannot move any measure we report.
        if (profile * profile < std::numeric_limits<double>::min()) continue;
        if (profile > bound * (1.0 + 1e-9) + 1e-300) {
            throw EnvelopeRejected("k(t,t)^(" + fmt(q / 2.0) + ") of '" + k.label() + "' exceeds the envelope at t = " +
                                   fmt(t) + ": diagonal root " + fmt(profile) + " > " + fmt(bound));
        }
    }
}

std::optional<TailEnvelope> fit_envelope(const Kernel& k, double horizon) {
    const bool discrete = k.domain() == TimeDomain::Discrete;
    const double lo = discrete ? std::max(2.0, std::ceil(horizon / 10.0)) : std::max(1.0, horizon / 10.0);
    const double hi = discrete ? std::floor(horizon) - 1.0 : horizon;
    if (!(hi > lo)) return std::nullopt;
    std::vector<double> ts;
    std::vector<double> fs;
    for (int i = 0; i < 200; ++i) {
        double t = lo + (hi - lo) * i / 199.0;
        if (discrete) t = std::round(t);
        if (!ts.empty() && t == ts.back()) continue;
        ts.push_back(t);
        fs.push_back(diag_power(k, t, 1.0));
    }
    if (std::all_of(fs.begin(), fs.end(), [](double f) { return f == 0.0; })) {
        TailEnvelope env = TailEnvelope::geometric(0.0, 0.5, lo);
        env.certified = false;
        return env;
    }
    if (std::any_of(fs.begin(), fs.end(), [](double f) { return !(f > 0.0); })) return std::nullopt;

    // Least squares y = a + b x for both candidate shapes.
    auto fit = [&](auto transform) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double n = static_cast<double>(ts.size());
        for (std::size_t i = 0; i < ts.size(); ++i) {
            const double x = transform(ts[i]);
            const double y = std::log(fs[i]);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        const double intercept = (sy - slope * sx) / n;
        double sse = 0.0;
        for (std::size_t i = 0; i < ts.size(); ++i) {
            const double e = std::log(fs[i]) - intercept - slope * transform(ts[i]);
            sse += e * e;
        }
        return std::pair{slope, sse};
    };
    const auto [geo_slope, geo_sse] = fit([](double t) { return t; });
    const auto [pow_slope, pow_sse] = fit([](double t) { return std::log(t); });

    TailEnvelope env;
    if (geo_sse <= pow_sse && geo_slope < 0.0) {
        env = TailEnvelope::geometric(1.0, std::exp(geo_slope), lo);
    } else if (pow_slope < 0.0) {
        env = TailEnvelope::power_law(1.0, -pow_slope, lo);
    } else {
        return std::nullopt;
    }
    double scale = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) scale = std::max(scale, fs[i] / env(ts[i]));
    env.scale = scale;
    env.certified = false;
    if (!std::isfinite(scale)) return std::nullopt;
    return env;
}

MeasureResult dsri_measure(const Kernel& k, std::optional<TailEnvelope> envelope, const MeasureOptions& options) {
    return single_measure(k, 1.0, envelope, options);
}

MeasureResult finite_trace_measure(const Kernel& k, std::optional<TailEnvelope> envelope,
                                   const MeasureOptions& options) {
    return single_measure(k, 2.0, envelope, options);
}

MeasureResult integrability_measure(const Kernel& k, std::optional<TailEnvelope> envelope,
                                    const MeasureOptions& options) {
    return double_measure(k, 1.0, envelope, options);
}

MeasureResult square_integrability_measure(const Kernel& k, std::optional<TailEnvelope> envelope,
                                           const MeasureOptions& options) {
    return double_measure(k, 2.0, envelope, options);
}

double dsri_partial_sum(const Kernel& k, double horizon) {
    SingleAccumulator acc(k, 1.0, 1e-12);
    acc.extend_to(horizon);
    return acc.value();
}

double double_partial_sum(const Kernel& k, std::size_t horizon, double p) {
    if (k.domain() != TimeDomain::Discrete) throw DomainMismatch("double_partial_sum is defined on the discrete domain");
    DoubleAccumulator acc(k, p, std::nullopt, 1e-10);
    acc.extend_to(static_cast<double>(horizon));
    return acc.value();
}

ProbeResult stability_probe(const Kernel& k, const ProbeOptions& options) {
    const bool discrete = k.domain() == TimeDomain::Discrete;
    const double step = discrete ? 1.0 : options.continuous_step;
    const std::size_t n = options.max_points;
    if (n < 2 || options.start_points < 2 || options.start_points > n) {
        throw InvalidArgument("probe needs 2 <= start_points <= max_points");
    }

    Eigen::MatrixXd gram(n, n);
    parallel_for(n, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            for (std::size_t j = 0; j <= i; ++j) {
                const double s = step * static_cast<double>(i);
                const double t = step * static_cast<double>(j);
                gram(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = checked(k(s, t), k, s, t);
            }
        }
    });
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            gram(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                gram(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i));
        }
    }

    std::vector<std::pair<std::string, Eigen::VectorXd>> inputs;
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n));
    Eigen::VectorXd alternating(n);
    Eigen::VectorXd random(n);
    std::mt19937_64 rng(options.seed);
    for (std::size_t i = 0; i < n; ++i) {
        // (-1)^floor(t) so the continuous input alternates on unit intervals.
        const auto whole = static_cast<long long>(std::floor(step * static_cast<double>(i) + 1e-9));
        alternating(static_cast<Eigen::Index>(i)) = whole % 2 == 0 ? 1.0 : -1.0;
        random(static_cast<Eigen::Index>(i)) = (rng() >> 63) ? 1.0 : -1.0;
    }
    inputs.emplace_back("constant", ones);
    inputs.emplace_back("alternating", alternating);
    inputs.emplace_back("random_sign(seed=" + std::to_string(options.seed) + ")", random);

    ProbeResult result;
    for (const auto& [name, u] : inputs) {
        ProbeTrace trace;
        trace.input = name;
        for (std::size_t points = options.start_points; points <= n; points *= 2) {
            const auto m = static_cast<Eigen::Index>(points);
            Eigen::VectorXd w = Eigen::VectorXd::Constant(m, step);
            if (!discrete) {
                w(0) *= 0.5;
                w(m - 1) *= 0.5;
            }
            const Eigen::VectorXd response = gram.topLeftCorner(m, m) * u.head(m).cwiseProduct(w);
            const double l1 = response.cwiseAbs().dot(w);
            trace.trace.push_back({step * static_cast<double>(points), l1, kInf});
            if (points * 2 > n) break;
        }
        const double last = trace.trace.back().partial;
        const double previous = trace.trace.size() > 1 ? trace.trace[trace.trace.size() - 2].partial : 0.0;
        trace.relative_increment = last > 1e-300 ? std::fabs(last - previous) / last : 0.0;
        if (trace.relative_increment > options.relative_tolerance && result.verdict == ProbeVerdict::ConsistentWithStable) {
            result.verdict = ProbeVerdict::ProbeDiverged;
            result.witness = name;
        }
        result.inputs.push_back(std::move(trace));
    }
    return result;
}

namespace {

ClassFlag to_flag(MeasureResult m) {
    ClassFlag flag;
    if (m.certified()) {
        flag.state = FlagState::Yes;
        flag.bound = m.upper_bound();
    } else if (m.status == MeasureStatus::Divergent) {
        flag.state = FlagState::No;
    }
    flag.measure = std::move(m);
    return flag;
}

}  // namespace

void check_chain(const ClassReport& report) {
    auto fail = [&](const std::string& what) {
        throw ChainViolation("'" + report.kernel + "': " + what);
    };
    if (report.dsri.state == FlagState::Yes) {
        if (report.integrable.state == FlagState::No) fail("DSRI but not integrable");
        if (report.finite_trace.state == FlagState::No) fail("DSRI but not finite-trace");
        if (report.square_integrable.state == FlagState::No) fail("DSRI but not squared integrable");
    }
    if (report.integrable.state == FlagState::Yes) {
        if (report.finite_trace.state == FlagState::No) fail("integrable but not finite-trace");
        if (report.square_integrable.state == FlagState::No) fail("integrable but not squared integrable");
    }
    if (report.finite_trace.state == FlagState::Yes && report.square_integrable.state == FlagState::No) {
        fail("finite-trace but not squared integrable");
    }
}

ClassReport classify(const Kernel& k, std::optional<TailEnvelope> envelope, const MeasureOptions& options,
                     const ProbeOptions& probe) {
    ClassReport report;
    report.kernel = k.label();
    report.dsri = to_flag(dsri_measure(k, envelope, options));
    report.integrable = to_flag(integrability_measure(k, envelope, options));
    report.finite_trace = to_flag(finite_trace_measure(k, envelope, options));
    report.square_integrable = to_flag(square_integrability_measure(k, envelope, options));
    report.stable_probe = stability_probe(k, probe);
    check_chain(report);
    return report;
}

}  // namespace kernelid
