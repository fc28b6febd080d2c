#include "kernelid/algebra.hpp"

#include "kernelid/error.hpp"
#include "kernelid/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace kernelid {

namespace {

std::string fmt(double x) {
    std::ostringstream out;
    out.precision(10);
    out << x;
    return out.str();
}

void require_same_domain(const Kernel& k, const Kernel& h) {
    if (k.domain() != h.domain()) {
        throw DomainMismatch("'" + k.label() + "' is " + std::string(to_string(k.domain())) + " but '" + h.label() +
                             "' is " + std::string(to_string(h.domain())));
    }
}

double default_horizon(TimeDomain domain) { return domain == TimeDomain::Discrete ? 2048.0 : 200.0; }

std::vector<double> probe_points(TimeDomain domain, double horizon) {
    std::vector<double> points;
    if (domain == TimeDomain::Discrete) {
        const auto n = static_cast<std::size_t>(std::floor(horizon));
        for (std::size_t i = 0; i <= n; ++i) points.push_back(static_cast<double>(i));
    } else {
        const auto n = static_cast<std::size_t>(std::llround(horizon / 0.05));
        for (std::size_t i = 0; i <= n; ++i) points.push_back(0.05 * static_cast<double>(i));
    }
    return points;
}

// Envelope of t -> d(map(t)) given d <= env and map(t) >= start + slope*t,
// using that envelopes decrease in t.
std::optional<TailEnvelope> pulled_back_envelope(const TailEnvelope& env, double start, double slope, bool exact,
                                                 TimeDomain out_domain) {
    if (!env.present() || !(slope > 0.0) || start < 0.0) return std::nullopt;
    TailEnvelope out = env;
    out.certified = env.certified && exact;
    double onset = std::max(0.0, (env.onset - start) / slope);
    if (env.form == TailEnvelope::Form::Geometric) {
        out.scale = env.scale * std::pow(env.rate, start);
        out.rate = std::pow(env.rate, slope);
    } else {
        // (start + slope t)^-p <= slope^-p t^-p
        out.scale = env.scale * std::pow(slope, -env.exponent);
        onset = std::max(onset, 1.0);
    }
    out.onset = out_domain == TimeDomain::Discrete ? std::ceil(onset) : onset;
    return out;
}

}  // namespace

Kernel combine_linear(const Kernel& k, const Kernel& h, double alpha, double beta) {
    require_same_domain(k, h);
    if (!(alpha >= 0.0) || !(beta >= 0.0) || !std::isfinite(alpha) || !std::isfinite(beta)) {
        throw NegativeCoefficient("coefficients must be finite and >= 0, got " + fmt(alpha) + ", " + fmt(beta));
    }
    Kernel out(k.domain(), [k, h, alpha, beta](double s, double t) { return alpha * k(s, t) + beta * h(s, t); },
               fmt(alpha) + "*" + k.label() + " + " + fmt(beta) + "*" + h.label());
    if (k.has_closed_diagonal() && h.has_closed_diagonal()) {
        out.set_diagonal([k, h, alpha, beta](double t) { return alpha * k.diagonal(t) + beta * h.diagonal(t); });
    }
    // sqrt(a x + b y) <= sqrt(a) sqrt(x) + sqrt(b) sqrt(y)
    auto part = [](const Kernel& kernel, double coeff) -> std::optional<TailEnvelope> {
        if (coeff == 0.0) return TailEnvelope::geometric(0.0, 0.5);
        if (!kernel.envelope()) return std::nullopt;
        return kernel.envelope()->scaled(std::sqrt(coeff));
    };
    const auto ek = part(k, alpha);
    const auto eh = part(h, beta);
    if (ek && eh) {
        if (alpha == 0.0) {
            out.set_envelope(*eh);
        } else if (beta == 0.0) {
            out.set_envelope(*ek);
        } else {
            out.set_envelope(envelope_sum(*ek, *eh));
        }
    }
    const auto band_of = [](const Kernel& kernel, double coeff) -> std::optional<double> {
        if (coeff == 0.0) return 0.0;
        return kernel.band();
    };
    const auto bk = band_of(k, alpha);
    const auto bh = band_of(h, beta);
    if (bk && bh) out.set_band(std::max(*bk, *bh));
    out.set_stationary((alpha == 0.0 || k.stationary()) && (beta == 0.0 || h.stationary()));
    return out;
}

double probe_diagonal_sup(const Kernel& h, std::optional<double> horizon) {
    const auto points = probe_points(h.domain(), horizon.value_or(default_horizon(h.domain())));
    double sup = 0.0;
    for (double t : points) {
        const double value = h.diagonal(t);
        if (!std::isfinite(value)) throw NonFiniteEntry("diagonal of '" + h.label() + "' at t = " + fmt(t));
        sup = std::max(sup, value);
    }
    return sup;
}

Kernel combine_product(const Kernel& k, const Kernel& h) {
    require_same_domain(k, h);
    Kernel out(k.domain(), [k, h](double s, double t) { return k(s, t) * h(s, t); },
               "(" + k.label() + ")*(" + h.label() + ")");
    if (k.has_closed_diagonal() && h.has_closed_diagonal()) {
        out.set_diagonal([k, h](double t) { return k.diagonal(t) * h.diagonal(t); });
    }
    if (k.envelope() && h.envelope()) {
        out.set_envelope(envelope_product(*k.envelope(), *h.envelope()));
    } else if (k.envelope() || h.envelope()) {
        const Kernel& enveloped = k.envelope() ? k : h;
        const Kernel& other = k.envelope() ? h : k;
        TailEnvelope env = enveloped.envelope()->scaled(std::sqrt(probe_diagonal_sup(other)));
        env.certified = false;
        out.set_envelope(env);
    }
    if (k.band() && h.band()) {
        out.set_band(std::min(*k.band(), *h.band()));
    } else if (k.band()) {
        out.set_band(*k.band());
    } else if (h.band()) {
        out.set_band(*h.band());
    }
    out.set_stationary(k.stationary() && h.stationary());
    return out;
}

SamplingMap SamplingMap::affine_map(double scale, double offset) {
    SamplingMap map;
    map.sigma = [scale, offset](double t) { return scale * t + offset; };
    map.min_gap = scale;
    map.affine = true;
    map.scale = scale;
    map.offset = offset;
    map.label = "sigma(t)=" + fmt(scale) + "t+" + fmt(offset);
    return map;
}

SamplingMap SamplingMap::from_function(std::function<double(double)> sigma, std::string label,
                                       std::size_t probe_horizon) {
    SamplingMap map;
    double gap = std::numeric_limits<double>::infinity();
    double prev = sigma(0.0);
    for (std::size_t t = 1; t <= probe_horizon; ++t) {
        const double cur = sigma(static_cast<double>(t));
        gap = std::min(gap, cur - prev);
        prev = cur;
    }
    map.sigma = std::move(sigma);
    map.min_gap = gap;
    map.label = std::move(label);
    return map;
}

Kernel sample_kernel(const Kernel& k, const SamplingMap& sigma) {
    if (k.domain() != TimeDomain::Continuous) {
        throw DomainMismatch("sample_kernel needs a continuous-domain kernel, got '" + k.label() + "'");
    }
    if (!(sigma.min_gap > 0.0)) throw ImproperSampling("min gap " + fmt(sigma.min_gap) + " is not positive");
    const double start = sigma.sigma(0.0);
    if (!(start >= 0.0)) throw ImproperSampling("sigma(0) = " + fmt(start) + " lies outside the domain");
    auto map = sigma.sigma;
    Kernel out(TimeDomain::Discrete, [k, map](double s, double t) { return k(map(s), map(t)); },
               k.label() + "@" + sigma.label);
    out.set_diagonal([k, map](double t) { return k.diagonal(map(t)); });
    if (k.envelope()) {
        if (auto env = pulled_back_envelope(*k.envelope(), start, sigma.min_gap, sigma.affine, TimeDomain::Discrete)) {
            out.set_envelope(*env);
        }
    }
    if (k.band()) out.set_band(std::floor(*k.band() / sigma.min_gap));
    return out;
}

ReparamMap ReparamMap::affine_map(double scale, double offset, TimeDomain domain) {
    if (!(scale > 0.0) || !(offset >= 0.0)) {
        throw NotIncreasing("affine reparameterization needs scale > 0 and offset >= 0, got " + fmt(scale) + ", " +
                            fmt(offset));
    }
    if (domain == TimeDomain::Discrete && (scale != std::floor(scale) || offset != std::floor(offset))) {
        throw InvalidArgument("discrete reparameterization must map integers to integers");
    }
    ReparamMap map;
    map.rho = [scale, offset](double t) { return scale * t + offset; };
    map.min_derivative = scale;
    map.affine = true;
    map.scale = scale;
    map.offset = offset;
    map.label = "rho(t)=" + fmt(scale) + "t+" + fmt(offset);
    return map;
}

ReparamMap ReparamMap::from_function(std::function<double(double)> rho, std::string label, TimeDomain domain) {
    const auto points = probe_points(domain, default_horizon(domain));
    double min_derivative = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double value = rho(points[i]);
        if (!is_valid_point(domain, value)) {
            throw InvalidArgument("rho(" + fmt(points[i]) + ") = " + fmt(value) + " leaves the domain");
        }
        if (i == 0) continue;
        const double prev = rho(points[i - 1]);
        if (!(value > prev)) {
            throw NotIncreasing("rho(" + fmt(points[i]) + ") = " + fmt(value) + " <= rho(" + fmt(points[i - 1]) +
                                ") = " + fmt(prev));
        }
        min_derivative = std::min(min_derivative, (value - prev) / (points[i] - points[i - 1]));
    }
    ReparamMap map;
    map.rho = std::move(rho);
    map.min_derivative = min_derivative;
    map.label = std::move(label);
    return map;
}

Kernel reparameterize(const Kernel& k, const ReparamMap& rho) {
    if (!(rho.min_derivative > 0.0)) throw NotIncreasing("min derivative " + fmt(rho.min_derivative) + " is not positive");
    auto map = rho.rho;
    Kernel out(k.domain(), [k, map](double s, double t) { return k(map(s), map(t)); }, k.label() + "@" + rho.label);
    out.set_diagonal([k, map](double t) { return k.diagonal(map(t)); });
    if (k.envelope()) {
        if (auto env = pulled_back_envelope(*k.envelope(), map(0.0), rho.min_derivative, rho.affine, k.domain())) {
            out.set_envelope(*env);
        }
    }
    if (k.band()) out.set_band(*k.band() / rho.min_derivative);
    return out;
}

std::string_view to_string(DominanceMode mode) { return mode == DominanceMode::Full ? "full" : "diagonal_only"; }

DominanceCertificate check_dominance(const Kernel& k, const Kernel& h, DominanceMode mode,
                                     std::optional<double> horizon, double margin) {
    require_same_domain(k, h);
    if (!(margin >= 0.0)) throw InvalidArgument("margin must be >= 0");
    const double probe_horizon = horizon.value_or(default_horizon(k.domain()));
    const auto points = probe_points(k.domain(), probe_horizon);
    const std::size_t n = points.size();

    struct BlockResult {
        double max_ratio = 0.0;
        double ws = 0.0, wt = 0.0;
        bool failed = false;
        double fs = 0.0, ft = 0.0, fk = 0.0, fh = 0.0;
    };
    std::vector<BlockResult> blocks(n);
    // One entry per row i; pairs (i, j) with j >= i (symmetry).
    parallel_for(n, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            BlockResult& r = blocks[i];
            const std::size_t j_end = mode == DominanceMode::Full ? n : i + 1;
            for (std::size_t j = i; j < j_end; ++j) {
                const double s = points[i];
                const double t = points[j];
                const double kv = std::fabs(k(s, t));
                const double hv = std::fabs(h(s, t));
                if (!std::isfinite(kv) || !std::isfinite(hv)) {
                    throw NonFiniteEntry("at (" + fmt(s) + ", " + fmt(t) + ")");
                }
                if (hv <= kVanishingTolerance) {
                    if (kv > kVanishingTolerance) {
                        r.failed = true;
                        r.fs = s;
                        r.ft = t;
                        r.fk = kv;
                        r.fh = hv;
                        break;
                    }
                    continue;
                }
                const double ratio = kv / hv;
                if (ratio > r.max_ratio) {
                    r.max_ratio = ratio;
                    r.ws = s;
                    r.wt = t;
                }
            }
        }
    });

    DominanceCertificate cert;
    cert.dominated = k.label();
    cert.dominating = h.label();
    cert.mode = mode;
    cert.probe_horizon = probe_horizon;
    for (const auto& r : blocks) {
        if (r.failed) {
            throw NotDominated(r.fs, r.ft,
                               "'" + h.label() + "' vanishes at (" + fmt(r.fs) + ", " + fmt(r.ft) + ") where |'" +
                                   k.label() + "'| = " + fmt(r.fk));
        }
        if (r.max_ratio > cert.max_ratio_observed) {
            cert.max_ratio_observed = r.max_ratio;
            cert.witness_s = r.ws;
            cert.witness_t = r.wt;
        }
    }
    cert.constant_C = (1.0 + margin) * cert.max_ratio_observed;
    return cert;
}

}  // namespace kernelid
