#include "kernelid/zoo.hpp"

#include "kernelid/error.hpp"
#include "kernelid/quadrature.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <memory>
#include <numbers>
#include <random>
#include <sstream>

namespace kernelid::zoo {

namespace {

std::string fmt(double x) {
    std::ostringstream out;
    out << x;
    return out.str();
}

void require(bool ok, const std::string& constraint) {
    if (!ok) throw ParameterOutOfRange("violated constraint: " + constraint);
}

void check_alpha(double alpha) { require(alpha > 0.0 && alpha < 1.0, "alpha in (0,1), got " + fmt(alpha)); }

// integral of alpha^(t/2) over the domain
double geometric_root_measure(double alpha, TimeDomain domain) {
    const double root = std::sqrt(alpha);
    if (domain == TimeDomain::Discrete) return 1.0 / (1.0 - root);
    return -2.0 / std::log(alpha);
}

double integral_spline_term(double alpha, double beta, double exponent) {
    return (std::pow(alpha, exponent) - std::pow(beta, exponent)) / exponent;
}

}  // namespace

Kernel make_classic(ClassicFamily family, const ClassicParams& p, TimeDomain domain) {
    const double alpha = p.alpha;
    check_alpha(alpha);
    switch (family) {
        case ClassicFamily::DI: {
            Kernel k(domain, [alpha](double s, double t) { return s == t ? std::pow(alpha, s) : 0.0; },
                     "DI(alpha=" + fmt(alpha) + ")");
            k.set_diagonal([alpha](double t) { return std::pow(alpha, t); });
            k.set_closed_form_measure(geometric_root_measure(alpha, domain));
            k.set_envelope(TailEnvelope::geometric(1.0, std::sqrt(alpha)));
            k.set_band(0.0);
            return k;
        }
        case ClassicFamily::DC: {
            const double gamma = p.gamma;
            if (domain == TimeDomain::Discrete) {
                require(gamma > -1.0 && gamma < 1.0, "gamma in (-1,1) on the discrete domain, got " + fmt(gamma));
            } else {
                require(gamma > 0.0 && gamma < 1.0, "gamma in (0,1) on the continuous domain, got " + fmt(gamma));
            }
            // std::pow(0, 0) == 1, so gamma = 0 degenerates to DI.
            Kernel k(domain,
                     [alpha, gamma](double s, double t) {
                         return std::pow(alpha, 0.5 * (s + t)) * std::pow(gamma, std::fabs(s - t));
                     },
                     "DC(alpha=" + fmt(alpha) + ",gamma=" + fmt(gamma) + ")");
            k.set_diagonal([alpha](double t) { return std::pow(alpha, t); });
            k.set_closed_form_measure(geometric_root_measure(alpha, domain));
            k.set_envelope(TailEnvelope::geometric(1.0, std::sqrt(alpha)));
            return k;
        }
        case ClassicFamily::TC: {
            Kernel k(domain, [alpha](double s, double t) { return std::pow(alpha, std::max(s, t)); },
                     "TC(alpha=" + fmt(alpha) + ")");
            k.set_diagonal([alpha](double t) { return std::pow(alpha, t); });
            k.set_closed_form_measure(geometric_root_measure(alpha, domain));
            k.set_envelope(TailEnvelope::geometric(1.0, std::sqrt(alpha)));
            return k;
        }
        case ClassicFamily::SS: {
            Kernel k(domain,
                     [alpha](double s, double t) {
                         const double m = std::max(s, t);
                         return std::pow(alpha, m + s + t) - std::pow(alpha, 3.0 * m) / 3.0;
                     },
                     "SS(alpha=" + fmt(alpha) + ")");
            k.set_diagonal([alpha](double t) { return 2.0 / 3.0 * std::pow(alpha, 3.0 * t); });
            const double c = std::sqrt(2.0 / 3.0);
            const double r = std::pow(alpha, 1.5);
            k.set_closed_form_measure(domain == TimeDomain::Discrete ? c / (1.0 - r) : c / -std::log(r));
            k.set_envelope(TailEnvelope::geometric(c, r));
            return k;
        }
        case ClassicFamily::iTC:
        case ClassicFamily::iSS:
        case ClassicFamily::iTS: {
            const double beta = p.beta;
            require(beta >= 0.0 && beta <= alpha, "0 <= beta <= alpha < 1, got beta=" + fmt(beta));
            auto itc = [alpha, beta](double s, double t) {
                return integral_spline_term(alpha, beta, std::max(s, t) + 1.0);
            };
            auto iss = [alpha, beta](double s, double t) {
                const double m = std::max(s, t);
                return integral_spline_term(alpha, beta, s + t + m + 1.0) -
                       (std::pow(alpha, 3.0 * m + 1.0) - std::pow(beta, 3.0 * m + 1.0)) / (9.0 * m + 3.0);
            };
            auto itc_diag = [alpha, beta](double t) { return integral_spline_term(alpha, beta, t + 1.0); };
            auto iss_diag = [alpha, beta](double t) { return 2.0 / 3.0 * integral_spline_term(alpha, beta, 3.0 * t + 1.0); };
            // iTC root <= sqrt(alpha) alpha^(t/2); iSS root <= sqrt(2 alpha / 3) alpha^(3t/2).
            const TailEnvelope itc_env = TailEnvelope::geometric(std::sqrt(alpha), std::sqrt(alpha));
            const TailEnvelope iss_env = TailEnvelope::geometric(std::sqrt(2.0 * alpha / 3.0), std::pow(alpha, 1.5));
            const std::string params = "(alpha=" + fmt(alpha) + ",beta=" + fmt(beta) + ")";
            if (family == ClassicFamily::iTC) {
                Kernel k(domain, itc, "iTC" + params);
                k.set_diagonal(itc_diag);
                k.set_envelope(itc_env);
                return k;
            }
            if (family == ClassicFamily::iSS) {
                Kernel k(domain, iss, "iSS" + params);
                k.set_diagonal(iss_diag);
                k.set_envelope(iss_env);
                return k;
            }
            Kernel k(domain, [itc, iss](double s, double t) { return itc(s, t) + iss(s, t); }, "iTS" + params);
            k.set_diagonal([itc_diag, iss_diag](double t) { return itc_diag(t) + iss_diag(t); });
            k.set_envelope(envelope_sum(itc_env, iss_env));
            return k;
        }
    }
    throw InvalidArgument("unhandled classic family");
}

Kernel make_rank_n_exponential(const std::vector<double>& lambda, const std::vector<double>& alpha, TimeDomain domain) {
    require(!lambda.empty() && lambda.size() == alpha.size(), "lambda and alpha nonempty with equal length");
    for (std::size_t i = 0; i < lambda.size(); ++i) {
        require(lambda[i] >= 0.0 && std::isfinite(lambda[i]), "lambda_i >= 0, got " + fmt(lambda[i]));
        require(alpha[i] >= 0.0 && alpha[i] < 1.0, "alpha_i in [0,1), got " + fmt(alpha[i]));
    }
    std::string label = "RnE(lambda=[";
    for (std::size_t i = 0; i < lambda.size(); ++i) label += (i ? "," : "") + fmt(lambda[i]);
    label += "],alpha=[";
    for (std::size_t i = 0; i < alpha.size(); ++i) label += (i ? "," : "") + fmt(alpha[i]);
    label += "])";

    Kernel k(domain,
             [lambda, alpha](double s, double t) {
                 double sum = 0.0;
                 for (std::size_t i = 0; i < lambda.size(); ++i) sum += lambda[i] * std::pow(alpha[i], 0.5 * (s + t));
                 return sum;
             },
             std::move(label));
    k.set_diagonal([lambda, alpha](double t) {
        double sum = 0.0;
        for (std::size_t i = 0; i < lambda.size(); ++i) sum += lambda[i] * std::pow(alpha[i], t);
        return sum;
    });
    double lambda_total = 0.0;
    double alpha_max = 0.0;
    for (std::size_t i = 0; i < lambda.size(); ++i) {
        lambda_total += lambda[i];
        alpha_max = std::max(alpha_max, alpha[i]);
    }
    k.set_envelope(TailEnvelope::geometric(std::sqrt(lambda_total), std::sqrt(alpha_max)));
    if (lambda.size() == 1) {
        const double root_lambda = std::sqrt(lambda[0]);
        const double a = alpha[0];
        double m = 0.0;
        if (domain == TimeDomain::Discrete) {
            m = root_lambda / (1.0 - std::sqrt(a));
        } else if (a > 0.0) {
            m = -2.0 * root_lambda / std::log(a);
        }
        k.set_closed_form_measure(m);
    }
    return k;
}

Kernel make_stable_spline_n(int n, double beta) {
    require(n >= 1, "n >= 1, got " + std::to_string(n));
    require(beta > 0.0 && std::isfinite(beta), "beta > 0, got " + fmt(beta));
    const double factorial = std::tgamma(static_cast<double>(n));  // (n-1)!
    const double norm = factorial * factorial;
    std::vector<double> binomial(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        binomial[static_cast<std::size_t>(i)] =
            std::round(std::tgamma(n) / (std::tgamma(i + 1.0) * std::tgamma(static_cast<double>(n - i))));
    }
    // With lo = min(e^{-beta s}, e^{-beta t}), gap = |e^{-beta s} - e^{-beta t}| and
    // w = lo - u, the integrand is (gap + w)^(n-1) w^(n-1) on w in [0, lo]; the
    // binomial expansion has only nonnegative terms.
    auto eval = [n, beta, norm, binomial](double s, double t) {
        const double lo_time = std::max(s, t);
        const double hi_time = std::min(s, t);
        const double lo = std::exp(-beta * lo_time);
        const double gap = -std::exp(-beta * hi_time) * std::expm1(-beta * (lo_time - hi_time));
        double sum = 0.0;
        for (int i = 0; i < n; ++i) {
            sum += binomial[static_cast<std::size_t>(i)] * std::pow(gap, n - 1 - i) * std::pow(lo, i + n) / (i + n);
        }
        return sum / norm;
    };
    const double order = 2.0 * n - 1.0;
    Kernel k(TimeDomain::Continuous, eval, "SS" + std::to_string(n) + "(beta=" + fmt(beta) + ")");
    k.set_diagonal([order, beta, norm](double t) { return std::exp(-order * beta * t) / (order * norm); });
    const double c = 1.0 / std::sqrt(order * norm);
    const double r = std::exp(-order * beta / 2.0);
    k.set_envelope(TailEnvelope::geometric(c, r));
    k.set_closed_form_measure(c / -std::log(r));
    return k;
}

Kernel make_kv(const Signal& v, TimeDomain domain) {
    Kernel k(domain, [v](double s, double t) { return v(s) * v(t); }, "Kv(" + v.label() + ")");
    k.set_diagonal([v](double t) { return v(t) * v(t); });
    if (v.envelope()) k.set_envelope(*v.envelope());
    if (auto l1 = v.l1_norm(domain)) k.set_closed_form_measure(*l1);
    return k;
}

Kernel make_zero(TimeDomain domain) {
    Kernel k(domain, [](double, double) { return 0.0; }, "zero");
    k.set_diagonal([](double) { return 0.0; });
    k.set_closed_form_measure(0.0);
    k.set_envelope(TailEnvelope::geometric(0.0, 0.5));
    k.set_band(0.0);
    k.set_stationary(true);
    return k;
}

Kernel make_constant(double value, TimeDomain domain) {
    require(value >= 0.0 && std::isfinite(value), "constant kernel value >= 0, got " + fmt(value));
    Kernel k(domain, [value](double, double) { return value; }, "constant(" + fmt(value) + ")");
    k.set_diagonal([value](double) { return value; });
    if (value == 0.0) return make_zero(domain);
    k.set_stationary(true);
    return k;
}

Kernel make_exponential_stationary(double gamma, TimeDomain domain) {
    if (domain == TimeDomain::Discrete) {
        require(gamma > -1.0 && gamma < 1.0, "gamma in (-1,1) on the discrete domain, got " + fmt(gamma));
    } else {
        require(gamma > 0.0 && gamma < 1.0, "gamma in (0,1) on the continuous domain, got " + fmt(gamma));
    }
    Kernel k(domain, [gamma](double s, double t) { return std::pow(gamma, std::fabs(s - t)); },
             "exponential(gamma=" + fmt(gamma) + ")");
    k.set_diagonal([](double) { return 1.0; });
    k.set_stationary(true);
    return k;
}

Kernel make_gaussian_stationary(double length_scale, TimeDomain domain) {
    require(length_scale > 0.0 && std::isfinite(length_scale), "length_scale > 0, got " + fmt(length_scale));
    const double inv = 1.0 / (2.0 * length_scale * length_scale);
    Kernel k(domain, [inv](double s, double t) { return std::exp(-(s - t) * (s - t) * inv); },
             "gaussian(l=" + fmt(length_scale) + ")");
    k.set_diagonal([](double) { return 1.0; });
    k.set_stationary(true);
    return k;
}

Kernel make_amls(const Kernel& base, const Signal& v) {
    // Spot check on 50 random triples; a heuristic guard, not a proof.
    std::mt19937_64 rng(0x5EEDA3150ULL);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const bool discrete = base.domain() == TimeDomain::Discrete;
    for (int i = 0; i < 50; ++i) {
        double s = 50.0 * unit(rng);
        double t = 50.0 * unit(rng);
        double tau = 50.0 * unit(rng);
        if (discrete) {
            s = std::floor(s);
            t = std::floor(t);
            tau = std::floor(tau);
        }
        const double a = base(s + tau, t + tau);
        const double b = base(s, t);
        if (!(std::fabs(a - b) <= 1e-10 * std::max(1.0, std::fabs(b)))) {
            throw NotStationary("base kernel '" + base.label() + "' differs under shift: k(" + fmt(s + tau) + "," +
                                fmt(t + tau) + ") = " + fmt(a) + " vs k(" + fmt(s) + "," + fmt(t) + ") = " + fmt(b));
        }
    }
    const double base00 = base(0.0, 0.0);
    Kernel k(base.domain(), [base, v](double s, double t) { return v(s) * base(s, t) * v(t); },
             "AMLS(" + base.label() + "," + v.label() + ")");
    k.set_diagonal([v, base00](double t) { return v(t) * v(t) * base00; });
    if (v.envelope()) k.set_envelope(v.envelope()->scaled(std::sqrt(std::max(0.0, base00))));
    if (auto l1 = v.l1_norm(base.domain())) k.set_closed_form_measure(std::sqrt(std::max(0.0, base00)) * *l1);
    if (base.band()) k.set_band(*base.band());
    return k;
}

// ---------------------------------------------------------------------------
// Simulation-induced kernels

void validate_realization(const StateSpaceRealization& r, TimeDomain domain) {
    const Eigen::Index n = r.A.rows();
    if (n == 0 || r.A.cols() != n || r.b.size() != n || r.c.size() != n || r.Q.rows() != n || r.Q.cols() != n) {
        throw InvalidArgument("realization dimensions must agree: A n x n, b n, c 1 x n, Q n x n");
    }
    if (!r.A.allFinite() || !r.b.allFinite() || !r.c.allFinite() || !r.Q.allFinite() || !std::isfinite(r.d)) {
        throw InvalidArgument("realization entries must be finite");
    }
    const double q_scale = std::max(1.0, r.Q.cwiseAbs().maxCoeff());
    if ((r.Q - r.Q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * q_scale) {
        throw ParameterOutOfRange("violated constraint: Q symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> q_eig(0.5 * (r.Q + r.Q.transpose()), Eigen::EigenvaluesOnly);
    if (!(q_eig.eigenvalues().minCoeff() > 0.0)) throw ParameterOutOfRange("violated constraint: Q positive definite");

    const Eigen::VectorXcd eig = r.A.eigenvalues();
    if (domain == TimeDomain::Discrete) {
        const double radius = eig.cwiseAbs().maxCoeff();
        if (!(radius < 1.0)) throw UnstableRealization("spectral radius of A is " + fmt(radius) + " >= 1");
    } else {
        const double abscissa = eig.real().maxCoeff();
        if (!(abscissa < 0.0)) throw UnstableRealization("largest real part of eig(A) is " + fmt(abscissa) + " >= 0");
    }

    for (int i = 0; i <= 200; ++i) {
        const double t = domain == TimeDomain::Discrete ? static_cast<double>(i) : 0.25 * i;
        const double value = r.v(t);
        if (!(value >= 0.0) || !std::isfinite(value)) {
            throw ParameterOutOfRange("violated constraint: v_t >= 0 (v(" + fmt(t) + ") = " + fmt(value) + ")");
        }
        if (r.v.envelope() && t >= r.v.envelope()->onset && value > (*r.v.envelope())(t) * (1.0 + 1e-12)) {
            throw ParameterOutOfRange("signal v exceeds its stated envelope at t = " + fmt(t));
        }
    }
}

TransitionBound transition_bound(const Eigen::MatrixXd& A, TimeDomain domain) {
    auto spectral_norm = [](const Eigen::MatrixXd& M) {
        return Eigen::JacobiSVD<Eigen::MatrixXd>(M).singularValues()(0);
    };
    const Eigen::Index n = A.rows();
    // ||Phi_t|| <= ||step^j|| ||step^m||^q for t = (q m + j) * h, with ||step^m|| < 1.
    const double h = domain == TimeDomain::Discrete ? 1.0 : 0.1;
    const Eigen::MatrixXd step = domain == TimeDomain::Discrete ? A : Eigen::MatrixXd((A * h).exp());
    std::vector<double> norms{1.0};
    Eigen::MatrixXd power = Eigen::MatrixXd::Identity(n, n);
    std::size_t m = 0;
    for (std::size_t j = 1; j <= 20000; ++j) {
        power = power * step;
        const double norm = spectral_norm(power);
        if (norm == 0.0) {
            return {*std::max_element(norms.begin(), norms.end()), 0.0};
        }
        if (norm <= 0.5) {
            m = j;
            norms.push_back(norm);
            break;
        }
        norms.push_back(norm);
    }
    if (m == 0) throw UnstableRealization("no contracting power of the transition matrix within 20000 steps");
    const double contraction = norms[m];
    const double rate = std::pow(contraction, 1.0 / (static_cast<double>(m) * h));
    double gain = 0.0;
    for (std::size_t j = 0; j < m; ++j) gain = std::max(gain, norms[j] * std::pow(rate, -static_cast<double>(j) * h));
    if (domain == TimeDomain::Continuous) gain *= std::exp(spectral_norm(A) * h) * std::pow(rate, -h);
    return {gain, rate};
}

namespace {

struct DiscreteSiState {
    StateSpaceRealization r;
    std::size_t horizon;
    std::vector<Eigen::RowVectorXd> c_powers;  // c A^j
    std::vector<double> impulse;               // c A^j b
    std::vector<double> v_values;              // v(j)
    std::vector<double> cqc;                   // c A^j Q (c A^j)^T, diagonal memo

    void prepare() {
        Eigen::RowVectorXd row = r.c;
        for (std::size_t j = 0; j < horizon; ++j) {
            c_powers.push_back(row);
            impulse.push_back(row * r.b);
            v_values.push_back(r.v(static_cast<double>(j)));
            cqc.push_back(row * r.Q * row.transpose());
            row = row * r.A;
        }
    }

    Eigen::RowVectorXd c_power(long j) const {
        if (j < static_cast<long>(horizon)) return c_powers[static_cast<std::size_t>(j)];
        Eigen::MatrixXd result = Eigen::MatrixXd::Identity(r.A.rows(), r.A.cols());
        Eigen::MatrixXd base = r.A;
        for (long e = j; e > 0; e >>= 1) {
            if (e & 1) result = result * base;
            base = base * base;
        }
        return r.c * result;
    }
    double h(long j) const {
        if (j < static_cast<long>(horizon)) return impulse[static_cast<std::size_t>(j)];
        return c_power(j) * r.b;
    }
    double v(long j) const {
        if (j < static_cast<long>(horizon)) return v_values[static_cast<std::size_t>(j)];
        return r.v(static_cast<double>(j));
    }

    std::uint64_t id = next_id();

    static std::uint64_t next_id() {
        static std::atomic<std::uint64_t> counter{0};
        return ++counter;
    }

    const std::vector<double>& extended_impulse(long top) const {
        struct Cache {
            std::uint64_t owner = 0;
            std::vector<double> h;
            Eigen::RowVectorXd row;
        };
        thread_local Cache cache;
        if (cache.owner != id) {
            cache.owner = id;
            cache.h = impulse;
            cache.row = c_powers.back() * r.A;
        }
        while (static_cast<long>(cache.h.size()) < top) {
            cache.h.push_back(cache.row.dot(r.b));
            cache.row = cache.row * r.A;
        }
        return cache.h;
    }

    double initial_term(long s, long t) const {
        const long n = static_cast<long>(horizon);
        if (s == t && s < n) return cqc[static_cast<std::size_t>(s)];
        if (s < n && t < n) {
            return c_powers[static_cast<std::size_t>(s)] * r.Q * c_powers[static_cast<std::size_t>(t)].transpose();
        }
        return c_power(s) * r.Q * c_power(t).transpose();
    }

    double eval(double s_real, double t_real) const {
        const long s = std::lround(s_real);
        const long t = std::lround(t_real);
        double value = initial_term(s, t);
        const double vs = v(s);
        const double vt = v(t);
        if (s == t) value += r.d * r.d * vs * vt;
        if (r.d != 0.0) {
            if (s < t) value += vs * r.d * vs * h(t - 1 - s);
            if (t < s) value += vt * r.d * vt * h(s - 1 - t);
        }
        const long lo = std::min(s, t);
        const long n = static_cast<long>(horizon);
        if (s <= n && t <= n) {
            // Memoized fast path: every index below stays inside the tables.
            const double* hs = impulse.data() + (s - 1);
            const double* ht = impulse.data() + (t - 1);
            for (long k = 0; k < lo; ++k) {
                const double vk = v_values[static_cast<std::size_t>(k)];
                value += vk * vk * hs[-k] * ht[-k];
            }
            return value;
        }
        // Beyond the memo: extend h by stepping c A^j forward, cached per
        // thread so construction-time tables stay immutable.
        const std::vector<double>& hs = extended_impulse(std::max(s, t));
        for (long k = 0; k < lo; ++k) {
            const double vk = v(k);
            value += vk * vk * hs[static_cast<std::size_t>(s - 1 - k)] * hs[static_cast<std::size_t>(t - 1 - k)];
        }
        return value;
    }
};

struct ContinuousSiState {
    StateSpaceRealization r;
    double tol;
    // Modal form e^{Ax} = V diag(e^{lambda x}) V^{-1} when V is well conditioned.
    bool modal = false;
    Eigen::VectorXcd lambda;
    Eigen::RowVectorXcd c_modes;  // c V
    Eigen::MatrixXcd v_inverse;   // V^{-1}
    Eigen::VectorXcd b_modes;     // V^{-1} b

    void prepare() {
        Eigen::EigenSolver<Eigen::MatrixXd> solver(r.A);
        if (solver.info() != Eigen::Success) return;
        const Eigen::MatrixXcd V = solver.eigenvectors();
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(V);
        const auto& sv = svd.singularValues();
        if (sv(sv.size() - 1) <= 0.0 || sv(0) / sv(sv.size() - 1) > 1e6) return;
        modal = true;
        lambda = solver.eigenvalues();
        v_inverse = V.inverse();
        c_modes = r.c.cast<std::complex<double>>() * V;
        b_modes = v_inverse * r.b.cast<std::complex<double>>();
    }

    Eigen::RowVectorXd c_exp(double x) const {
        if (!modal) return r.c * (r.A * x).exp();
        Eigen::RowVectorXcd scaled = c_modes;
        for (Eigen::Index i = 0; i < scaled.size(); ++i) scaled(i) *= std::exp(lambda(i) * x);
        return (scaled * v_inverse).real();
    }
    double phi(double x) const {
        if (!modal) return r.c * (r.A * x).exp() * r.b;
        std::complex<double> sum = 0.0;
        for (Eigen::Index i = 0; i < lambda.size(); ++i) sum += c_modes(i) * std::exp(lambda(i) * x) * b_modes(i);
        return sum.real();
    }

    double eval(double s, double t) const {
        double value = c_exp(s) * r.Q * c_exp(t).transpose();
        const double upper = std::min(s, t);
        if (upper > 0.0) {
            QuadratureOptions options;
            options.abs_tol = tol;
            options.panel_width = 1.0;
            const auto q = integrate(
                [this, s, t](double tau) {
                    const double v = r.v(tau);
                    return v * v * phi(s - tau) * phi(t - tau);
                },
                0.0, upper, options);
            if (!q.converged) {
                throw QuadratureFailure("simulation-induced integral at (" + fmt(s) + ", " + fmt(t) +
                                        ") missed tolerance " + fmt(tol));
            }
            value += q.value;
        }
        return value;
    }
};

std::optional<TailEnvelope> simulation_induced_envelope(const StateSpaceRealization& r, TimeDomain domain) {
    if (!r.v.envelope() || r.v.envelope()->form != TailEnvelope::Form::Geometric) return std::nullopt;
    const TransitionBound phi = transition_bound(r.A, domain);
    const TailEnvelope& venv = *r.v.envelope();
    // v_t^2 <= gamma2 * alpha^t for every t, including before the envelope onset.
    double alpha = std::max({phi.rate, venv.rate * venv.rate, 1e-6});
    if (!(alpha < 1.0)) return std::nullopt;
    double gamma2 = venv.scale * venv.scale;
    if (domain == TimeDomain::Discrete) {
        for (double t = 0.0; t < venv.onset; t += 1.0) gamma2 = std::max(gamma2, r.v(t) * r.v(t) / std::pow(alpha, t));
    } else if (venv.onset > 0.0) {
        return std::nullopt;
    }
    const double c_norm = r.c.norm();
    const double b_norm = r.b.norm();
    const double q_norm = Eigen::JacobiSVD<Eigen::MatrixXd>(r.Q).singularValues()(0);
    const double lambda1 = phi.gain * phi.gain * q_norm * c_norm * c_norm;
    const double gamma = b_norm * b_norm * c_norm * c_norm * phi.gain * phi.gain * gamma2;
    double lambda2 = 0.0;
    double direct = 0.0;
    if (domain == TimeDomain::Discrete) {
        lambda2 = gamma / (alpha * (1.0 - alpha));
        direct = r.d * r.d * gamma2;
    } else {
        lambda2 = -gamma / std::log(alpha);
    }
    return TailEnvelope::geometric(std::sqrt(lambda1 + lambda2 + direct), std::sqrt(alpha));
}

}  // namespace

Kernel make_simulation_induced(const StateSpaceRealization& realization, TimeDomain domain,
                               const SimulationInducedOptions& options) {
    validate_realization(realization, domain);
    Kernel::EvalFn eval;
    if (domain == TimeDomain::Discrete) {
        auto state = std::make_shared<DiscreteSiState>();
        state->r = realization;
        state->horizon = std::max<std::size_t>(options.memo_horizon, 1);
        state->prepare();
        eval = [state](double s, double t) { return state->eval(s, t); };
    } else {
        auto state = std::make_shared<ContinuousSiState>();
        state->r = realization;
        state->tol = options.quadrature_tol;
        state->prepare();
        eval = [state](double s, double t) { return state->eval(s, t); };
    }
    Kernel k(domain, std::move(eval), "SI(n=" + std::to_string(realization.A.rows()) + ")");
    if (auto env = simulation_induced_envelope(realization, domain)) k.set_envelope(*env);
    return k;
}

double simulation_induced_noise_term(const StateSpaceRealization& r, long t) {
    double sum = 0.0;
    Eigen::RowVectorXd row = r.c;
    std::vector<double> h;
    for (long j = 0; j < t; ++j) {
        h.push_back(row * r.b);
        row = row * r.A;
    }
    for (long k = 0; k < t; ++k) {
        const double vk = r.v(static_cast<double>(k));
        const double hk = h[static_cast<std::size_t>(t - 1 - k)];
        sum += vk * vk * hk * hk;
    }
    return sum;
}

// ---------------------------------------------------------------------------

Kernel make_counterexample(TimeDomain kind) {
    if (kind == TimeDomain::Discrete) {
        Kernel k(TimeDomain::Discrete,
                 [](double s, double t) { return s == t ? 1.0 / ((1.0 + s) * (1.0 + s)) : 0.0; },
                 "counterexample(discrete)");
        k.set_diagonal([](double t) { return 1.0 / ((1.0 + t) * (1.0 + t)); });
        // 1/(1+t) <= 1/t for t >= 1: summable squared, not summable itself.
        k.set_envelope(TailEnvelope::power_law(1.0, 1.0, 1.0));
        k.set_band(0.0);
        return k;
    }
    auto bump = [](double s) {
        const double frac = s - std::floor(s);
        return frac <= 0.5 ? std::cos(std::numbers::pi * frac) : 0.0;
    };
    Kernel k(TimeDomain::Continuous,
             [bump](double s, double t) {
                 const double fs = std::floor(s);
                 if (fs != std::floor(t)) return 0.0;
                 return bump(s) * bump(t) / ((1.0 + fs) * (1.0 + fs));
             },
             "counterexample(continuous)");
    k.set_diagonal([bump](double t) {
        const double g = bump(t) / (1.0 + std::floor(t));
        return g * g;
    });
    k.set_envelope(TailEnvelope::power_law(1.0, 1.0, 1.0));
    k.set_band(1.0);
    return k;
}

}  // namespace kernelid::zoo
