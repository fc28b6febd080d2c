#include "kernelid/core.hpp"

#include "kernelid/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace kernelid {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// sup over t >= t0 of rate^t * t^p, for t0 >= 1.
double geometric_to_power_constant(double rate, double p, double t0) {
    if (rate <= 0.0) return 0.0;
    const double peak = p / -std::log(rate);
    const double t = std::max(t0, peak);
    return std::pow(rate, t) * std::pow(t, p);
}

}  // namespace

std::string_view to_string(TimeDomain domain) {
    return domain == TimeDomain::Discrete ? "discrete" : "continuous";
}

TimeDomain time_domain_from_string(std::string_view text) {
    if (text == "discrete") return TimeDomain::Discrete;
    if (text == "continuous") return TimeDomain::Continuous;
    throw InvalidArgument("unknown time domain '" + std::string(text) + "'");
}

TailEnvelope TailEnvelope::geometric(double scale, double rate, double onset) {
    if (!(scale >= 0.0) || !(rate >= 0.0) || !(onset >= 0.0)) {
        throw InvalidArgument("geometric envelope needs scale >= 0, rate >= 0, onset >= 0");
    }
    TailEnvelope env;
    env.form = Form::Geometric;
    env.scale = scale;
    env.rate = rate;
    env.onset = onset;
    return env;
}

TailEnvelope TailEnvelope::power_law(double scale, double exponent, double onset) {
    if (!(scale >= 0.0) || !(exponent >= 0.0) || !(onset >= 1.0)) {
        throw InvalidArgument("power-law envelope needs scale >= 0, exponent >= 0, onset >= 1");
    }
    TailEnvelope env;
    env.form = Form::PowerLaw;
    env.scale = scale;
    env.exponent = exponent;
    env.onset = onset;
    return env;
}

TailEnvelope TailEnvelope::none() { return TailEnvelope{}; }

double TailEnvelope::operator()(double t) const {
    switch (form) {
        case Form::Geometric:
            return scale * std::pow(rate, t);
        case Form::PowerLaw:
            return scale * std::pow(t, -exponent);
        case Form::None:
            break;
    }
    return kInf;
}

TailEnvelope TailEnvelope::raised(double q) const {
    TailEnvelope out = *this;
    switch (form) {
        case Form::Geometric:
            out.scale = std::pow(scale, q);
            out.rate = std::pow(rate, q);
            break;
        case Form::PowerLaw:
            out.scale = std::pow(scale, q);
            out.exponent = exponent * q;
            break;
        case Form::None:
            break;
    }
    return out;
}

TailEnvelope TailEnvelope::scaled(double factor) const {
    TailEnvelope out = *this;
    out.scale = scale * factor;
    return out;
}

bool TailEnvelope::summable(TimeDomain) const {
    if (scale == 0.0 && form != Form::None) return true;
    switch (form) {
        case Form::Geometric:
            return rate < 1.0;
        case Form::PowerLaw:
            return exponent > 1.0;
        case Form::None:
            break;
    }
    return false;
}

double TailEnvelope::first_valid_horizon(TimeDomain domain) const {
    if (domain == TimeDomain::Discrete) {
        double h = std::ceil(onset);
        if (form == Form::PowerLaw) h = std::max(h, 2.0);
        return h;
    }
    return onset;
}

double TailEnvelope::tail(TimeDomain domain, double from) const {
    if (form == Form::None) return kInf;
    if (from < first_valid_horizon(domain)) return kInf;
    if (scale == 0.0) return 0.0;
    if (!summable(domain)) return kInf;
    if (form == Form::Geometric) {
        if (rate == 0.0) return (domain == TimeDomain::Discrete && from <= 0.0) ? scale : 0.0;
        const double head = scale * std::pow(rate, from);
        if (domain == TimeDomain::Discrete) return head / (1.0 - rate);
        return head / -std::log(rate);
    }
    const double p = exponent;
    if (domain == TimeDomain::Discrete) return scale * std::pow(from - 1.0, 1.0 - p) / (p - 1.0);
    return scale * std::pow(from, 1.0 - p) / (p - 1.0);
}

TailEnvelope envelope_sum(const TailEnvelope& a, const TailEnvelope& b) {
    using Form = TailEnvelope::Form;
    if (!a.present() || !b.present()) return TailEnvelope::none();
    TailEnvelope out;
    out.certified = a.certified && b.certified;
    out.onset = std::max(a.onset, b.onset);
    if (a.form == Form::Geometric && b.form == Form::Geometric) {
        out.form = Form::Geometric;
        out.scale = a.scale + b.scale;
        out.rate = std::max(a.rate, b.rate);
        return out;
    }
    out.form = Form::PowerLaw;
    out.onset = std::max(out.onset, 1.0);
    if (a.form == Form::PowerLaw && b.form == Form::PowerLaw) {
        out.exponent = std::min(a.exponent, b.exponent);
        out.scale = a.scale + b.scale;
        return out;
    }
    const TailEnvelope& geo = a.form == Form::Geometric ? a : b;
    const TailEnvelope& pow = a.form == Form::PowerLaw ? a : b;
    out.exponent = pow.exponent;
    out.scale = pow.scale + geo.scale * geometric_to_power_constant(geo.rate, pow.exponent, out.onset);
    return out;
}

TailEnvelope envelope_product(const TailEnvelope& a, const TailEnvelope& b) {
    using Form = TailEnvelope::Form;
    if (!a.present() || !b.present()) return TailEnvelope::none();
    TailEnvelope out;
    out.certified = a.certified && b.certified;
    out.onset = std::max(a.onset, b.onset);
    if (a.form == Form::Geometric && b.form == Form::Geometric) {
        out.form = Form::Geometric;
        out.scale = a.scale * b.scale;
        out.rate = a.rate * b.rate;
        return out;
    }
    if (a.form == Form::PowerLaw && b.form == Form::PowerLaw) {
        out.form = Form::PowerLaw;
        out.scale = a.scale * b.scale;
        out.exponent = a.exponent + b.exponent;
        return out;
    }
    // rate^t * t^-p <= rate^t * onset^-p once t >= onset >= 1.
    const TailEnvelope& geo = a.form == Form::Geometric ? a : b;
    const TailEnvelope& pow = a.form == Form::PowerLaw ? a : b;
    out.form = Form::Geometric;
    out.onset = std::max(out.onset, 1.0);
    out.rate = geo.rate;
    out.scale = geo.scale * pow.scale * std::pow(out.onset, -pow.exponent);
    return out;
}

Kernel::Kernel(TimeDomain domain, EvalFn eval, std::string label)
    : domain_(domain), eval_(std::move(eval)), label_(std::move(label)) {
    if (!eval_) throw InvalidArgument("kernel evaluator must be callable");
}

double Kernel::diagonal_root(double t) const { return std::sqrt(std::max(0.0, diagonal(t))); }

Kernel& Kernel::set_label(std::string label) {
    label_ = std::move(label);
    return *this;
}

Kernel& Kernel::set_diagonal(DiagonalFn diagonal) {
    diagonal_ = std::move(diagonal);
    return *this;
}

Kernel& Kernel::set_closed_form_measure(double value) {
    closed_form_measure_ = value;
    return *this;
}

Kernel& Kernel::set_envelope(TailEnvelope envelope) {
    if (envelope.present()) {
        envelope_ = envelope;
    } else {
        envelope_.reset();
    }
    return *this;
}

Kernel& Kernel::set_band(double band) {
    if (!(band >= 0.0)) throw InvalidArgument("kernel band must be nonnegative");
    band_ = band;
    return *this;
}

Kernel& Kernel::set_stationary(bool stationary) {
    stationary_ = stationary;
    return *this;
}

Kernel& Kernel::clear_closed_form_measure() {
    closed_form_measure_.reset();
    return *this;
}

Kernel& Kernel::clear_envelope() {
    envelope_.reset();
    return *this;
}

Kernel& Kernel::clear_band() {
    band_.reset();
    return *this;
}

bool is_valid_point(TimeDomain domain, double t) {
    if (!std::isfinite(t) || t < 0.0) return false;
    return domain == TimeDomain::Continuous || std::floor(t) == t;
}

Grid::Grid(TimeDomain domain, std::vector<double> points, std::vector<double> weights)
    : domain_(domain), points_(std::move(points)), weights_(std::move(weights)) {
    if (points_.size() != weights_.size()) throw InvalidArgument("grid points and weights differ in length");
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (!is_valid_point(domain_, points_[i])) {
            throw DomainMismatch("grid point " + std::to_string(points_[i]) + " is not in the " +
                                 std::string(to_string(domain_)) + " domain");
        }
        if (i > 0 && !(points_[i] > points_[i - 1])) throw InvalidArgument("grid points must be strictly increasing");
        if (!(weights_[i] > 0.0)) throw InvalidArgument("grid weights must be strictly positive");
    }
}

Grid Grid::discrete_range(std::size_t n) {
    std::vector<double> points(n);
    std::iota(points.begin(), points.end(), 0.0);
    return Grid(TimeDomain::Discrete, std::move(points), std::vector<double>(n, 1.0));
}

Grid Grid::uniform(TimeDomain domain, double start, double step, double end) {
    if (!(step > 0.0) || !(end >= start)) throw InvalidArgument("grid needs step > 0 and end >= start");
    const auto n = static_cast<std::size_t>(std::floor((end - start) / step + 1e-9)) + 1;
    std::vector<double> points(n);
    for (std::size_t i = 0; i < n; ++i) points[i] = start + static_cast<double>(i) * step;
    return from_points(domain, std::move(points));
}

Grid Grid::from_points(TimeDomain domain, std::vector<double> points) {
    std::vector<double> weights(points.size(), 1.0);
    if (domain == TimeDomain::Continuous && points.size() > 1) {
        for (std::size_t i = 0; i < points.size(); ++i) {
            const double left = i > 0 ? points[i] - points[i - 1] : 0.0;
            const double right = i + 1 < points.size() ? points[i + 1] - points[i] : 0.0;
            weights[i] = 0.5 * (left + right);
        }
    }
    return Grid(domain, std::move(points), std::move(weights));
}

GramMatrix assemble_gram(const Kernel& kernel, const Grid& grid) {
    if (grid.domain() != kernel.domain()) {
        throw DomainMismatch("grid is " + std::string(to_string(grid.domain())) + " but kernel '" + kernel.label() +
                             "' is " + std::string(to_string(kernel.domain())));
    }
    if (grid.empty()) throw InvalidArgument("cannot assemble a Gram matrix on an empty grid");

    const auto n = static_cast<Eigen::Index>(grid.size());
    Eigen::MatrixXd entries(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const double value = kernel(grid.point(i), grid.point(j));
            if (!std::isfinite(value)) {
                throw NonFiniteEntry("k(" + std::to_string(grid.point(i)) + ", " + std::to_string(grid.point(j)) +
                                     ") of '" + kernel.label() + "' is not finite");
            }
            entries(i, j) = value;
        }
    }
    Eigen::MatrixXd symmetric = 0.5 * (entries + entries.transpose());

    GramMatrix gram{grid, std::move(symmetric), 0.0, 0.0, false};
    const Eigen::MatrixXd off = gram.entries - Eigen::MatrixXd(gram.entries.diagonal().asDiagonal());
    gram.diagonal = off.cwiseAbs().maxCoeff() == 0.0;
    if (gram.diagonal) {
        gram.min_eigenvalue = gram.entries.diagonal().minCoeff();
        gram.max_eigenvalue = gram.entries.diagonal().maxCoeff();
    } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram.entries, Eigen::EigenvaluesOnly);
        gram.min_eigenvalue = solver.eigenvalues().minCoeff();
        gram.max_eigenvalue = solver.eigenvalues().maxCoeff();
    }
    return gram;
}

bool check_positive_definite(const GramMatrix& gram, double tol) {
    return gram.min_eigenvalue >= -tol * std::max(1.0, gram.max_eigenvalue);
}

RkhsElement::RkhsElement(Kernel kernel, std::vector<double> centers, std::vector<double> coefficients)
    : kernel_(std::move(kernel)), centers_(std::move(centers)), coefficients_(std::move(coefficients)) {
    if (centers_.size() != coefficients_.size()) {
        throw InvalidArgument("RKHS element needs one coefficient per center");
    }
    for (std::size_t i = 0; i < centers_.size(); ++i) {
        if (!is_valid_point(kernel_.domain(), centers_[i])) {
            throw DomainMismatch("center " + std::to_string(centers_[i]) + " is outside the kernel domain");
        }
        for (std::size_t j = 0; j < i; ++j) {
            // Merging coincident centers would silently change the norm.
            if (centers_[i] == centers_[j]) {
                throw InvalidArgument("coincident centers at t = " + std::to_string(centers_[i]));
            }
        }
    }
}

RkhsElement RkhsElement::scaled(double factor) const {
    std::vector<double> coefficients = coefficients_;
    for (double& a : coefficients) a *= factor;
    return RkhsElement(kernel_, centers_, std::move(coefficients));
}

double rkhs_norm(const RkhsElement& g, double tol) {
    const auto m = g.centers().size();
    if (m == 0) return 0.0;
    Eigen::Map<const Eigen::VectorXd> a(g.coefficients().data(), static_cast<Eigen::Index>(m));
    // Centers need not be sorted, so evaluate the quadratic form directly.
    Eigen::MatrixXd gram(m, m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            const double v = 0.5 * (g.kernel()(g.centers()[i], g.centers()[j]) +
                                    g.kernel()(g.centers()[j], g.centers()[i]));
            gram(i, j) = v;
            gram(j, i) = v;
        }
    }
    const double quadratic = a.dot(gram * a);
    const double scale = std::max(1.0, gram.cwiseAbs().maxCoeff() * a.squaredNorm());
    if (quadratic < -tol * scale) {
        throw IndefiniteGram("quadratic form a'Ka = " + std::to_string(quadratic) + " for '" + g.kernel().label() + "'");
    }
    return std::sqrt(std::max(0.0, quadratic));
}

double eval_rkhs(const RkhsElement& g, double s) {
    double sum = 0.0;
    for (std::size_t i = 0; i < g.centers().size(); ++i) sum += g.coefficients()[i] * g.kernel()(g.centers()[i], s);
    return sum;
}

}  // namespace kernelid
