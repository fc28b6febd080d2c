#pragma once

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace kernelid {

// Discrete indexes the non-negative integers, Continuous the non-negative
// reals. Aggregates (M(k), double sums, l1 norms) are sums on the former
// and integrals on the latter.
enum class TimeDomain { Discrete, Continuous };

std::string_view to_string(TimeDomain domain);
TimeDomain time_domain_from_string(std::string_view text);

// Pointwise upper bound on a nonnegative profile (usually the square root of
// a kernel diagonal): profile(t) <= scale * rate^t (Geometric) or
// profile(t) <= scale * t^(-exponent) (PowerLaw), for every t >= onset.
struct TailEnvelope {
    enum class Form { Geometric, PowerLaw, None };

    Form form = Form::None;
    double scale = 0.0;
    double rate = 0.0;
    double exponent = 0.0;
    double onset = 0.0;
    // False for envelopes obtained by fitting or by probing a supremum; such
    // envelopes never back a bound-bearing claim.
    bool certified = true;

    static TailEnvelope geometric(double scale, double rate, double onset = 0.0);
    static TailEnvelope power_law(double scale, double exponent, double onset = 1.0);
    static TailEnvelope none();

    bool present() const { return form != Form::None; }
    double operator()(double t) const;
    // Envelope of profile^q.
    TailEnvelope raised(double q) const;
    TailEnvelope scaled(double factor) const;
    bool summable(TimeDomain domain) const;
    // Sum over integers t >= from (Discrete) or integral over [from, inf)
    // (Continuous). Requires from >= onset; +inf when not summable.
    double tail(TimeDomain domain, double from) const;
    // Smallest horizon from which tail() is valid.
    double first_valid_horizon(TimeDomain domain) const;
};

// Envelope of the pointwise sum of two profiles bounded by a and b.
TailEnvelope envelope_sum(const TailEnvelope& a, const TailEnvelope& b);
// Envelope of the pointwise product of two profiles bounded by a and b.
TailEnvelope envelope_product(const TailEnvelope& a, const TailEnvelope& b);

// A symmetric positive-definite kernel on a time domain. Optional metadata:
// a closed-form diagonal, a closed-form M(k), an analytic envelope on
// k(t,t)^(1/2), and a band b such that k(s,t) = 0 whenever |s-t| > b.
class Kernel {
public:
    using EvalFn = std::function<double(double, double)>;
    using DiagonalFn = std::function<double(double)>;

    Kernel(TimeDomain domain, EvalFn eval, std::string label);

    TimeDomain domain() const { return domain_; }
    const std::string& label() const { return label_; }

    double operator()(double s, double t) const { return eval_(s, t); }
    double eval(double s, double t) const { return eval_(s, t); }
    double diagonal(double t) const { return diagonal_ ? diagonal_(t) : eval_(t, t); }
    // k(t,t)^(1/2), clamped at zero against rounding.
    double diagonal_root(double t) const;

    bool has_closed_diagonal() const { return static_cast<bool>(diagonal_); }
    const std::optional<double>& closed_form_measure() const { return closed_form_measure_; }
    const std::optional<TailEnvelope>& envelope() const { return envelope_; }
    const std::optional<double>& band() const { return band_; }
    bool stationary() const { return stationary_; }

    Kernel& set_label(std::string label);
    Kernel& set_diagonal(DiagonalFn diagonal);
    Kernel& set_closed_form_measure(double value);
    Kernel& set_envelope(TailEnvelope envelope);
    Kernel& set_band(double band);
    Kernel& set_stationary(bool stationary);
    Kernel& clear_closed_form_measure();
    Kernel& clear_envelope();
    Kernel& clear_band();

private:
    TimeDomain domain_;
    EvalFn eval_;
    DiagonalFn diagonal_;
    std::string label_;
    std::optional<double> closed_form_measure_;
    std::optional<TailEnvelope> envelope_;
    std::optional<double> band_;
    bool stationary_ = false;
};

// Sample points with quadrature weights (all 1 for Discrete; composite
// trapezoid for Continuous).
class Grid {
public:
    Grid(TimeDomain domain, std::vector<double> points, std::vector<double> weights);

    // Points 0, 1, ..., n-1.
    static Grid discrete_range(std::size_t n);
    // start, start+step, ..., up to end inclusive (within rounding).
    static Grid uniform(TimeDomain domain, double start, double step, double end);
    // Trapezoid weights for Continuous, unit weights for Discrete.
    static Grid from_points(TimeDomain domain, std::vector<double> points);

    TimeDomain domain() const { return domain_; }
    std::size_t size() const { return points_.size(); }
    bool empty() const { return points_.empty(); }
    std::span<const double> points() const { return points_; }
    std::span<const double> weights() const { return weights_; }
    double point(std::size_t i) const { return points_[i]; }
    double weight(std::size_t i) const { return weights_[i]; }

private:
    TimeDomain domain_;
    std::vector<double> points_;
    std::vector<double> weights_;
};

struct GramMatrix {
    Grid grid;
    Eigen::MatrixXd entries;
    double min_eigenvalue = 0.0;
    double max_eigenvalue = 0.0;
    bool diagonal = false;  // every off-diagonal entry is exactly zero
};

inline constexpr double kDefaultPdTolerance = 1e-8;

bool is_valid_point(TimeDomain domain, double t);

GramMatrix assemble_gram(const Kernel& kernel, const Grid& grid);
// min_eigenvalue >= -tol * max(1, max_eigenvalue).
bool check_positive_definite(const GramMatrix& gram, double tol = kDefaultPdTolerance);

// g = sum_i a_i k(t_i, .), a finite span of kernel sections.
class RkhsElement {
public:
    RkhsElement(Kernel kernel, std::vector<double> centers, std::vector<double> coefficients);

    const Kernel& kernel() const { return kernel_; }
    std::span<const double> centers() const { return centers_; }
    std::span<const double> coefficients() const { return coefficients_; }

    RkhsElement scaled(double factor) const;

private:
    Kernel kernel_;
    std::vector<double> centers_;
    std::vector<double> coefficients_;
};

double rkhs_norm(const RkhsElement& g, double tol = kDefaultPdTolerance);
double eval_rkhs(const RkhsElement& g, double s);

}  // namespace kernelid
