#pragma once

#include "kernelid/core.hpp"
#include "kernelid/dsri.hpp"
#include "kernelid/signal.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

namespace kernelid {

// A bounded map from time to R^dim (Euclidean norm), with a sup-norm bound.
class BoundedSignal {
public:
    using Fn = std::function<Eigen::VectorXd(double)>;

    BoundedSignal(Fn fn, Eigen::Index dim, double sup_norm, double probe_horizon, std::string label);

    // Scalar signal; sup from the closed form when known, else probed on [0, probe_horizon]
    // (integers or step 0.05 by domain).
    static BoundedSignal scalar(const Signal& s, TimeDomain domain, double probe_horizon = 2048.0);

    Eigen::VectorXd operator()(double t) const { return fn_(t); }
    Eigen::Index dim() const { return dim_; }
    double sup_norm() const { return sup_norm_; }
    double probe_horizon() const { return probe_horizon_; }
    const std::string& label() const { return label_; }

private:
    Fn fn_;
    Eigen::Index dim_;
    double sup_norm_;
    double probe_horizon_;
    std::string label_;
};

// L(g) = sum_t g_t v_t (integral on the continuous domain). Convolution and
// Fourier functionals are the instances v_s = u_{t-s} and v_s = (cos ws, -sin ws).
struct Functional {
    BoundedSignal v;
    double l1_norm_bound = 0.0;  // operator norm on L1
    std::string label;

    static Functional lv(const BoundedSignal& v);
    static Functional convolution(const BoundedSignal& u, double t);
    static Functional fourier(double omega, TimeDomain domain);
};

struct Application {
    Eigen::VectorXd value;
    double horizon = 0.0;
    double l1_norm = 0.0;         // truncated sum of |g|
    double tail_allowance = 0.0;  // bound on the neglected part of |L g|
    double l1_tail = 0.0;         // bound on the neglected part of ||g||_1
};

// Smallest doubling of 64 (discrete) / 12.5 (continuous) past the last
// center whose envelope tail is below 1e-10.
double default_operator_horizon(const RkhsElement& g);

Application apply_functional(const Functional& op, const RkhsElement& g, std::optional<double> horizon = std::nullopt);
// Gridded / closed-form input; the tail uses the signal's own envelope.
Application apply_functional(const Functional& op, const Signal& g, TimeDomain domain, double horizon);

Application apply_lv(const BoundedSignal& v, const RkhsElement& g, std::optional<double> horizon = std::nullopt);
Application convolve(const BoundedSignal& u, double t, const RkhsElement& g, std::optional<double> horizon = std::nullopt);
// value(0) = sum g_t cos(wt), value(1) = -sum g_t sin(wt).
Application fourier(double omega, const RkhsElement& g, std::optional<double> horizon = std::nullopt);

struct OperatorBoundReport {
    std::string operator_label;
    std::string kernel;
    double l1_norm_bound = 0.0;
    double m_of_k = 0.0;
    double m_error_bound = 0.0;
    double rkhs_bound = 0.0;           // l1_norm_bound * m_of_k
    double max_observed_ratio = 0.0;   // |L g| / ||g||_H
    double max_embedding_ratio = 0.0;  // ||g||_1 / ||g||_H
    std::size_t n_samples = 0;
    std::size_t violations = 0;
    std::size_t embedding_violations = 0;
};

struct ContinuityOptions {
    std::size_t max_centers = 12;
    double center_horizon = 32.0;
    MeasureOptions measure;
};

// Samples unit-norm RKHS elements and checks |L g| <= ||L||_1 M(k) and
// ||g||_1 <= M(k) ||g||_H for each; any violation raises BoundViolated.
OperatorBoundReport verify_continuity_bound(const Kernel& kernel, const Functional& op, std::size_t n_samples,
                                            std::uint64_t seed, const ContinuityOptions& options = {});

}  // namespace kernelid
