#pragma once

#include "kernelid/core.hpp"
#include "kernelid/signal.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace kernelid::zoo {

enum class ClassicFamily { DI, DC, TC, SS, iTC, iSS, iTS };

struct ClassicParams {
    double alpha = 0.5;
    double beta = 0.0;   // iTC / iSS / iTS
    double gamma = 0.0;  // DC
};

// Diagonal, diagonal/correlated, tuned/correlated, stable spline and the
// integral stable spline kernels, with closed-form diagonals attached.
Kernel make_classic(ClassicFamily family, const ClassicParams& params, TimeDomain domain);

inline Kernel make_di(double alpha, TimeDomain domain) { return make_classic(ClassicFamily::DI, {alpha, 0.0, 0.0}, domain); }
inline Kernel make_dc(double alpha, double gamma, TimeDomain domain) {
    return make_classic(ClassicFamily::DC, {alpha, 0.0, gamma}, domain);
}
inline Kernel make_tc(double alpha, TimeDomain domain) { return make_classic(ClassicFamily::TC, {alpha, 0.0, 0.0}, domain); }
inline Kernel make_ss(double alpha, TimeDomain domain) { return make_classic(ClassicFamily::SS, {alpha, 0.0, 0.0}, domain); }
inline Kernel make_itc(double alpha, double beta, TimeDomain domain) {
    return make_classic(ClassicFamily::iTC, {alpha, beta, 0.0}, domain);
}
inline Kernel make_iss(double alpha, double beta, TimeDomain domain) {
    return make_classic(ClassicFamily::iSS, {alpha, beta, 0.0}, domain);
}
inline Kernel make_its(double alpha, double beta, TimeDomain domain) {
    return make_classic(ClassicFamily::iTS, {alpha, beta, 0.0}, domain);
}

// sum_i lambda_i * alpha_i^((s+t)/2)
Kernel make_rank_n_exponential(const std::vector<double>& lambda, const std::vector<double>& alpha, TimeDomain domain);

// n-th order stable spline on the continuous domain, evaluated in closed form.
Kernel make_stable_spline_n(int n, double beta);

// k_v(s,t) = v_s v_t
Kernel make_kv(const Signal& v, TimeDomain domain);

// v_s * base(s,t) * v_t; base must pass a stationarity spot check.
Kernel make_amls(const Kernel& base, const Signal& v);

// Stationary building blocks for AMLS.
Kernel make_zero(TimeDomain domain);
Kernel make_constant(double value, TimeDomain domain);
// gamma^|s-t|; gamma in (-1,1) discrete, (0,1) continuous.
Kernel make_exponential_stationary(double gamma, TimeDomain domain);
// exp(-(s-t)^2 / (2 l^2))
Kernel make_gaussian_stationary(double length_scale, TimeDomain domain);

struct StateSpaceRealization {
    Eigen::MatrixXd A;
    Eigen::VectorXd b;
    Eigen::RowVectorXd c;
    double d = 0.0;
    Eigen::MatrixXd Q;
    Signal v = Signal::zero();
};

struct SimulationInducedOptions {
    std::size_t memo_horizon = 512;  // A^t memoized below this, squared beyond
    double quadrature_tol = 1e-9;    // continuous integral term, absolute
};

// Bound ||Phi_t|| <= gain * rate^t with Phi_t = A^t (discrete) or e^{At}
// (continuous), obtained from a contracting power of the transition matrix.
struct TransitionBound {
    double gain = 0.0;
    double rate = 0.0;
};

void validate_realization(const StateSpaceRealization& realization, TimeDomain domain);
TransitionBound transition_bound(const Eigen::MatrixXd& A, TimeDomain domain);

Kernel make_simulation_induced(const StateSpaceRealization& realization, TimeDomain domain,
                               const SimulationInducedOptions& options = {});

// Magnitude of the noise-driven diagonal summand
// sum_{k<t} v_k^2 (c A^{t-1-k} b)^2 (discrete only).
double simulation_induced_noise_term(const StateSpaceRealization& realization, long t);

// Integrable but not DSRI: 1/(1+s)^2 on the diagonal, zero elsewhere
// (Discrete), and its cosine-bump extension to the continuous domain.
Kernel make_counterexample(TimeDomain kind);

}  // namespace kernelid::zoo
