#pragma once

#include "kernelid/core.hpp"

#include <functional>
#include <optional>
#include <string>

namespace kernelid {

// alpha*k + beta*h, alpha, beta >= 0.
Kernel combine_linear(const Kernel& k, const Kernel& h, double alpha, double beta);

// Pointwise product k*h. When h carries no envelope its diagonal sup is
// probed over the default horizon and the resulting envelope is marked
// uncertified.
Kernel combine_product(const Kernel& k, const Kernel& h);

// sup of h(t,t) over the probe grid (discrete 0..2048, continuous step 0.05 to 200).
double probe_diagonal_sup(const Kernel& h, std::optional<double> horizon = std::nullopt);

// Maps from the integers (sampling) or from the domain to itself
// (reparameterization). Built from an affine rule or from an arbitrary
// function whose increments are probed.
struct SamplingMap {
    std::function<double(double)> sigma;
    double min_gap = 0.0;  // inf of sigma(t+1) - sigma(t) over the probe range
    bool affine = false;
    double scale = 1.0;
    double offset = 0.0;
    std::string label;

    static SamplingMap affine_map(double scale, double offset = 0.0);
    static SamplingMap from_function(std::function<double(double)> sigma, std::string label,
                                     std::size_t probe_horizon = 2048);
};

// k_sigma(s,t) = k(sigma(s), sigma(t)) on the integers.
Kernel sample_kernel(const Kernel& k, const SamplingMap& sigma);

struct ReparamMap {
    std::function<double(double)> rho;
    double min_derivative = 0.0;  // Continuous: probed inf of rho'; Discrete: inf increment
    bool affine = false;
    double scale = 1.0;
    double offset = 0.0;
    std::string label;

    // rho(t) = scale*t + offset; scale > 0, offset >= 0 (integers on Discrete).
    static ReparamMap affine_map(double scale, double offset, TimeDomain domain);
    static ReparamMap from_function(std::function<double(double)> rho, std::string label, TimeDomain domain);
};

// h(s,t) = k(rho(s), rho(t)).
Kernel reparameterize(const Kernel& k, const ReparamMap& rho);

enum class DominanceMode { Full, DiagonalOnly };

std::string_view to_string(DominanceMode mode);

struct DominanceCertificate {
    std::string dominated;
    std::string dominating;
    double constant_C = 0.0;
    DominanceMode mode = DominanceMode::Full;
    double probe_horizon = 0.0;
    double max_ratio_observed = 0.0;
    double witness_s = 0.0;  // where the max ratio was seen
    double witness_t = 0.0;
};

inline constexpr double kDominanceMargin = 1e-6;
inline constexpr double kVanishingTolerance = 1e-14;

// |k(s,t)| <= C |h(s,t)| on the probe grid, with C = (1+margin)*max ratio.
DominanceCertificate check_dominance(const Kernel& k, const Kernel& h, DominanceMode mode,
                                     std::optional<double> horizon = std::nullopt,
                                     double margin = kDominanceMargin);

}  // namespace kernelid
