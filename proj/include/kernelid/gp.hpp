#pragma once

#include "kernelid/core.hpp"
#include "kernelid/dsri.hpp"
#include "kernelid/signal.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace kernelid {

// P(|Z| <= delta) for a standard normal Z.
double phi(double delta);
// Inverse of phi on [0, 1).
double phi_inv(double p);

// splitmix64 of (master_seed, index): the stream seed of path `index`.
std::uint64_t path_seed(std::uint64_t master_seed, std::uint64_t index);

// Standard normals from a seeded stream (Box-Muller on 53-bit uniforms),
// identical on every platform with IEEE doubles and a correctly rounded libm.
std::vector<double> standard_normals(std::uint64_t seed, std::size_t count);

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct GpEnsemble {
    Kernel kernel;
    Signal mean;
    Grid grid;
    Eigen::MatrixXd chol;  // lower triangular, chol * chol^T = Gram + jitter * diag(Gram)
    double jitter = 0.0;   // relative to each diagonal entry
    bool diagonal_factor = false;
    RowMatrix paths;       // n_paths x grid.size()
    std::vector<std::uint64_t> seeds;
};

GpEnsemble sample_paths(const Kernel& kernel, const Signal& mean, const Grid& grid, std::size_t n_paths,
                        std::uint64_t master_seed);

// Per path, sum of w_i |path_i| over grid points t_i < H, for each checkpoint H.
RowMatrix truncated_l1(const GpEnsemble& ensemble, const std::vector<double>& checkpoints);

struct DichotomyConfig {
    std::size_t n_paths = 2000;
    double horizon = 512.0;                  // grid covers [0, horizon)
    double continuous_step = 0.1;
    std::uint64_t seed = 42;
    std::optional<Signal> mean;              // zero when absent
    double min_regression_checkpoint = 16.0;
    double saturation_tolerance = 0.01;
    double slope_tolerance = 0.03;
};

struct DichotomyCheckpoint {
    double horizon = 0.0;
    double mean_l1 = 0.0;
    double se = 0.0;
    double root_sum = 0.0;  // sum (or integral) of k(t,t)^(1/2) over the grid below horizon
};

enum class DichotomyVerdict { Saturates, Grows };
std::string_view to_string(DichotomyVerdict verdict);

struct DichotomyReport {
    std::string kernel;
    std::size_t n_paths = 0;
    std::uint64_t seed = 0;
    double jitter = 0.0;
    std::vector<DichotomyCheckpoint> trace;
    double saturation = 0.0;      // relative increment over the last doubling
    double slope = 0.0;           // mean l1 regressed on the root sum
    double slope_target = 0.0;    // sqrt(2/pi)
    bool slope_within_tolerance = false;
    DichotomyVerdict verdict = DichotomyVerdict::Saturates;
};

DichotomyReport dichotomy_experiment(const Kernel& kernel, const DichotomyConfig& config);

struct ConfidenceRegion {
    double epsilon = 0.0;
    double delta_eps = 0.0;
    Signal mean;
    Signal upper;
    Signal lower;
    MeasureResult area;
};

ConfidenceRegion confidence_region(const Kernel& kernel, const Signal& mean, double epsilon,
                                   std::optional<TailEnvelope> envelope = std::nullopt,
                                   const MeasureOptions& options = {});

struct CoverageReport {
    std::vector<double> pointwise;  // fraction of paths inside I_{t,eps} per grid point
    double region_fraction = 0.0;   // fraction of paths inside every interval
};

CoverageReport coverage(const GpEnsemble& ensemble, double epsilon);

}  // namespace kernelid
