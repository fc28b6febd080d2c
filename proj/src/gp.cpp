#include "kernelid/gp.hpp"

#include "kernelid/error.hpp"
#include "kernelid/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace kernelid {

namespace {

std::string fmt(double x) {
    std::ostringstream out;
    out.precision(12);
    out << x;
    return out.str();
}

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double unit_open(std::uint64_t x) { return (static_cast<double>(x >> 11) + 1.0) * 0x1.0p-53; }  // (0, 1]
double unit_closed(std::uint64_t x) { return static_cast<double>(x >> 11) * 0x1.0p-53; }         // [0, 1)

}  // namespace

double phi(double delta) {
    if (!(delta >= 0.0)) throw NegativeDelta("delta must be >= 0, got " + fmt(delta));
    return std::erf(delta / std::numbers::sqrt2);
}

double phi_inv(double p) {
    if (!(p >= 0.0 && p < 1.0)) throw OutOfRange("probability must lie in [0, 1), got " + fmt(p));
    if (p == 0.0) return 0.0;
    double lo = 0.0;
    double hi = 40.0;
    double x = 1.0;
    for (int iter = 0; iter < 200; ++iter) {
        const double f = phi(x) - p;
        if (f == 0.0) return x;
        if (f < 0.0) {
            lo = x;
        } else {
            hi = x;
        }
        const double slope = std::sqrt(2.0 / std::numbers::pi) * std::exp(-0.5 * x * x);
        double next = x - f / slope;
        if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
        if (std::fabs(next - x) <= 1e-15 * std::max(1.0, x) || hi - lo <= 1e-15 * std::max(1.0, lo)) return next;
        x = next;
    }
    return x;
}

std::uint64_t path_seed(std::uint64_t master_seed, std::uint64_t index) {
    std::uint64_t state = master_seed ^ (0xD1B54A32D192ED03ULL * (index + 1));
    splitmix64(state);
    return splitmix64(state);
}

std::vector<double> standard_normals(std::uint64_t seed, std::size_t count) {
    std::vector<double> out;
    out.reserve(count + 1);
    std::mt19937_64 rng(seed);
    while (out.size() < count) {
        const double u1 = unit_open(rng());
        const double u2 = unit_closed(rng());
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        out.push_back(radius * std::cos(angle));
        out.push_back(radius * std::sin(angle));
    }
    out.resize(count);
    return out;
}

GpEnsemble sample_paths(const Kernel& kernel, const Signal& mean, const Grid& grid, std::size_t n_paths,
                        std::uint64_t master_seed) {
    if (n_paths == 0) throw InvalidArgument("n_paths must be >= 1");
    const GramMatrix gram = assemble_gram(kernel, grid);
    if (!check_positive_definite(gram)) {
        throw IndefiniteGram("Gram of '" + kernel.label() + "' has min eigenvalue " + fmt(gram.min_eigenvalue));
    }
    const auto n = static_cast<Eigen::Index>(grid.size());
    const Eigen::VectorXd diag = gram.entries.diagonal();

    Eigen::MatrixXd chol = Eigen::MatrixXd::Zero(n, n);
    double jitter = 0.0;
    if (gram.diagonal) {
        for (Eigen::Index i = 0; i < n; ++i) chol(i, i) = std::sqrt(std::max(0.0, diag(i)));
    } else {
        // Rows with zero variance are identically zero (Cauchy-Schwarz) and are
        // left out of the factorization. Subnormal variances count as zero:
        // their entries have no relative precision left and their paths are
        // below 1.5e-154 in magnitude.
        std::vector<Eigen::Index> active;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (diag(i) >= std::numeric_limits<double>::min()) active.push_back(i);
        }
        const auto m = static_cast<Eigen::Index>(active.size());
        // Gram + jitter * diag(Gram) = S (C + jitter I) S with S = diag(Gram)^(1/2)
        // and C the correlation matrix; factoring C keeps fast-decaying
        // diagonals from wrecking the pivots.
        Eigen::VectorXd scale(m);
        for (Eigen::Index i = 0; i < m; ++i) scale(i) = std::sqrt(diag(active[i]));
        Eigen::MatrixXd corr(m, m);
        for (Eigen::Index i = 0; i < m; ++i) {
            for (Eigen::Index j = 0; j < m; ++j) {
                corr(i, j) = i == j ? 1.0 : std::clamp(gram.entries(active[i], active[j]) / scale(i) / scale(j), -1.0, 1.0);
            }
        }
        bool ok = m == 0;
        for (jitter = 1e-10; !ok && jitter <= 1e-6 * (1.0 + 1e-9); jitter *= 10.0) {
            Eigen::MatrixXd shifted = corr;
            shifted.diagonal().array() += jitter;
            Eigen::LLT<Eigen::MatrixXd> llt(shifted);
            if (llt.info() != Eigen::Success) continue;
            const Eigen::MatrixXd lower = llt.matrixL();
            if (!lower.allFinite()) continue;
            for (Eigen::Index i = 0; i < m; ++i) {
                for (Eigen::Index j = 0; j <= i; ++j) chol(active[i], active[j]) = scale(i) * lower(i, j);
            }
            ok = true;
            break;
        }
        if (!ok) throw CholeskyFailure("'" + kernel.label() + "' on " + std::to_string(n) + " points after jitter 1e-6");
        if (m == 0) jitter = 0.0;
    }

    Eigen::VectorXd mean_values(n);
    for (Eigen::Index i = 0; i < n; ++i) mean_values(i) = mean(grid.point(static_cast<std::size_t>(i)));

    GpEnsemble ensemble{kernel, mean, grid, std::move(chol), jitter, gram.diagonal, RowMatrix(n_paths, n), {}};
    ensemble.seeds.resize(n_paths);
    for (std::size_t r = 0; r < n_paths; ++r) ensemble.seeds[r] = path_seed(master_seed, r);

    const Eigen::MatrixXd& L = ensemble.chol;
    const bool diagonal = ensemble.diagonal_factor;
    parallel_for(n_paths, [&](std::size_t begin, std::size_t end) {
        for (std::size_t r = begin; r < end; ++r) {
            const auto z_values = standard_normals(ensemble.seeds[r], static_cast<std::size_t>(n));
            const Eigen::Map<const Eigen::VectorXd> z(z_values.data(), n);
            Eigen::VectorXd path;
            if (diagonal) {
                path = L.diagonal().cwiseProduct(z);
            } else {
                path = L.triangularView<Eigen::Lower>() * z;
            }
            ensemble.paths.row(static_cast<Eigen::Index>(r)) = (path + mean_values).transpose();
        }
    });
    return ensemble;
}

RowMatrix truncated_l1(const GpEnsemble& ensemble, const std::vector<double>& checkpoints) {
    const auto& grid = ensemble.grid;
    for (std::size_t c = 1; c < checkpoints.size(); ++c) {
        if (!(checkpoints[c] >= checkpoints[c - 1])) throw InvalidArgument("checkpoints must be nondecreasing");
    }
    const auto n_paths = ensemble.paths.rows();
    RowMatrix out(n_paths, static_cast<Eigen::Index>(checkpoints.size()));
    parallel_for(static_cast<std::size_t>(n_paths), [&](std::size_t begin, std::size_t end) {
        for (std::size_t r = begin; r < end; ++r) {
            double running = 0.0;
            std::size_t i = 0;
            for (std::size_t c = 0; c < checkpoints.size(); ++c) {
                while (i < grid.size() && grid.point(i) < checkpoints[c]) {
                    running += grid.weight(i) * std::fabs(ensemble.paths(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i)));
                    ++i;
                }
                out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = running;
            }
        }
    });
    return out;
}

std::string_view to_string(DichotomyVerdict verdict) {
    return verdict == DichotomyVerdict::Saturates ? "saturates" : "grows";
}

DichotomyReport dichotomy_experiment(const Kernel& kernel, const DichotomyConfig& config) {
    const bool discrete = kernel.domain() == TimeDomain::Discrete;
    const double step = discrete ? 1.0 : config.continuous_step;
    const auto n_points = static_cast<std::size_t>(std::llround(config.horizon / step));
    if (n_points < 4) throw InvalidArgument("dichotomy horizon too short");
    std::vector<double> points(n_points);
    for (std::size_t i = 0; i < n_points; ++i) points[i] = step * static_cast<double>(i);
    // Weights step each: the ensemble l1 is a left Riemann sum of the path.
    const Grid grid(kernel.domain(), points, std::vector<double>(n_points, step));

    const Signal mean = config.mean.value_or(Signal::zero());
    const GpEnsemble ensemble = sample_paths(kernel, mean, grid, config.n_paths, config.seed);

    std::vector<double> checkpoints;
    for (double h = step * 4.0; h < config.horizon * (1.0 - 1e-12); h *= 2.0) checkpoints.push_back(h);
    checkpoints.push_back(config.horizon);
    const RowMatrix l1 = truncated_l1(ensemble, checkpoints);

    DichotomyReport report;
    report.kernel = kernel.label();
    report.n_paths = config.n_paths;
    report.seed = config.seed;
    report.jitter = ensemble.jitter;
    report.slope_target = std::sqrt(2.0 / std::numbers::pi);

    const double n = static_cast<double>(config.n_paths);
    double root_sum = 0.0;
    std::size_t i = 0;
    for (std::size_t c = 0; c < checkpoints.size(); ++c) {
        while (i < n_points && points[i] < checkpoints[c]) {
            root_sum += step * kernel.diagonal_root(points[i]);
            ++i;
        }
        const Eigen::VectorXd column = l1.col(static_cast<Eigen::Index>(c));
        const double m = column.mean();
        const double var = n > 1 ? (column.array() - m).square().sum() / (n - 1.0) : 0.0;
        report.trace.push_back({checkpoints[c], m, std::sqrt(var / n), root_sum});
    }

    const auto& last = report.trace.back();
    const auto& prev = report.trace[report.trace.size() - 2];
    report.saturation = last.mean_l1 > 0.0 ? (last.mean_l1 - prev.mean_l1) / last.mean_l1 : 0.0;
    report.verdict = report.saturation <= config.saturation_tolerance ? DichotomyVerdict::Saturates
                                                                      : DichotomyVerdict::Grows;

    double sx = 0, sy = 0, sxx = 0, sxy = 0, count = 0;
    for (const auto& cp : report.trace) {
        if (cp.horizon < config.min_regression_checkpoint) continue;
        sx += cp.root_sum;
        sy += cp.mean_l1;
        sxx += cp.root_sum * cp.root_sum;
        sxy += cp.root_sum * cp.mean_l1;
        count += 1.0;
    }
    const double denom = count * sxx - sx * sx;
    if (count >= 2.0 && denom > 0.0) report.slope = (count * sxy - sx * sy) / denom;
    report.slope_within_tolerance =
        std::fabs(report.slope - report.slope_target) <= config.slope_tolerance * report.slope_target;
    return report;
}

ConfidenceRegion confidence_region(const Kernel& kernel, const Signal& mean, double epsilon,
                                   std::optional<TailEnvelope> envelope, const MeasureOptions& options) {
    if (!(epsilon >= 0.0 && epsilon < 1.0)) throw OutOfRange("epsilon must lie in [0, 1), got " + fmt(epsilon));
    const double delta = phi_inv(epsilon);
    MeasureResult area;
    if (delta == 0.0) {
        area.status = MeasureStatus::Finite;
        area.method = MeasureMethod::ClosedForm;
    } else {
        area = dsri_measure(kernel, envelope, options);
        if (area.finite()) {
            area.value *= 2.0 * delta;
            area.error_bound *= 2.0 * delta;
        }
        for (auto& tp : area.partial_sum_trace) {
            tp.partial *= 2.0 * delta;
            tp.tail_bound *= 2.0 * delta;
        }
    }
    Signal upper = Signal::from_function(
        [kernel, mean, delta](double t) { return mean(t) + delta * kernel.diagonal_root(t); }, "upper");
    Signal lower = Signal::from_function(
        [kernel, mean, delta](double t) { return mean(t) - delta * kernel.diagonal_root(t); }, "lower");
    return {epsilon, delta, mean, std::move(upper), std::move(lower), std::move(area)};
}

CoverageReport coverage(const GpEnsemble& ensemble, double epsilon) {
    const double delta = phi_inv(epsilon);
    const auto n = ensemble.paths.cols();
    const auto n_paths = ensemble.paths.rows();
    CoverageReport report;
    report.pointwise.assign(static_cast<std::size_t>(n), 0.0);
    std::size_t all_inside = 0;
    for (Eigen::Index r = 0; r < n_paths; ++r) {
        bool inside_all = true;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double t = ensemble.grid.point(static_cast<std::size_t>(i));
            const double half = delta * ensemble.kernel.diagonal_root(t);
            const bool inside = std::fabs(ensemble.paths(r, i) - ensemble.mean(t)) <= half;
            if (inside) report.pointwise[static_cast<std::size_t>(i)] += 1.0;
            inside_all = inside_all && inside;
        }
        if (inside_all) ++all_inside;
    }
    for (double& f : report.pointwise) f /= static_cast<double>(n_paths);
    report.region_fraction = static_cast<double>(all_inside) / static_cast<double>(n_paths);
    return report;
}

}  // namespace kernelid
