#include "kernelid/acceptance.hpp"

#include "kernelid/algebra.hpp"
#include "kernelid/dsri.hpp"
#include "kernelid/error.hpp"
#include "kernelid/gp.hpp"
#include "kernelid/operators.hpp"
#include "kernelid/report_io.hpp"
#include "kernelid/spec_json.hpp"
#include "kernelid/zoo.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <random>

namespace kernelid {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

CriterionResult make(int id, const char* module, const char* title) {
    CriterionResult r;
    r.id = id;
    r.module = module;
    r.title = title;
    r.detail = json::object();
    return r;
}

// H_n from the asymptotic expansion; independent of any summation.
double harmonic_asymptotic(double n) {
    constexpr double euler_gamma = 0.57721566490153286061;
    const double n2 = n * n;
    return std::log(n) + euler_gamma + 1.0 / (2.0 * n) - 1.0 / (12.0 * n2) + 1.0 / (120.0 * n2 * n2) -
           1.0 / (252.0 * n2 * n2 * n2) + 1.0 / (240.0 * n2 * n2 * n2 * n2);
}

}  // namespace

CriterionResult criterion_closed_form_series(std::uint64_t) {
    auto r = make(1, "dsri-analysis", "closed-form vs series M(k) for TC(0.25)");
    const auto start = Clock::now();
    const Kernel k = zoo::make_tc(0.25, TimeDomain::Discrete);
    MeasureOptions options;
    options.allow_closed_form = false;
    const MeasureResult m = dsri_measure(k, std::nullopt, options);
    r.seconds = seconds_since(start);
    const double exact = 2.0;
    const double diff = std::fabs(m.value - exact);
    r.detail = {{"value", m.value},
                {"method", to_string(m.method)},
                {"error_bound", m.error_bound},
                {"abs_error", diff},
                {"within_1s", r.seconds < 1.0}};
    r.pass = m.certified() && m.method == MeasureMethod::SeriesWithTail && diff <= m.error_bound && diff <= 1e-9 &&
             r.seconds < 1.0;
    return r;
}

CriterionResult criterion_counterexample_double_sum(std::uint64_t) {
    auto r = make(2, "dsri-analysis", "counterexample double sum and divergent M(k)");
    const Kernel k = zoo::make_counterexample(TimeDomain::Discrete);
    const MeasureResult integ = integrability_measure(k);
    const double target = std::numbers::pi * std::numbers::pi / 6.0;
    const double diff = std::fabs(integ.value - target);
    const MeasureResult m = dsri_measure(k);
    json partials = json::array();
    bool harmonic_ok = true;
    for (double t : {100.0, 10000.0}) {
        const double partial = dsri_partial_sum(k, t);
        const double h = harmonic_asymptotic(t);
        harmonic_ok = harmonic_ok && std::fabs(partial - h) <= 1e-12;
        partials.push_back({{"T", t}, {"partial", partial}, {"harmonic", h}, {"abs_error", std::fabs(partial - h)}});
    }
    r.detail = {{"integrability", integ.value},
                {"error_bound", integ.error_bound},
                {"abs_error", diff},
                {"dsri_status", to_string(m.status)},
                {"dsri_trace_length", m.partial_sum_trace.size()},
                {"harmonic_checks", partials}};
    r.pass = integ.certified() && diff <= 1e-6 && diff <= integ.error_bound && m.status == MeasureStatus::Divergent &&
             !m.partial_sum_trace.empty() && harmonic_ok;
    return r;
}

CriterionResult criterion_hierarchy(std::uint64_t seed) {
    auto r = make(3, "dsri-analysis", "hierarchy consistency over the zoo");
    const auto start = Clock::now();
    ProbeOptions probe;
    probe.seed = seed;
    json kernels = json::object();
    bool ok = true;
    std::string failure;
    for (const auto& entry : standard_zoo()) {
        try {
            const Kernel k = build_kernel(entry.spec);
            const ClassReport report = classify(k, std::nullopt, {}, probe);
            kernels[entry.name] = {{"dsri", to_string(report.dsri.state)},
                                   {"integrable", to_string(report.integrable.state)},
                                   {"finite_trace", to_string(report.finite_trace.state)},
                                   {"square_integrable", to_string(report.square_integrable.state)},
                                   {"stable_probe", to_string(report.stable_probe.verdict)}};
            if (entry.dsri) {
                // Every DSRI kernel is integrable.
                if (report.dsri.state != FlagState::Yes || report.integrable.state != FlagState::Yes) {
                    ok = false;
                    failure += entry.name + ": expected dsri and integrable; ";
                }
            } else if (report.dsri.state != FlagState::No || report.integrable.state != FlagState::Yes ||
                       report.finite_trace.state != FlagState::Yes ||
                       report.square_integrable.state != FlagState::Yes) {
                ok = false;
                failure += entry.name + ": expected {no, yes, yes, yes}; ";
            }
        } catch (const std::exception& e) {
            ok = false;
            failure += entry.name + ": " + e.what() + "; ";
        }
    }
    r.seconds = seconds_since(start);
    r.detail = {{"kernels", kernels}, {"within_30s", r.seconds < 30.0}};
    if (!failure.empty()) r.detail["failures"] = failure;
    r.pass = ok && r.seconds < 30.0;
    return r;
}

CriterionResult criterion_dominance(std::uint64_t) {
    auto r = make(4, "kernel-algebra", "dominance pairings transfer DSRI");
    const double alpha = 0.5;
    const double beta = 0.25;
    const auto d = TimeDomain::Discrete;
    const Kernel rne = zoo::make_rank_n_exponential({1.0}, {alpha}, d);
    const Kernel rne3 = zoo::make_rank_n_exponential({1.0}, {alpha * alpha * alpha}, d);
    struct Pair {
        Kernel k;
        const Kernel* h;
        DominanceMode mode;
        bool unit_constant;
    };
    const std::vector<Pair> pairs = {
        {zoo::make_di(alpha, d), &rne, DominanceMode::Full, true},
        {zoo::make_dc(alpha, 0.5, d), &rne, DominanceMode::Full, true},
        {zoo::make_tc(alpha, d), &rne, DominanceMode::Full, true},
        {zoo::make_itc(alpha, beta, d), &rne, DominanceMode::Full, true},
        {zoo::make_ss(alpha, d), &rne3, DominanceMode::DiagonalOnly, false},
        {zoo::make_iss(alpha, beta, d), &rne3, DominanceMode::DiagonalOnly, false},
    };
    bool ok = true;
    json certs = json::array();
    for (const auto& p : pairs) {
        json entry;
        try {
            const DominanceCertificate c = check_dominance(p.k, *p.h, p.mode);
            const MeasureResult mk = dsri_measure(p.k);
            const MeasureResult mh = dsri_measure(*p.h);
            const bool constant_ok = p.unit_constant ? c.constant_C <= 1.0 + 1e-6 : std::isfinite(c.constant_C);
            const bool finite = mk.certified() && mh.certified();
            ok = ok && constant_ok && finite;
            entry = to_json(c);
            entry["m_dominated"] = mk.value;
            entry["m_dominating"] = mh.value;
            entry["pass"] = constant_ok && finite;
        } catch (const NotDominated& e) {
            ok = false;
            entry = {{"dominated", p.k.label()}, {"error", e.what()}, {"pass", false}};
        }
        certs.push_back(entry);
    }
    r.detail = {{"certificates", certs}};
    r.pass = ok;
    return r;
}

CriterionResult criterion_stable_spline_diagonal(std::uint64_t seed) {
    auto r = make(5, "kernel-zoo", "n-th order stable spline diagonal");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 10.0);
    double worst = 0.0;
    for (int n = 1; n <= 3; ++n) {
        const Kernel k = zoo::make_stable_spline_n(n, 1.0);
        const double fact = std::tgamma(static_cast<double>(n));
        for (int i = 0; i < 50; ++i) {
            const double t = unit(rng);
            const double expected = std::exp(-(2.0 * n - 1.0) * t) / ((2.0 * n - 1.0) * fact * fact);
            worst = std::max(worst, std::fabs(k(t, t) - expected));
        }
    }
    r.detail = {{"max_abs_error", worst}, {"samples", 150}};
    r.pass = worst <= 1e-9;
    return r;
}

CriterionResult criterion_gp_mean_l1(std::uint64_t seed) {
    auto r = make(6, "gp-stability", "GP mean l1 law for TC(0.5)");
    const auto start = Clock::now();
    const Kernel k = zoo::make_tc(0.5, TimeDomain::Discrete);
    const std::size_t n_paths = 10000;
    const GpEnsemble ensemble = sample_paths(k, Signal::zero(), Grid::discrete_range(512), n_paths, seed);
    const RowMatrix l1 = truncated_l1(ensemble, {512.0});
    const Eigen::VectorXd column = l1.col(0);
    const double mean = column.mean();
    const double sd = std::sqrt((column.array() - mean).square().sum() / (static_cast<double>(n_paths) - 1.0));
    const double se = sd / std::sqrt(static_cast<double>(n_paths));
    double root_sum = 0.0;
    for (int t = 0; t < 512; ++t) root_sum += std::pow(std::sqrt(0.5), t);
    const double expected = std::sqrt(2.0 / std::numbers::pi) * root_sum;
    r.seconds = seconds_since(start);
    r.detail = {{"mean_l1", mean},
                {"se", se},
                {"expected", expected},
                {"z_score", (mean - expected) / se},
                {"jitter", ensemble.jitter},
                {"within_60s", r.seconds < 60.0}};
    r.pass = std::fabs(mean - expected) <= 3.0 * se && r.seconds < 60.0;
    return r;
}

CriterionResult criterion_dichotomy(std::uint64_t seed) {
    auto r = make(7, "gp-stability", "sample-path dichotomy");
    bool ok = true;
    json kernels = json::object();

    DichotomyConfig counter;
    counter.n_paths = 2000;
    counter.horizon = 4096.0;
    counter.seed = seed;
    const Kernel ce = zoo::make_counterexample(TimeDomain::Discrete);
    const DichotomyReport plain = dichotomy_experiment(ce, counter);
    counter.mean = Signal::geometric(1.0, 0.5);
    const DichotomyReport shifted = dichotomy_experiment(ce, counter);
    const bool ce_ok = plain.slope_within_tolerance && plain.verdict == DichotomyVerdict::Grows &&
                       shifted.verdict == plain.verdict;
    ok = ok && ce_ok;
    kernels["counterexample"] = {{"slope", plain.slope},
                                 {"slope_target", plain.slope_target},
                                 {"saturation", plain.saturation},
                                 {"verdict", to_string(plain.verdict)},
                                 {"shifted_verdict", to_string(shifted.verdict)},
                                 {"shifted_slope", shifted.slope},
                                 {"pass", ce_ok}};

    for (const auto& entry : standard_zoo()) {
        if (!entry.dsri) continue;
        try {
        const Kernel k = build_kernel(entry.spec);
        DichotomyConfig config;
        config.n_paths = 2000;
        config.seed = seed;
        config.horizon = k.domain() == TimeDomain::Discrete ? 512.0 : 51.2;
        const DichotomyReport a = dichotomy_experiment(k, config);
        config.mean = Signal::geometric(1.0, 0.5);
        const DichotomyReport b = dichotomy_experiment(k, config);
        const bool entry_ok = a.saturation <= 0.01 && a.verdict == DichotomyVerdict::Saturates && b.verdict == a.verdict;
        ok = ok && entry_ok;
        kernels[entry.name] = {{"saturation", a.saturation},
                               {"shifted_saturation", b.saturation},
                               {"verdict", to_string(a.verdict)},
                               {"shifted_verdict", to_string(b.verdict)},
                               {"pass", entry_ok}};
        } catch (const std::exception& e) {
            ok = false;
            kernels[entry.name] = {{"error", e.what()}, {"pass", false}};
        }
    }
    r.detail = {{"kernels", kernels}};
    r.pass = ok;
    return r;
}

CriterionResult criterion_confidence_region(std::uint64_t) {
    auto r = make(8, "gp-stability", "confidence region area");
    const Kernel k = zoo::make_tc(0.25, TimeDomain::Discrete);
    const ConfidenceRegion region = confidence_region(k, Signal::zero(), 0.95);
    // two-sided 95% normal quantile
    const double expected = 2.0 * 1.959963984540054 * 2.0;
    const ConfidenceRegion ce = confidence_region(zoo::make_counterexample(TimeDomain::Discrete), Signal::zero(), 0.95);
    r.detail = {{"area", region.area.value},
                {"expected", expected},
                {"delta_eps", region.delta_eps},
                {"counterexample_area", to_string(ce.area.status)}};
    r.pass = region.area.finite() && std::fabs(region.area.value - expected) <= 1e-3 &&
             ce.area.status == MeasureStatus::Divergent;
    return r;
}

CriterionResult criterion_operator_bound(std::uint64_t seed) {
    auto r = make(9, "operator-lab", "operator continuity bound");
    const Kernel k = zoo::make_tc(0.25, TimeDomain::Discrete);
    std::vector<Functional> ops = {
        Functional::fourier(0.0, TimeDomain::Discrete),
        Functional::fourier(std::numbers::pi / 4.0, TimeDomain::Discrete),
        Functional::fourier(std::numbers::pi, TimeDomain::Discrete),
        Functional::lv(BoundedSignal::scalar(Signal::constant(1.0), TimeDomain::Discrete)),
    };
    bool ok = true;
    json reports = json::array();
    for (const auto& op : ops) {
        try {
            const OperatorBoundReport rep = verify_continuity_bound(k, op, 500, seed);
            ok = ok && rep.violations == 0 && rep.embedding_violations == 0 && rep.n_samples == 500;
            reports.push_back(to_json(rep));
        } catch (const BoundViolated& e) {
            ok = false;
            reports.push_back({{"operator", op.label}, {"error", e.what()}});
        }
    }
    r.detail = {{"operators", reports}};
    r.pass = ok;
    return r;
}

namespace {

CriterionResult dispatch(int id, std::uint64_t seed) {
    switch (id) {
        case 1: return criterion_closed_form_series(seed);
        case 2: return criterion_counterexample_double_sum(seed);
        case 3: return criterion_hierarchy(seed);
        case 4: return criterion_dominance(seed);
        case 5: return criterion_stable_spline_diagonal(seed);
        case 6: return criterion_gp_mean_l1(seed);
        case 7: return criterion_dichotomy(seed);
        case 8: return criterion_confidence_region(seed);
        case 9: return criterion_operator_bound(seed);
        default: break;
    }
    throw InvalidArgument("no criterion " + std::to_string(id) + " (expected 1-9)");
}

}  // namespace

CriterionResult run_criterion(int id, std::uint64_t seed) {
    const auto start = Clock::now();
    CriterionResult r = dispatch(id, seed);
    if (r.seconds == 0.0) r.seconds = seconds_since(start);
    return r;
}

std::vector<CriterionResult> run_core_criteria(std::uint64_t seed) {
    std::vector<CriterionResult> out;
    for (int id = 1; id <= 9; ++id) {
        const auto start = Clock::now();
        CriterionResult r;
        try {
            r = run_criterion(id, seed);
        } catch (const std::exception& e) {
            r.id = id;
            r.pass = false;
            r.detail = {{"exception", e.what()}};
        }
        if (r.seconds == 0.0) r.seconds = seconds_since(start);
        out.push_back(std::move(r));
    }
    return out;
}

json acceptance_report(const std::vector<CriterionResult>& results, std::uint64_t seed) {
    json criteria = json::array();
    bool all = true;
    for (const auto& r : results) {
        criteria.push_back({{"id", r.id}, {"module", r.module}, {"title", r.title}, {"pass", r.pass}, {"detail", r.detail}});
        all = all && r.pass;
    }
    json catalogue = json::array();
    for (const auto& entry : standard_zoo()) catalogue.push_back(entry.spec);
    return {{"tool", kToolName},
            {"version", kToolVersion},
            {"command", "verify-all"},
            {"seed", seed},
            {"spec_hash", spec_hash(catalogue)},
            {"criteria", criteria},
            {"all_pass", all}};
}

std::vector<CriterionResult> run_all_criteria(std::uint64_t seed) {
    auto first = run_core_criteria(seed);
    const auto start = Clock::now();
    const auto second = run_core_criteria(seed);
    const std::string a = dump_report(acceptance_report(first, seed));
    const std::string b = dump_report(acceptance_report(second, seed));
    auto r = make(10, "cli-harness", "deterministic report bytes");
    r.seconds = seconds_since(start);
    r.pass = a == b;
    r.detail = {{"report_bytes", a.size()}, {"fnv1a", spec_hash(json(a))}};
    first.push_back(std::move(r));
    return first;
}

}  // namespace kernelid
