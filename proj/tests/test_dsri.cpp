#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "kernelid/dsri.hpp"
#include "kernelid/error.hpp"
#include "kernelid/spec_json.hpp"
#include "kernelid/zoo.hpp"

#include <cmath>
#include <numbers>

using namespace kernelid;

namespace {

constexpr auto D = TimeDomain::Discrete;
constexpr auto C = TimeDomain::Continuous;
constexpr double kPi = std::numbers::pi;

double harmonic(long n) {
    double h = 0.0;
    for (long i = n; i >= 1; --i) h += 1.0 / static_cast<double>(i);
    return h;
}

MeasureOptions series_only() {
    MeasureOptions o;
    o.allow_closed_form = false;
    return o;
}

}  // namespace

TEST_CASE("M(k) examples") {
    const MeasureResult tc = dsri_measure(zoo::make_tc(0.25, D));
    CHECK(tc.method == MeasureMethod::ClosedForm);
    CHECK(tc.value == 2.0);
    // Oracle: partial geometric sums of 0.5^t to T = 200.
    double partial = 0.0;
    for (int t = 0; t < 200; ++t) partial += std::pow(0.5, t);
    CHECK(tc.value == doctest::Approx(partial).epsilon(1e-15));

    const MeasureResult rne = dsri_measure(zoo::make_rank_n_exponential({1.0}, {std::exp(-2.0)}, C));
    CHECK(rne.value == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(rne.value == doctest::Approx(-2.0 * std::sqrt(1.0) / std::log(std::exp(-2.0))).epsilon(1e-14));

    const MeasureResult zero = dsri_measure(zoo::make_zero(D));
    CHECK(zero.finite());
    CHECK(zero.value == 0.0);
}

TEST_CASE("counterexample M(k) diverges along the harmonic numbers") {
    const Kernel k = zoo::make_counterexample(D);
    const MeasureResult m = dsri_measure(k);
    CHECK(m.status == MeasureStatus::Divergent);
    REQUIRE(m.partial_sum_trace.size() >= 2);
    for (std::size_t i = 1; i < m.partial_sum_trace.size(); ++i) {
        CHECK(m.partial_sum_trace[i].partial > m.partial_sum_trace[i - 1].partial);
    }
    for (long t : {1L, 10L, 100L, 10000L}) {
        CHECK(std::fabs(dsri_partial_sum(k, static_cast<double>(t)) - harmonic(t)) <= 1e-12);
    }
}

TEST_CASE("integrability measure examples") {
    const MeasureResult ce = integrability_measure(zoo::make_counterexample(D));
    REQUIRE(ce.certified());
    CHECK(std::fabs(ce.value - kPi * kPi / 6.0) <= ce.error_bound);
    CHECK(std::fabs(ce.value - kPi * kPi / 6.0) <= 1e-6);

    const Kernel tc = zoo::make_tc(0.5, D);
    const MeasureResult m = integrability_measure(tc);
    REQUIRE(m.certified());
    CHECK(std::fabs(m.value - 6.0) <= m.error_bound + 1e-12);
    CHECK(m.value == doctest::Approx(2.0 * 0.5 / 0.25 + 1.0 / 0.5).epsilon(1e-9));
    // Brute-force double sum to T = 100; the neglected tail is below rounding.
    double brute = 0.0;
    for (int s = 0; s < 100; ++s) {
        for (int t = 0; t < 100; ++t) brute += std::pow(0.5, std::max(s, t));
    }
    CHECK(std::fabs(brute - 6.0) < 1e-12);
    CHECK(double_partial_sum(tc, 100, 1.0) == doctest::Approx(brute).epsilon(1e-13));

    CHECK(integrability_measure(zoo::make_zero(D)).value == 0.0);
}

TEST_CASE("finite-trace measure examples") {
    const MeasureResult tc = finite_trace_measure(zoo::make_tc(0.5, D));
    CHECK(std::fabs(tc.value - 2.0) <= tc.error_bound + 1e-12);
    const MeasureResult ce = finite_trace_measure(zoo::make_counterexample(D));
    REQUIRE(ce.certified());
    CHECK(std::fabs(ce.value - kPi * kPi / 6.0) <= ce.error_bound);
    CHECK(finite_trace_measure(zoo::make_zero(D)).value == 0.0);
}

TEST_CASE("square-integrability measure examples") {
    const MeasureResult ce = square_integrability_measure(zoo::make_counterexample(D));
    REQUIRE(ce.certified());
    CHECK(std::fabs(ce.value - std::pow(kPi, 4) / 90.0) <= ce.error_bound);
    CHECK(std::fabs(ce.value - std::pow(kPi, 4) / 90.0) <= 1e-9);
    const MeasureResult di = square_integrability_measure(zoo::make_di(0.5, D));
    CHECK(std::fabs(di.value - 4.0 / 3.0) <= di.error_bound + 1e-12);
    CHECK(square_integrability_measure(zoo::make_zero(D)).value == 0.0);
}

TEST_CASE("series with tail brackets every closed form") {
    for (const auto& entry : standard_zoo()) {
        const Kernel k = build_kernel(entry.spec);
        if (!k.closed_form_measure()) continue;
        CAPTURE(entry.name);
        const MeasureResult series = dsri_measure(k, std::nullopt, series_only());
        REQUIRE(series.certified());
        CHECK(series.method != MeasureMethod::ClosedForm);
        CHECK(std::fabs(series.value - *k.closed_form_measure()) <= series.error_bound);
    }
}

TEST_CASE("TC(0.25) by series within 1e-9") {
    const MeasureResult m = dsri_measure(zoo::make_tc(0.25, D), std::nullopt, series_only());
    CHECK(m.method == MeasureMethod::SeriesWithTail);
    CHECK(std::fabs(m.value - 2.0) <= m.error_bound);
    CHECK(std::fabs(m.value - 2.0) <= 1e-9);
}

TEST_CASE("rank-n exponential bound") {
    const std::vector<double> lambda = {1.0, 0.5, 2.0};
    const std::vector<double> alpha = {0.3, 0.6, 0.45};
    const MeasureResult m = dsri_measure(zoo::make_rank_n_exponential(lambda, alpha, D));
    REQUIRE(m.certified());
    CHECK(m.value <= std::sqrt(3.5) / (1.0 - std::sqrt(0.6)) + m.error_bound);
}

TEST_CASE("continuous counterexample") {
    const Kernel k = zoo::make_counterexample(C);
    const MeasureResult integ = integrability_measure(k);
    REQUIRE(integ.certified());
    CHECK(integ.value - integ.error_bound <= kPi * kPi / 6.0);
    // Exact value: (pi^2/6) (integral_0^1/2 cos(pi u) du)^2 = 1/6.
    CHECK(std::fabs(integ.value - 1.0 / 6.0) <= integ.error_bound);
    // Partial integrals grow like (integral_0^1 f) H_T with integral_0^1 f = 1/pi.
    const double p100 = dsri_partial_sum(k, 100.0);
    const double p10k = dsri_partial_sum(k, 10000.0);
    const double slope = (p10k - p100) / (harmonic(10000) - harmonic(100));
    CHECK(slope == doctest::Approx(1.0 / kPi).epsilon(0.01));
    CHECK(dsri_measure(k).status == MeasureStatus::Divergent);
}

TEST_CASE("envelopes are verified before use") {
    const Kernel tc = zoo::make_tc(0.5, D);
    CHECK_THROWS_AS(dsri_measure(tc, TailEnvelope::geometric(0.5, 0.5), series_only()), EnvelopeRejected);
    CHECK_THROWS_AS(verify_envelope(tc, TailEnvelope::geometric(1.0, 0.6)), EnvelopeRejected);
    CHECK_NOTHROW(verify_envelope(tc, TailEnvelope::geometric(1.0, std::sqrt(0.5))));
}

TEST_CASE("kernels without an envelope") {
    // exp(-t) diagonal with no metadata: only a fitted envelope is available.
    const Kernel bare(D, [](double s, double t) { return s == t ? std::exp(-s) : 0.0; }, "bare");
    const MeasureResult m = dsri_measure(bare);
    CHECK(m.finite());
    CHECK_FALSE(m.certified());
    CHECK(m.method == MeasureMethod::Heuristic);
    CHECK(m.value == doctest::Approx(1.0 / (1.0 - std::exp(-0.5))).epsilon(1e-6));
    const Kernel ones(D, [](double, double) { return 1.0; }, "ones");
    const MeasureResult div = dsri_measure(ones);
    CHECK(div.status == MeasureStatus::Divergent);
    CHECK_FALSE(div.partial_sum_trace.empty());
}

TEST_CASE("stability probe") {
    const ProbeResult tc = stability_probe(zoo::make_tc(0.5, D));
    CHECK(tc.verdict == ProbeVerdict::ConsistentWithStable);
    REQUIRE_FALSE(tc.inputs.empty());
    // u = 1: response l1 converges to the double sum 6.
    CHECK(tc.inputs.front().trace.back().partial == doctest::Approx(6.0).epsilon(1e-9));
    const ProbeResult zero = stability_probe(zoo::make_zero(D));
    CHECK(zero.verdict == ProbeVerdict::ConsistentWithStable);
    for (const auto& in : zero.inputs) CHECK(in.trace.back().partial == 0.0);
    const Kernel ones(D, [](double, double) { return 1.0; }, "ones");
    CHECK(stability_probe(ones).verdict == ProbeVerdict::ProbeDiverged);
    for (const auto& entry : standard_zoo()) {
        if (!entry.dsri) continue;
        CAPTURE(entry.name);
        CHECK(stability_probe(build_kernel(entry.spec)).verdict == ProbeVerdict::ConsistentWithStable);
    }
}

TEST_CASE("classification") {
    const ClassReport ce = classify(zoo::make_counterexample(D));
    CHECK(ce.dsri.state == FlagState::No);
    CHECK(ce.integrable.state == FlagState::Yes);
    CHECK(ce.finite_trace.state == FlagState::Yes);
    CHECK(ce.square_integrable.state == FlagState::Yes);
    const ClassReport tc = classify(zoo::make_tc(0.5, D));
    for (const ClassFlag* f : {&tc.dsri, &tc.integrable, &tc.finite_trace, &tc.square_integrable}) {
        CHECK(f->state == FlagState::Yes);
    }
    CHECK(tc.dsri.bound >= 1.0 / (1.0 - std::sqrt(0.5)));
    const ClassReport zero = classify(zoo::make_zero(D));
    for (const ClassFlag* f : {&zero.dsri, &zero.integrable, &zero.finite_trace, &zero.square_integrable}) {
        CHECK(f->state == FlagState::Yes);
        CHECK(f->bound == doctest::Approx(0.0));
    }
}

TEST_CASE("every DSRI kernel is integrable") {
    for (const auto& entry : standard_zoo()) {
        CAPTURE(entry.name);
        const ClassReport r = classify(build_kernel(entry.spec));
        if (r.dsri.state == FlagState::Yes) CHECK(r.integrable.state == FlagState::Yes);
        CHECK(r.integrable.state != FlagState::No);
    }
}

TEST_CASE("chain violations are internal assertions") {
    ClassReport r;
    r.kernel = "synthetic";
    r.dsri.state = FlagState::Yes;
    r.integrable.state = FlagState::No;
    r.finite_trace.state = FlagState::Yes;
    r.square_integrable.state = FlagState::Yes;
    CHECK_THROWS_AS(check_chain(r), ChainViolation);
    r.integrable.state = FlagState::Yes;
    r.square_integrable.state = FlagState::No;
    CHECK_THROWS_AS(check_chain(r), ChainViolation);
    r.square_integrable.state = FlagState::Unknown;
    CHECK_NOTHROW(check_chain(r));
}

TEST_CASE("string forms") {
    CHECK(to_string(MeasureMethod::ClosedForm) == "closed_form");
    CHECK(to_string(MeasureMethod::SeriesWithTail) == "series_with_tail");
    CHECK(to_string(MeasureStatus::Divergent) == "divergent");
    CHECK(to_string(FlagState::Yes) == "yes");
}
