#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "kernelid/core.hpp"
#include "kernelid/error.hpp"
#include "kernelid/parallel.hpp"
#include "kernelid/quadrature.hpp"
#include "kernelid/signal.hpp"
#include "kernelid/zoo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

using namespace kernelid;

namespace {

Kernel tc(double alpha) { return zoo::make_tc(alpha, TimeDomain::Discrete); }

}  // namespace

TEST_CASE("time domain tags round-trip through strings") {
    CHECK(time_domain_from_string("discrete") == TimeDomain::Discrete);
    CHECK(time_domain_from_string("continuous") == TimeDomain::Continuous);
    CHECK(to_string(TimeDomain::Discrete) == "discrete");
    CHECK_THROWS_AS(time_domain_from_string("hybrid"), InvalidArgument);
}

TEST_CASE("Gram of TC(0.5) on {0,1}") {
    const GramMatrix g = assemble_gram(tc(0.5), Grid::discrete_range(2));
    CHECK(g.entries(0, 0) == doctest::Approx(1.0));
    CHECK(g.entries(0, 1) == doctest::Approx(0.5));
    CHECK(g.entries(1, 0) == doctest::Approx(0.5));
    CHECK(g.entries(1, 1) == doctest::Approx(0.5));
    // Eigenvalues of [[1, .5], [.5, .5]]: (1.5 -+ sqrt(1.25)) / 2.
    CHECK(g.min_eigenvalue == doctest::Approx((1.5 - std::sqrt(1.25)) / 2.0).epsilon(1e-12));
    CHECK(g.min_eigenvalue > 0.0);
}

TEST_CASE("Gram of the zero kernel is zero") {
    const GramMatrix g = assemble_gram(zoo::make_zero(TimeDomain::Discrete), Grid::discrete_range(5));
    CHECK(g.entries.isZero(0.0));
    CHECK(g.min_eigenvalue == 0.0);
    CHECK(check_positive_definite(g));
}

TEST_CASE("Gram of the counterexample is diag(1, 1/4, 1/9)") {
    const GramMatrix g = assemble_gram(zoo::make_counterexample(TimeDomain::Discrete), Grid::discrete_range(3));
    CHECK(g.entries(0, 0) == doctest::Approx(1.0));
    CHECK(g.entries(1, 1) == doctest::Approx(0.25));
    CHECK(g.entries(2, 2) == doctest::Approx(1.0 / 9.0));
    CHECK(g.entries(0, 2) == 0.0);
    CHECK(g.diagonal);
    CHECK(check_positive_definite(assemble_gram(zoo::make_counterexample(TimeDomain::Discrete), Grid::discrete_range(10))));
}

TEST_CASE("positive-definiteness check") {
    CHECK(check_positive_definite(assemble_gram(tc(0.5), Grid::discrete_range(3))));
    const Kernel minus_one(TimeDomain::Discrete, [](double, double) { return -1.0; }, "minus-one");
    CHECK_FALSE(check_positive_definite(assemble_gram(minus_one, Grid::discrete_range(1))));
}

TEST_CASE("Gram assembly errors") {
    const Kernel bad(TimeDomain::Discrete, [](double s, double) { return s > 1 ? std::nan("") : 1.0; }, "nan");
    CHECK_THROWS_AS(assemble_gram(bad, Grid::discrete_range(3)), NonFiniteEntry);
    CHECK_THROWS_AS(assemble_gram(tc(0.5), Grid::uniform(TimeDomain::Continuous, 0.0, 0.5, 2.0)), DomainMismatch);
}

TEST_CASE("grids: increasing points, positive weights, trapezoid on the continuum") {
    const Grid g = Grid::uniform(TimeDomain::Continuous, 0.0, 0.5, 2.0);
    REQUIRE(g.size() == 5);
    CHECK(g.weight(0) == doctest::Approx(0.25));
    CHECK(g.weight(2) == doctest::Approx(0.5));
    CHECK(g.weight(4) == doctest::Approx(0.25));
    CHECK_THROWS(Grid::from_points(TimeDomain::Discrete, {0.0, 2.0, 1.0}));
    CHECK_THROWS(Grid::from_points(TimeDomain::Discrete, {0.5}));
}

TEST_CASE("RKHS norm examples") {
    const RkhsElement one(tc(0.25), {0.0}, {1.0});
    CHECK(rkhs_norm(one) == doctest::Approx(1.0));
    const RkhsElement none(tc(0.25), {0.0, 3.0}, {0.0, 0.0});
    CHECK(rkhs_norm(none) == 0.0);
    const RkhsElement diff(tc(0.5), {0.0, 1.0}, {1.0, -1.0});
    CHECK(rkhs_norm(diff) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
}

TEST_CASE("RKHS evaluation examples") {
    const RkhsElement zero(tc(0.5), {0.0, 4.0}, {0.0, 0.0});
    for (double s : {0.0, 1.0, 7.0}) CHECK(eval_rkhs(zero, s) == 0.0);
    const RkhsElement section(tc(0.5), {0.0}, {1.0});
    for (double s : {0.0, 1.0, 5.0}) CHECK(eval_rkhs(section, s) == doctest::Approx(std::pow(0.5, s)));
    const RkhsElement pair(tc(0.5), {0.0, 1.0}, {1.0, 1.0});
    CHECK(eval_rkhs(pair, 2.0) == doctest::Approx(0.5));
}

TEST_CASE("RKHS elements reject coincident centers") {
    CHECK_THROWS(RkhsElement(tc(0.5), {1.0, 1.0}, {1.0, 2.0}));
}

TEST_CASE("RKHS properties on random elements") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    std::uniform_int_distribution<int> point(0, 40);
    const Kernel k = zoo::make_ss(0.7, TimeDomain::Discrete);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> centers;
        std::vector<double> a;
        std::vector<double> b;
        for (int i = 0; i < 6; ++i) {
            const double c = static_cast<double>(point(rng));
            if (std::find(centers.begin(), centers.end(), c) != centers.end()) continue;
            centers.push_back(c);
            a.push_back(coef(rng));
            b.push_back(coef(rng));
        }
        const RkhsElement g(k, centers, a);
        const RkhsElement h(k, centers, b);
        std::vector<double> ab(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) ab[i] = a[i] + b[i];
        const RkhsElement gh(k, centers, ab);
        const double norm = rkhs_norm(g);
        const double lambda = coef(rng);
        CHECK(rkhs_norm(g.scaled(lambda)) == doctest::Approx(std::fabs(lambda) * norm).epsilon(1e-12));
        for (int j = 0; j < 5; ++j) {
            const double s = static_cast<double>(point(rng));
            // Pointwise bound |g(s)| <= ||g||_H k(s,s)^(1/2).
            CHECK(std::fabs(eval_rkhs(g, s)) <= norm * std::sqrt(k(s, s)) + 1e-9);
            CHECK(eval_rkhs(gh, s) == doctest::Approx(eval_rkhs(g, s) + eval_rkhs(h, s)).epsilon(1e-12));
        }
    }
}

TEST_CASE("tail envelopes") {
    const TailEnvelope geo = TailEnvelope::geometric(2.0, 0.5);
    CHECK(geo(3.0) == doctest::Approx(0.25));
    CHECK(geo.summable(TimeDomain::Discrete));
    // sum_{t >= 2} 2 * 0.5^t = 1
    CHECK(geo.tail(TimeDomain::Discrete, 2.0) == doctest::Approx(1.0));
    // integral_2^inf 2 * 0.5^t dt = 2 * 0.25 / ln 2
    CHECK(geo.tail(TimeDomain::Continuous, 2.0) == doctest::Approx(0.5 / std::log(2.0)));
    const TailEnvelope harmonic = TailEnvelope::power_law(1.0, 1.0, 1.0);
    CHECK_FALSE(harmonic.summable(TimeDomain::Discrete));
    CHECK(std::isinf(harmonic.tail(TimeDomain::Discrete, 10.0)));
    CHECK(harmonic.raised(2.0).summable(TimeDomain::Discrete));
    const TailEnvelope sum = envelope_sum(geo, TailEnvelope::geometric(1.0, 0.25));
    for (double t : {0.0, 1.0, 5.0, 20.0}) CHECK(sum(t) >= geo(t) + std::pow(0.25, t) - 1e-15);
}

TEST_CASE("quadrature handles jumps on panel boundaries") {
    // Step that jumps at every integer; exact integral over [0, 4] is 0+1+2+3.
    const auto r = integrate([](double t) { return std::floor(t); }, 0.0, 4.0);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(6.0).epsilon(1e-12));
    const auto g = integrate([](double t) { return std::exp(-t); }, 0.0, 10.0);
    CHECK(g.value == doctest::Approx(1.0 - std::exp(-10.0)).epsilon(1e-10));
    const auto tiny = integrate([](double) { return 1.0; }, 0.0, std::numeric_limits<double>::denorm_min());
    CHECK(tiny.converged);
}

TEST_CASE("parallel_for covers every index exactly once") {
    std::vector<std::atomic<int>> hits(1000);
    parallel_for(hits.size(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) hits[i]++;
    });
    for (const auto& h : hits) CHECK(h.load() == 1);
}

TEST_CASE("signals") {
    CHECK(Signal::geometric(2.0, 0.5)(3.0) == doctest::Approx(0.25));
    CHECK(*Signal::geometric(1.0, 0.5).l1_norm(TimeDomain::Discrete) == doctest::Approx(2.0));
    CHECK(Signal::impulse(2.0)(2.0) == 1.0);
    CHECK(Signal::impulse(2.0)(1.0) == 0.0);
    CHECK(Signal::alternating(1.0)(3.0) == -1.0);
    const Signal roundtrip = Signal::from_json(Signal::power_law(1.5, 2.0).to_json());
    CHECK(roundtrip(3.0) == doctest::Approx(1.5 / 16.0));
}
