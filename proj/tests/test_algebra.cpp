#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "kernelid/algebra.hpp"
#include "kernelid/dsri.hpp"
#include "kernelid/error.hpp"
#include "kernelid/spec_json.hpp"
#include "kernelid/zoo.hpp"

#include <cmath>
#include <random>

using namespace kernelid;

namespace {

constexpr auto D = TimeDomain::Discrete;
constexpr auto C = TimeDomain::Continuous;

bool gram_psd_on_random_grid(const Kernel& k, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> size(2, 25);
    std::uniform_real_distribution<double> gap(0.1, 2.0);
    std::vector<double> points;
    double t = 0.0;
    for (int i = size(rng); i > 0; --i) {
        points.push_back(k.domain() == D ? std::round(t) + static_cast<double>(points.size()) : t);
        t += gap(rng);
    }
    return check_positive_definite(assemble_gram(k, Grid::from_points(k.domain(), points)));
}

std::vector<Kernel> discrete_dsri_zoo() {
    std::vector<Kernel> out;
    for (const auto& e : standard_zoo()) {
        if (!e.dsri) continue;
        Kernel k = build_kernel(e.spec);
        if (k.domain() == D) out.push_back(std::move(k));
    }
    return out;
}

}  // namespace

TEST_CASE("linear combinations") {
    const Kernel tc = zoo::make_tc(0.5, D);
    const Kernel ss = zoo::make_ss(0.5, D);
    const Kernel same = combine_linear(tc, ss, 1.0, 0.0);
    for (double s = 0; s < 5; ++s) {
        for (double t = 0; t < 5; ++t) CHECK(same(s, t) == doctest::Approx(tc(s, t)));
    }
    const Kernel its = combine_linear(zoo::make_itc(0.6, 0.3, D), zoo::make_iss(0.6, 0.3, D), 1.0, 1.0);
    const Kernel ref = zoo::make_its(0.6, 0.3, D);
    for (double s = 0; s < 5; ++s) {
        for (double t = 0; t < 5; ++t) CHECK(its(s, t) == doctest::Approx(ref(s, t)).epsilon(1e-14));
    }
    const Kernel both = combine_linear(zoo::make_tc(0.25, D), zoo::make_tc(0.5, D), 1.0, 1.0);
    CHECK(both(1, 1) == doctest::Approx(0.75));
    CHECK_THROWS_AS(combine_linear(tc, ss, -1.0, 1.0), NegativeCoefficient);
    CHECK_THROWS_AS(combine_linear(tc, zoo::make_tc(0.5, C), 1.0, 1.0), DomainMismatch);
}

TEST_CASE("products") {
    const Kernel tc = zoo::make_tc(0.5, D);
    const Kernel one = zoo::make_constant(1.0, D);
    const Kernel same = combine_product(tc, one);
    for (double s = 0; s < 5; ++s) {
        for (double t = 0; t < 5; ++t) CHECK(same(s, t) == doctest::Approx(tc(s, t)));
    }
    CHECK(combine_product(tc, tc)(1, 1) == doctest::Approx(0.25));
    // AMLS factorization: k_v times a stationary base.
    const Signal v = Signal::geometric(1.0, 0.7);
    const Kernel base = zoo::make_exponential_stationary(0.5, D);
    const Kernel amls = zoo::make_amls(base, v);
    const Kernel product = combine_product(zoo::make_kv(v, D), base);
    for (double s = 0; s < 8; ++s) {
        for (double t = 0; t < 8; ++t) CHECK(product(s, t) == doctest::Approx(amls(s, t)).epsilon(1e-13));
    }
    CHECK_THROWS_AS(combine_product(tc, zoo::make_tc(0.5, C)), DomainMismatch);
}

TEST_CASE("sums and products keep Gram matrices PSD") {
    std::mt19937_64 rng(23);
    const auto zoo_kernels = discrete_dsri_zoo();
    std::uniform_real_distribution<double> coef(0.0, 3.0);
    for (std::size_t i = 0; i < zoo_kernels.size(); ++i) {
        for (std::size_t j = i; j < zoo_kernels.size(); j += 3) {
            CAPTURE(zoo_kernels[i].label());
            CAPTURE(zoo_kernels[j].label());
            CHECK(gram_psd_on_random_grid(combine_linear(zoo_kernels[i], zoo_kernels[j], coef(rng), coef(rng)), rng));
            CHECK(gram_psd_on_random_grid(combine_product(zoo_kernels[i], zoo_kernels[j]), rng));
        }
    }
}

TEST_CASE("DSRI closure under sums and products, with the bounds they imply") {
    const auto zoo_kernels = discrete_dsri_zoo();
    for (std::size_t i = 0; i < zoo_kernels.size(); ++i) {
        for (std::size_t j = 0; j < zoo_kernels.size(); j += 2) {
            const Kernel& k = zoo_kernels[i];
            const Kernel& h = zoo_kernels[j];
            CAPTURE(k.label());
            CAPTURE(h.label());
            const MeasureResult mk = dsri_measure(k);
            const MeasureResult mh = dsri_measure(h);
            const MeasureResult sum = dsri_measure(combine_linear(k, h, 2.0, 0.5));
            REQUIRE(sum.finite());
            CHECK(sum.value <= std::sqrt(2.0) * mk.upper_bound() + std::sqrt(0.5) * mh.upper_bound() + sum.error_bound);
            const MeasureResult prod = dsri_measure(combine_product(k, h));
            REQUIRE(prod.finite());
            const double sup = probe_diagonal_sup(h);
            CHECK(prod.value <= std::sqrt(sup) * mk.upper_bound() + prod.error_bound + 1e-12);
        }
    }
}

TEST_CASE("sampling continuous kernels") {
    const Kernel rne = zoo::make_rank_n_exponential({1.0}, {std::exp(-2.0)}, C);
    const Kernel sampled = sample_kernel(rne, SamplingMap::affine_map(1.0));
    CHECK(sampled.domain() == D);
    for (double t : {0.0, 1.0, 3.0}) CHECK(sampled(t, t) == doctest::Approx(std::exp(-2.0 * t)));
    const MeasureResult m1 = dsri_measure(sampled);
    CHECK(m1.value == doctest::Approx(1.0 / (1.0 - std::exp(-1.0))).epsilon(1e-9));
    const MeasureResult m2 = dsri_measure(sample_kernel(rne, SamplingMap::affine_map(2.0)));
    // sum e^{-2t} vs sum e^{-t}
    CHECK(m2.value == doctest::Approx(1.0 / (1.0 - std::exp(-2.0))).epsilon(1e-9));
    CHECK(m2.value < m1.value);
    const Kernel shifted = sample_kernel(rne, SamplingMap::affine_map(0.5, 1.5));
    CHECK(shifted(0, 0) == doctest::Approx(rne(1.5, 1.5)));
    CHECK_THROWS_AS(sample_kernel(zoo::make_tc(0.5, D), SamplingMap::affine_map(1.0)), DomainMismatch);
    CHECK_THROWS_AS(sample_kernel(rne, SamplingMap::affine_map(0.0)), ImproperSampling);
    // Repeats every sample point once: zero gap.
    CHECK_THROWS_AS(sample_kernel(rne, SamplingMap::from_function([](double t) { return std::floor(t / 2.0); }, "half")),
                    ImproperSampling);
}

TEST_CASE("sampling preserves DSRI with the gap bound") {
    for (const Kernel& k : {zoo::make_tc(0.5, C), zoo::make_rank_n_exponential({2.0}, {0.3}, C)}) {
        const MeasureResult mk = dsri_measure(k);
        for (double scale : {0.5, 1.0, 3.0}) {
            const SamplingMap sigma = SamplingMap::affine_map(scale, 0.0);
            const Kernel ks = sample_kernel(k, sigma);
            const MeasureResult ms = dsri_measure(ks);
            REQUIRE(ms.finite());
            CHECK(ms.value <= std::sqrt(ks(0, 0)) + mk.upper_bound() / sigma.min_gap + ms.error_bound);
        }
    }
}

TEST_CASE("reparameterization") {
    const Kernel tc = zoo::make_tc(0.5, D);
    const Kernel same = reparameterize(tc, ReparamMap::affine_map(1.0, 0.0, D));
    const Kernel doubled = reparameterize(tc, ReparamMap::affine_map(2.0, 0.0, D));
    const Kernel squared = zoo::make_tc(0.25, D);
    for (double s = 0; s < 6; ++s) {
        for (double t = 0; t < 6; ++t) {
            CHECK(same(s, t) == doctest::Approx(tc(s, t)));
            CHECK(doubled(s, t) == doctest::Approx(squared(s, t)));
        }
    }
    CHECK(dsri_measure(doubled).finite());
    const Kernel ctc = zoo::make_tc(0.5, C);
    for (double scale : {2.0, 0.5}) {
        const ReparamMap rho = ReparamMap::affine_map(scale, 1.0, C);
        const MeasureResult m = dsri_measure(reparameterize(ctc, rho));
        REQUIRE(m.finite());
        CHECK(m.value <= dsri_measure(ctc).upper_bound() / rho.min_derivative + m.error_bound);
    }
    CHECK_THROWS_AS(ReparamMap::affine_map(-1.0, 0.0, D), NotIncreasing);
    CHECK_THROWS_AS(ReparamMap::affine_map(1.5, 0.0, D), InvalidArgument);
    CHECK_THROWS_AS(ReparamMap::from_function([](double t) { return 5.0 - t; }, "decreasing", C), NotIncreasing);
}

TEST_CASE("dominance certificates") {
    const Kernel tc = zoo::make_tc(0.5, D);
    const DominanceCertificate self = check_dominance(tc, tc, DominanceMode::Full);
    CHECK(self.constant_C == doctest::Approx(1.0 + kDominanceMargin).epsilon(1e-12));
    CHECK(self.max_ratio_observed <= self.constant_C);
    const Kernel rne = zoo::make_rank_n_exponential({1.0}, {0.5}, D);
    const DominanceCertificate full = check_dominance(tc, rne, DominanceMode::Full);
    CHECK(full.constant_C <= 1.0 + 1e-6 + 1e-15);
    CHECK(full.probe_horizon == 2048.0);
    const DominanceCertificate diag =
        check_dominance(zoo::make_ss(0.5, D), zoo::make_rank_n_exponential({1.0}, {0.125}, D), DominanceMode::DiagonalOnly);
    CHECK(diag.constant_C == doctest::Approx(2.0 / 3.0 * (1.0 + kDominanceMargin)).epsilon(1e-9));
    CHECK(diag.mode == DominanceMode::DiagonalOnly);
    try {
        check_dominance(rne, zoo::make_di(0.5, D), DominanceMode::Full);
        FAIL("expected NotDominated");
    } catch (const NotDominated& e) {
        // DI vanishes off the diagonal where RnE does not.
        CHECK(e.witness_s() != e.witness_t());
    }
    CHECK_THROWS_AS(check_dominance(tc, zoo::make_tc(0.5, C), DominanceMode::Full), DomainMismatch);
}

TEST_CASE("dominance transfers finite M") {
    const Kernel rne = zoo::make_rank_n_exponential({1.0}, {0.5}, D);
    for (const Kernel& k : {zoo::make_di(0.5, D), zoo::make_dc(0.5, -0.4, D), zoo::make_tc(0.5, D), zoo::make_itc(0.5, 0.25, D)}) {
        CAPTURE(k.label());
        const DominanceCertificate c = check_dominance(k, rne, DominanceMode::Full);
        CHECK(c.constant_C <= 1.0 + 1e-6 + 1e-15);
        const MeasureResult mk = dsri_measure(k);
        REQUIRE(mk.finite());
        CHECK(mk.value <= std::sqrt(c.constant_C) * dsri_measure(rne).upper_bound() + mk.error_bound);
    }
}
