#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "kernelid/error.hpp"
#include "kernelid/operators.hpp"
#include "kernelid/zoo.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

using namespace kernelid;

namespace {

constexpr auto D = TimeDomain::Discrete;
constexpr double kPi = std::numbers::pi;

BoundedSignal ones() { return BoundedSignal::scalar(Signal::constant(1.0), D); }

RkhsElement random_element(const Kernel& k, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> point(0, 30);
    std::normal_distribution<double> coef;
    std::vector<double> centers;
    std::vector<double> a;
    for (int i = 0; i < 6; ++i) {
        const double c = static_cast<double>(point(rng));
        if (std::find(centers.begin(), centers.end(), c) != centers.end()) continue;
        centers.push_back(c);
        a.push_back(coef(rng));
    }
    return RkhsElement(k, centers, a);
}

}  // namespace

TEST_CASE("L_v examples") {
    const Kernel tc = zoo::make_tc(0.5, D);
    const RkhsElement section(tc, {0.0}, {1.0});
    const BoundedSignal zero = BoundedSignal::scalar(Signal::zero(), D);
    CHECK(zero.sup_norm() == 0.0);
    CHECK(apply_lv(zero, section).value(0) == 0.0);
    const Application a = apply_lv(ones(), section);
    CHECK(std::fabs(a.value(0) - 2.0) <= a.tail_allowance + 1e-12);
    CHECK(a.tail_allowance < 1e-8);
}

TEST_CASE("Hoelder bound and linearity on random elements") {
    std::mt19937_64 rng(3);
    const Kernel k = zoo::make_ss(0.6, D);
    const BoundedSignal v = BoundedSignal::scalar(
        Signal::from_function([](double t) { return 1.5 * std::cos(0.7 * t) - 0.2; }, "wave"), D);
    CHECK(v.sup_norm() >= 1.5);
    CHECK(v.sup_norm() <= 1.7 + 1e-12);
    for (int trial = 0; trial < 40; ++trial) {
        const RkhsElement g = random_element(k, rng);
        const RkhsElement h = random_element(k, rng);
        const Application ag = apply_lv(v, g, 256.0);
        CHECK(std::fabs(ag.value(0)) <= v.sup_norm() * (ag.l1_norm + ag.l1_tail) + 1e-12);
        // Linearity through a shared center set.
        std::vector<double> centers(g.centers().begin(), g.centers().end());
        std::vector<double> coef(g.coefficients().begin(), g.coefficients().end());
        for (std::size_t i = 0; i < h.centers().size(); ++i) {
            const auto it = std::find(centers.begin(), centers.end(), h.centers()[i]);
            if (it == centers.end()) {
                centers.push_back(h.centers()[i]);
                coef.push_back(-2.0 * h.coefficients()[i]);
            } else {
                coef[static_cast<std::size_t>(it - centers.begin())] += -2.0 * h.coefficients()[i];
            }
        }
        const RkhsElement combo(k, centers, coef);
        const double lhs = apply_lv(v, combo, 256.0).value(0);
        const double rhs = ag.value(0) - 2.0 * apply_lv(v, h, 256.0).value(0);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10).scale(1.0));
    }
}

TEST_CASE("convolution examples") {
    const Kernel tc = zoo::make_tc(0.5, D);
    const RkhsElement g(tc, {0.0, 3.0}, {1.0, -0.5});
    const BoundedSignal impulse = BoundedSignal::scalar(Signal::impulse(0.0), D);
    for (double s0 : {0.0, 2.0, 5.0}) CHECK(convolve(impulse, s0, g).value(0) == doctest::Approx(eval_rkhs(g, s0)));
    const double lv = apply_lv(ones(), g).value(0);
    for (double t : {0.0, 4.0, -3.0}) CHECK(convolve(ones(), t, g).value(0) == doctest::Approx(lv).epsilon(1e-12));
    // Geometric input 0.5^s with u = 1.
    const Functional conv = Functional::convolution(ones(), 7.0);
    const Application geo = apply_functional(conv, Signal::geometric(1.0, 0.5), D, 128.0);
    CHECK(std::fabs(geo.value(0) - 2.0) <= geo.tail_allowance + 1e-12);
    CHECK(std::fabs(geo.value(0)) <= 1.0 * (geo.l1_norm + geo.l1_tail) + 1e-12);
}

TEST_CASE("Fourier functionals") {
    const Kernel k = zoo::make_tc(0.25, D);
    const RkhsElement g(k, {0.0, 2.0, 5.0}, {0.7, -1.0, 0.4});
    const Application f0 = fourier(0.0, g);
    CHECK(f0.value(1) == 0.0);
    CHECK(f0.value(0) == doctest::Approx(apply_lv(ones(), g).value(0)).epsilon(1e-12));
    for (double omega : {0.3, kPi / 4.0, 2.0, kPi}) {
        const Application f = fourier(omega, g);
        CHECK(std::hypot(f.value(0), f.value(1)) <= f.l1_norm + f.l1_tail + 1e-12);
    }
    // g_t = 0.5^t: F = 1 / (1 - 0.5 e^{-jw}).
    const Signal geo = Signal::geometric(1.0, 0.5);
    for (double omega : {0.0, 1.0, kPi}) {
        const Application f = apply_functional(Functional::fourier(omega, D), geo, D, 128.0);
        const std::complex<double> exact = 1.0 / (1.0 - 0.5 * std::exp(std::complex<double>(0.0, -omega)));
        CHECK(f.value(0) == doctest::Approx(exact.real()).epsilon(1e-12));
        CHECK(f.value(1) == doctest::Approx(exact.imag()).epsilon(1e-12).scale(1.0));
    }
    const Application pi = apply_functional(Functional::fourier(kPi, D), geo, D, 128.0);
    CHECK(pi.value(0) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(std::fabs(pi.value(1)) <= 1e-12);
    CHECK_THROWS_AS(fourier(3.5, g), FrequencyOutOfRange);
    CHECK_THROWS_AS(fourier(-0.1, g), FrequencyOutOfRange);
    CHECK_THROWS_AS(Functional::fourier(-1.0, TimeDomain::Continuous), FrequencyOutOfRange);
    CHECK_NOTHROW(Functional::fourier(10.0, TimeDomain::Continuous));
}

TEST_CASE("continuity bound on the TC kernel") {
    const Kernel k = zoo::make_tc(0.25, D);
    for (double omega : {0.0, kPi / 4.0, kPi}) {
        const OperatorBoundReport r = verify_continuity_bound(k, Functional::fourier(omega, D), 200, 42);
        CHECK(r.m_of_k == doctest::Approx(2.0));
        CHECK(r.rkhs_bound == doctest::Approx(2.0));
        CHECK(r.max_observed_ratio <= r.rkhs_bound);
        CHECK(r.max_embedding_ratio <= r.m_of_k + r.m_error_bound + 1e-8);
        CHECK(r.violations == 0);
        CHECK(r.n_samples == 200);
    }
    const OperatorBoundReport zero =
        verify_continuity_bound(k, Functional::lv(BoundedSignal::scalar(Signal::zero(), D)), 100, 1);
    CHECK(zero.max_observed_ratio == 0.0);
    CHECK(zero.rkhs_bound == 0.0);
    const OperatorBoundReport a = verify_continuity_bound(k, Functional::lv(ones()), 100, 9);
    const OperatorBoundReport b = verify_continuity_bound(k, Functional::lv(ones()), 100, 9);
    CHECK(a.max_observed_ratio == b.max_observed_ratio);
}

TEST_CASE("single-center element attains 4/3") {
    const Kernel k = zoo::make_tc(0.25, D);
    const RkhsElement g(k, {0.0}, {1.0 / std::sqrt(k(0, 0))});
    CHECK(rkhs_norm(g) == doctest::Approx(1.0));
    const Application a = apply_lv(ones(), g);
    CHECK(a.value(0) == doctest::Approx(4.0 / 3.0).epsilon(1e-9));
    CHECK(a.value(0) <= 2.0);
}

TEST_CASE("vector-valued signals use the Euclidean norm") {
    const Kernel k = zoo::make_tc(0.5, D);
    const BoundedSignal rot(
        [](double t) {
            Eigen::VectorXd v(2);
            v << std::cos(t), std::sin(t);
            return v;
        },
        2, 1.0, 2048.0, "rotation");
    const OperatorBoundReport r = verify_continuity_bound(k, Functional::lv(rot), 100, 4);
    CHECK(r.l1_norm_bound == 1.0);
    CHECK(r.max_observed_ratio <= r.rkhs_bound);
}

TEST_CASE("continuity bound holds across the DSRI zoo") {
    for (const Kernel& k : {zoo::make_ss(0.5, D), zoo::make_di(0.5, D), zoo::make_rank_n_exponential({1.0, 2.0}, {0.3, 0.6}, D),
                            zoo::make_tc(0.5, TimeDomain::Continuous)}) {
        CAPTURE(k.label());
        const OperatorBoundReport r = verify_continuity_bound(k, Functional::fourier(1.0, k.domain()), 100, 17);
        CHECK(r.max_observed_ratio <= r.rkhs_bound);
    }
}
