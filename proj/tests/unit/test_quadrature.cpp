#include "doctest.h"

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/uniform_real_distribution.hpp>
#include <cmath>
#include <numbers>

#include "fhn/errors.hpp"
#include "fhn/quadrature.hpp"

using namespace fhn;

TEST_CASE("integrate basic cases") {
    CHECK(integrate([](double) { return 1.0; }, 0, 1, Weight::inv_sqrt_upper, 1e-12).value ==
          doctest::Approx(2.0).epsilon(1e-13));
    CHECK(integrate([](double) { return 1.0; }, 0, 1, Weight::inv_sqrt_lower, 1e-12).value ==
          doctest::Approx(2.0).epsilon(1e-13));
    CHECK(integrate([](double y) { return y; }, 0, 1, Weight::none, 1e-12).value ==
          doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("inv_sqrt_upper against a brute-force midpoint oracle") {
    // substitute y = 4 - w^2 so the midpoint rule sees a smooth integrand
    const long n = 10000000;
    const double W = 2.0;
    long double sum = 0.0L;
    for (long i = 0; i < n; ++i) {
        const double w = (i + 0.5) * W / n;
        sum += 2.0L * std::exp(-(4.0 - w * w));
    }
    const double oracle = static_cast<double>(sum * W / n);
    const auto r = integrate([](double y) { return std::exp(-y); }, 0, 4, Weight::inv_sqrt_upper, 1e-13);
    CHECK(std::abs(r.value - oracle) <= 1e-10);
    CHECK(r.evaluations >= 1);
    CHECK(r.err_estimate >= 0.0);
}

TEST_CASE("integrate is exact on low-degree polynomials") {
    for (int deg = 0; deg <= 5; ++deg) {
        auto f = [deg](double x) { return std::pow(x, deg); };
        const double exact = (std::pow(3.0, deg + 1) - std::pow(-1.0, deg + 1)) / (deg + 1);
        CHECK(std::abs(integrate(f, -1, 3, Weight::none, 1e-14).value - exact) <= 1e-13 * std::max(1.0, std::abs(exact)));
    }
}

TEST_CASE("integrate reports budget exhaustion") {
    auto f = [](double x) { return std::sin(1.0 / x); };
    bool thrown = false;
    try {
        integrate(f, 1e-9, 1.0, Weight::none, 1e-15, 2000);
    } catch (const BudgetExceeded& e) {
        thrown = true;
        CHECK(std::isfinite(e.best_estimate()));
    }
    CHECK(thrown);
}

TEST_CASE("error estimates bound the true error") {
    boost::random::mt19937 rng(12345);
    boost::random::uniform_real_distribution<double> u(0.2, 3.0);
    int covered = 0;
    const int trials = 400;
    for (int k = 0; k < trials; ++k) {
        const double c = u(rng), w = u(rng), d = u(rng);
        auto f = [=](double x) { return std::exp(-c * x) * std::cos(w * x + d); };
        // exact antiderivative of e^{-cx} cos(wx + d)
        auto F = [=](double x) {
            return std::exp(-c * x) * (w * std::sin(w * x + d) - c * std::cos(w * x + d)) / (c * c + w * w);
        };
        const double exact = F(2.0) - F(0.0);
        const auto r = integrate(f, 0.0, 2.0, Weight::none, 1e-9);
        if (std::abs(r.value - exact) <= std::max(r.err_estimate, 1e-15)) ++covered;
    }
    CHECK(covered >= 0.99 * trials);
}

TEST_CASE("integrate_semi_infinite") {
    CHECK(std::abs(integrate_semi_infinite([](double t) { return std::exp(-t); }, 1.0, 1e-11).value - 1.0) < 1e-10);
    CHECK(std::abs(integrate_semi_infinite([](double t) { return t * std::exp(-2 * t); }, 2.0, 1e-11).value - 0.25) < 1e-10);
    const auto r = integrate_semi_infinite([](double t) { return std::exp(-t) / std::sqrt(t); }, 1.0, 1e-9, true);
    CHECK(std::abs(r.value - std::sqrt(std::numbers::pi)) < 1e-8);
    CHECK_THROWS_AS(integrate_semi_infinite([](double t) { return 1.0 / (1.0 + t * t); }, 1.0, 1e-10),
                    AccuracyUnreachable);
}

TEST_CASE("convolution grids") {
    const auto g = build_conv_grid(1.0, 257, KernelSingularity::none);
    CHECK(g.t_nodes.front() == 0.0);
    std::vector<double> k(257), ones(257, 1.0), zero(257, 0.0);
    for (int i = 0; i < 257; ++i) k[i] = std::exp(-g.t_nodes[i]);
    CHECK(std::abs(convolve(g, k, ones).back() - (1.0 - std::exp(-1.0))) < 2e-4);
    for (double v : convolve(g, zero, ones)) CHECK(v == 0.0);
    CHECK_THROWS_AS(convolve(g, std::vector<double>(3), ones), ShapeError);

    const auto gs = build_conv_grid(2.0, 33, KernelSingularity::inv_sqrt);
    // regular factor of s^{-1/2} is 1
    const std::vector<double> one33(33, 1.0);
    const auto c = convolve(gs, one33, one33);
    for (int i = 0; i < 33; ++i) CHECK(std::abs(c[i] - 2.0 * std::sqrt(gs.t_nodes[i])) < 1e-13);
}

TEST_CASE("convolution refinement order") {
    // k(s) = s^{-1/2} e^{-s}, g(s) = cos(s); reference from a fine grid
    auto err_at = [](int n) {
        const auto g = build_conv_grid(1.0, n, KernelSingularity::inv_sqrt);
        std::vector<double> k(n), f(n);
        for (int i = 0; i < n; ++i) {
            k[i] = std::exp(-g.t_nodes[i]);
            f[i] = std::cos(g.t_nodes[i]);
        }
        return convolve(g, k, f).back();
    };
    // exact value of int_0^1 s^{-1/2} e^{-s} cos(1 - s) ds
    const double exact = integrate([](double s) { return std::exp(-s) * std::cos(1.0 - s); }, 0.0, 1.0,
                                   Weight::inv_sqrt_lower, 1e-15).value;
    double prev = std::abs(err_at(17) - exact);
    for (int n : {33, 65, 129}) {
        const double e = std::abs(err_at(n) - exact);
        CHECK(prev / e >= 3.0);
        prev = e;
    }
}
