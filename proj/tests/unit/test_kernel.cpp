#include "doctest.h"

#include <cmath>
#include <numbers>

#include "fhn/errors.hpp"
#include "fhn/kernel.hpp"
#include "fhn/quadrature.hpp"

using namespace fhn;

namespace {

constexpr double kPi = std::numbers::pi;

// Independent K: midpoint rule in phi after y = t sin^2 phi, std::cyl_bessel_j.
double brute_K(double x, double t, double eps, double a, double b, double beta, long n) {
    const double h = 0.5 * kPi / n;
    long double acc = 0.0L;
    for (long i = 0; i < n; ++i) {
        const double phi = (i + 0.5) * h;
        const double s = std::sin(phi), c = std::cos(phi);
        const double y = t * s * s;
        const double z = 2.0 * std::sqrt(b * y * (t - y));
        acc += std::exp(-x * x / (4 * eps * y) - a * y - beta * (t - y)) * std::cyl_bessel_j(1.0, z) * 2.0 *
               std::sqrt(t) * s;
    }
    const double memory = std::sqrt(b) * static_cast<double>(acc * h);
    return (std::exp(-x * x / (4 * eps * t) - a * t) / std::sqrt(t) - memory) / (2 * std::sqrt(kPi * eps));
}

KernelContext unit_ctx() { return KernelContext(ModelParams(1, 1, 1, 1, 1)); }

}  // namespace

TEST_CASE("K reduces to decaying heat kernel without coupling") {
    const KernelContext ctx(test_context_params(0.7, 0.4, 0.0, 1.0, 1.0));
    for (double x : {0.0, 0.3, 1.7}) {
        for (double t : {0.05, 1.0, 4.0}) {
            const double ref = std::exp(-x * x / (4 * 0.7 * t) - 0.4 * t) / (2 * std::sqrt(kPi * 0.7 * t));
            CHECK(std::abs(eval_K(x, t, ctx) - ref) < 1e-14);
        }
    }
}

TEST_CASE("K against a brute-force quadrature") {
    const auto ctx = unit_ctx();
    const double ref = brute_K(1.0, 1.0, 1, 1, 1, 1, 1000000);
    CHECK(std::abs(eval_K(1.0, 1.0, ctx) - ref) <= 1e-9);
    const KernelContext ctx2(ModelParams(0.1, 0.25, 2.0, 0.8, 1.0));
    for (double x : {0.0, 0.2, 0.9}) {
        for (double t : {0.01, 0.7, 6.0}) {
            CAPTURE(x);
            CAPTURE(t);
            CHECK(std::abs(eval_K(x, t, ctx2) - brute_K(x, t, 0.1, 0.25, 2.0, 0.8, 200000)) <= 1e-10);
        }
    }
    CHECK_THROWS_AS(eval_K(0.1, 0.0, ctx), DomainError);
}

TEST_CASE("K obeys its pointwise envelope on a grid") {
    const KernelContext ctx(ModelParams(1, 2, 1, 1, 1), {});
    for (double r = 0.0; r <= 5.0; r += 0.5) {
        for (double t = 0.05; t <= 10.0; t *= 1.7) {
            CHECK(std::abs(eval_K(r, t, ctx)) <= kernel_envelope(r, t, ctx) + 1e-12);
        }
    }
}

TEST_CASE("Laplace closed form") {
    const auto ctx = unit_ctx();
    const double sig = std::sqrt(2.5);
    CHECK(std::abs(laplace_K_closed(1.0, 1.0, ctx) - std::exp(-sig) / (2 * sig)) < 1e-15);
    CHECK(std::abs(laplace_K_closed(1.0, 1.0, ctx) - 0.0650609) < 1e-7);
    CHECK_THROWS_AS(laplace_K_closed(1.0, -1.5, ctx), DomainError);
    const KernelContext heat(test_context_params(1, 1, 0, 1, 1));
    CHECK(std::abs(laplace_K_closed(0.5, 2.0, heat) - std::exp(-0.5 * std::sqrt(3.0)) / (2 * std::sqrt(3.0))) < 1e-15);
}

TEST_CASE("Laplace transform of K matches the closed form") {
    const auto ctx = unit_ctx();
    for (double r : {0.1, 2.0}) {
        for (double s : {0.5, 2.0}) {
            const double num = integrate_semi_infinite([&](double t) { return t > 0 ? std::exp(-s * t) * eval_K(r, t, ctx) : 0.0; },
                                                       s + 0.5, 1e-10, true).value;
            const double ref = laplace_K_closed(r, s, ctx);
            CHECK(std::abs(num - ref) <= 1e-6 * ref);
        }
    }
}

TEST_CASE("theta symmetries") {
    const KernelContext ctx(ModelParams(0.3, 0.5, 1.0, 0.7, 1.0));
    for (double x : {0.0, 0.25, 0.8, 1.3}) {
        for (double t : {0.01, 0.3, 2.0}) {
            const double th = eval_theta(x, t, ctx);
            CHECK(std::abs(eval_theta(x + 2.0, t, ctx) - th) <= 1e-12);
            CHECK(std::abs(eval_theta(-x, t, ctx) - th) <= 1e-12);
        }
    }
    const double t = 0.004;
    CHECK(std::abs(eval_theta(0.1, t, ctx) - eval_K(0.1, t, ctx)) <= ctx.tol_kernel());
}

TEST_CASE("theta truncation is stable under a larger image cap") {
    const KernelContext ctx(ModelParams(1.0, 0.5, 1.0, 0.7, 1.0));
    KernelOptions wide;
    wide.n_image_max = 2000;
    const KernelContext ctx2(ModelParams(1.0, 0.5, 1.0, 0.7, 1.0), wide);
    const auto d = eval_theta_detailed(0.3, 3.0, ctx);
    CHECK(d.tail_bound <= ctx.tol_kernel());
    CHECK(std::abs(d.value - eval_theta(0.3, 3.0, ctx2)) < ctx.tol_kernel());
    // explicitly summing more pairs does not move the value
    double extra = 0.0;
    for (int n = d.image_pairs + 1; n <= d.image_pairs + 10; ++n) extra += eval_K(2.0 * n - 0.3, 3.0, ctx) + eval_K(2.0 * n + 0.3, 3.0, ctx);
    CHECK(std::abs(extra) < ctx.tol_kernel());

    KernelOptions tight;
    tight.n_image_max = 1;
    const KernelContext ctx3(ModelParams(1.0, 0.5, 1.0, 0.7, 1.0), tight);
    CHECK_THROWS_AS(eval_theta(0.3, 3.0, ctx3), BudgetExceeded);
}

TEST_CASE("Green function") {
    const KernelContext ctx(ModelParams(0.3, 0.5, 1.0, 0.7, 1.0));
    for (double x : {0.0, 0.3, 1.0}) {
        for (double xi : {0.1, 0.6}) {
            CHECK(std::abs(eval_G(x, xi, 0.4, ctx) - eval_G(xi, x, 0.4, ctx)) <= 1e-12);
        }
    }
    CHECK(std::abs(eval_G(0, 0, 0.4, ctx) - 2 * eval_theta(0, 0.4, ctx)) <= 1e-15);
    CHECK_THROWS_AS(eval_G(1.2, 0.1, 0.4, ctx), DomainError);
}

TEST_CASE("Laplace theta closed form against the image series") {
    const KernelContext ctx(ModelParams(0.5, 0.5, 1.0, 0.7, 1.3));
    const double s = 1.0, L = 1.3, se = std::sqrt(0.5);
    const double sig = std::sqrt(s + 0.5 + 1.0 / (s + 0.7));
    for (double y : {0.0, 0.4, 1.3}) {
        double acc = 0.0;
        for (int n = -200; n <= 200; ++n) acc += std::exp(-std::abs(y + 2 * n * L) * sig / se);
        acc /= 2 * se * sig;
        CHECK(std::abs(laplace_theta_closed(y, s, ctx) - acc) <= 1e-10 * acc);
    }
    const double big = 1e4;
    const double sb = std::sqrt(big + 0.5 + 1.0 / (big + 0.7));
    CHECK(laplace_theta_closed(0.4, big, ctx) / (std::exp(-0.4 * sb / se) / (2 * se * sb)) == doctest::Approx(1.0));
}

TEST_CASE("Laplace transform of theta matches the closed form") {
    const auto ctx = unit_ctx();
    for (double y : {0.0, 0.5}) {
        const double num = integrate_semi_infinite([&](double t) { return t > 0 ? std::exp(-t) * eval_theta(y, t, ctx) : 0.0; },
                                                   1.0, 1e-9, true).value;
        CHECK(std::abs(num - laplace_theta_closed(y, 1.0, ctx)) <= 1e-6);
    }
}

TEST_CASE("steady profile") {
    const auto ctx = unit_ctx();
    const double s2 = std::sqrt(2.0);
    CHECK(std::abs(steady_profile(0.0, ctx) - std::cosh(s2) / (2 * s2 * std::sinh(s2))) < 1e-15);
    CHECK(std::abs(steady_profile(0.0, ctx) - 0.397974) < 5e-6);
    CHECK(std::abs(steady_profile(1.0, ctx) - 0.182704) < 5e-6);
    for (double x = 0.0; x <= 1.0; x += 0.125) {
        CHECK(steady_profile(x, ctx) >= steady_profile(1.0, ctx));
        CHECK(std::abs(laplace_theta_closed(x, 0.0, ctx) - steady_profile(x, ctx)) <= 1e-12);
    }
}

TEST_CASE("slice agrees with direct evaluation") {
    const KernelContext ctx(ModelParams(0.1, 0.25, 1.0, 0.8, 1.0));
    for (double t : {0.005, 0.1, 1.0, 7.0, 40.0}) {
        const KernelSlice slice(ctx, t);
        for (double x : {0.0, 0.05, 0.3, 1.0}) {
            CAPTURE(t);
            CAPTURE(x);
            CHECK(std::abs(slice.whole_line(x) - eval_K(x, t, ctx)) <= 1e-11);
            if (t <= 7.0) CHECK(std::abs(slice.theta(x) - eval_theta(x, t, ctx)) <= 1e-10);
        }
    }
}

TEST_CASE("slice hat moments against adaptive quadrature") {
    const KernelContext ctx(ModelParams(0.1, 0.25, 1.0, 0.8, 1.0));
    const double h = 1.0 / 16.0;
    for (double t : {0.002, 0.05, 0.8, 6.0}) {
        const KernelSlice slice(ctx, t);
        for (double z : {0.0, 0.0625, 0.5, 1.0}) {
            auto f = [&](double e) { return slice.theta(z - e) * (1.0 - std::abs(e) / h); };
            const double ref = integrate(f, -h, 0.0, Weight::none, 1e-14).value + integrate(f, 0.0, h, Weight::none, 1e-14).value;
            CAPTURE(t);
            CAPTURE(z);
            CHECK(std::abs(slice.theta_hat_moment(z, h) - ref) <= 1e-11);
        }
    }
}

TEST_CASE("periodic heat kernels: image and series forms agree") {
    const KernelContext ctx(ModelParams(1.0, 0.5, 1.0, 0.7, 1.0));
    const KernelSlice slice(ctx, 1.0);
    // sigma = sqrt(2y) straddles the switch at 0.6 L
    for (double y : {0.17, 0.18, 0.19}) {
        for (double z : {0.0, 0.4, 1.0}) {
            double img = 0.0;
            for (int n = -20; n <= 20; ++n) {
                const double d = z + 2.0 * n;
                img += std::exp(-d * d / (4 * y)) / std::sqrt(4 * kPi * y);
            }
            CHECK(std::abs(slice.periodic_heat(z, y) - img) < 1e-14);
        }
    }
    // mass of the periodised heat kernel over one period is 1; hat mass is h
    const double h = 0.1;
    for (double y : {0.0, 0.01, 0.5}) {
        double m = 0.0;
        const int n = 2000;
        for (int i = 0; i < n; ++i) m += slice.periodic_heat_hat(-1.0 + (i + 0.5) * 2.0 / n, y, h) * 2.0 / n;
        CHECK(std::abs(m - h) < 1e-9);
    }
}

TEST_CASE("lattice evaluation matches the generic path") {
    const KernelContext ctx(ModelParams(0.1, 0.25, 1.0, 0.8, 1.0));
    const double h = 1.0 / 32.0;
    std::vector<double> z(65), a(65), b(65), c(65), d(65);
    for (int k = 0; k < 65; ++k) z[k] = k * h;
    for (double t : {0.0004, 0.03, 1.0, 12.0}) {
        const KernelSlice slice(ctx, t);
        slice.theta_batch(z, a);
        slice.theta_lattice(h, b);
        slice.theta_hat_moment_batch(z, h, c);
        slice.theta_hat_moment_lattice(h, d);
        for (int k = 0; k < 65; ++k) {
            CAPTURE(t);
            CAPTURE(k);
            CHECK(std::abs(a[k] - b[k]) <= 1e-12 * std::max(1.0, std::abs(a[k])));
            CHECK(std::abs(c[k] - d[k]) <= 1e-13);
        }
    }
    CHECK_THROWS_AS(KernelSlice(ctx, 1.0).theta_lattice(0.3, a), DomainError);
}

TEST_CASE("signed line mass of K follows the kinetic ODE") {
    // M' = -a M - W, W' = b M - beta W, M(0) = 1, W(0) = 0; here a = 2, b = beta = 1.
    const KernelContext ctx(ModelParams(1, 2, 1, 1, 1));
    const double w = std::sqrt(3.0) / 2.0;
    for (double t : {0.1, 0.5, 1.0, 2.5, 4.0}) {
        const double exact = std::exp(-1.5 * t) * (std::cos(w * t) - 0.5 / w * std::sin(w * t));
        const KernelSlice slice(ctx, t);
        const double half = integrate([&](double y) { return slice.whole_line(y); }, 0.0,
                                      12.0 * std::sqrt(4.0 * t), Weight::none, 1e-13)
                                .value;
        CHECK(2.0 * half == doctest::Approx(exact).scale(0).epsilon(1e-10));
    }
}
