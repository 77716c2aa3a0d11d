#include "doctest.h"

#include <cmath>

#include "fhn/analysis.hpp"
#include "fhn/errors.hpp"
#include "fhn/solver_ie.hpp"

using namespace fhn;

namespace {

const KernelContext& bound_ctx() {
    static const KernelContext ctx(ModelParams(1, 2, 1, 1, 1));
    return ctx;
}

const KernelContext& unit_ctx() {
    static const KernelContext ctx(ModelParams(1, 1, 1, 1, 1));
    return ctx;
}

void check_invariant(const CheckReport& r) {
    if (r.skipped()) return;
    CHECK(r.passed == (r.worst_margin >= -r.tolerance));
    CHECK(r.status == (r.passed ? "pass" : "fail"));
}

ProblemSpec small_problem(double amp) {
    ProblemSpec s;
    s.params = ModelParams(0.1, 0.25, 1.0, 0.8, 1.0);
    s.u0 = SpaceFunction::cosine({0.0, amp}, 1.0);
    s.v0 = SpaceFunction::constant(0.0, 1.0);
    s.T = 2.0;
    return s;
}

Solution solve_small(double amp, int nx = 17, int nt = 41) {
    const ProblemSpec s = small_problem(amp);
    const KernelContext ctx(s.params);
    return solve_ie(s, make_grid(1.0, s.T, nx, nt), ctx);
}

}  // namespace

TEST_CASE("Sobol points are deterministic and inside the unit cube") {
    const auto a = sobol_points(64, 2, 3);
    const auto b = sobol_points(64, 2, 3);
    CHECK(a == b);
    for (const auto& p : a) {
        for (double c : p) {
            CHECK(c > 0.0);
            CHECK(c <= 1.0);
        }
    }
    const auto skipped = sobol_points(61, 2, 0);
    const auto full = sobol_points(64, 2, 0);
    CHECK(a.front() != full.front());
    CHECK(a[0] == sobol_points(4, 2, 0)[3]);
    CHECK(skipped[3] == full[3]);
}

TEST_CASE("kernel bounds hold at default parameters") {
    SamplePlan plan;
    plan.samples = 256;
    const auto reports = check_kernel_bounds(bound_ctx(), plan);
    REQUIRE(reports.size() == 5);
    for (const auto& r : reports) {
        CAPTURE(r.name);
        check_invariant(r);
        CHECK(r.passed);
        CHECK(r.samples == 256);
        CHECK(r.seed == 0u);
    }
    CHECK(reports[2].bound == doctest::Approx(2.16608).scale(0).epsilon(1e-5));
    CHECK(reports[4].bound == doctest::Approx(2.16608).scale(0).epsilon(1e-5));
}

TEST_CASE("corrupted kernel violates the pointwise envelope") {
    SamplePlan plan;
    plan.samples = 64;
    const auto reports = check_kernel_bounds(scaled_kernel_for_testing(bound_ctx(), 10.0), plan);
    CHECK(reports[0].name == "kernel_envelope");
    CHECK_FALSE(reports[0].passed);
    CHECK(reports[0].worst_margin < -0.1);
    for (const auto& r : reports) check_invariant(r);
}

TEST_CASE("theta decay") {
    const auto r = check_theta_decay(bound_ctx(), 0.0);
    check_invariant(r);
    CHECK(r.passed);
    CHECK(std::abs(eval_theta(0.0, 40.0, bound_ctx())) < 1e-6);

    const double beta0 = bound_ctx().consts().beta0;
    const auto partial = check_theta_decay(bound_ctx(), 0.0, 10.0 * beta0);
    CHECK(partial.passed);
    CHECK(partial.worst_margin > 0.0);

    const auto skipped = check_theta_decay(unit_ctx(), 0.0);
    CHECK(skipped.status == "skipped: C0 undefined");
    CHECK(skipped.passed);
}

TEST_CASE("theta time integral converges to the steady profile") {
    const auto r0 = check_steady_limit(unit_ctx(), 0.0, 1e-3);
    check_invariant(r0);
    CHECK(r0.passed);
    const double I0 = theta_time_integral(unit_ctx(), 0.0, 40.0, [](double) { return 1.0; });
    CHECK(std::abs(I0 - 0.397974) <= 1e-3);
    CHECK(I0 == doctest::Approx(steady_profile(0.0, unit_ctx())).scale(0).epsilon(1e-10));

    const auto rL = check_steady_limit(unit_ctx(), 1.0, 1e-3);
    CHECK(rL.passed);
    const double IL = theta_time_integral(unit_ctx(), 1.0, 40.0, [](double) { return 1.0; });
    CHECK(std::abs(IL - 1.0 / (2.0 * std::sqrt(2.0) * std::sinh(std::sqrt(2.0)))) <= 1e-3);
    CHECK(IL == doctest::Approx(laplace_theta_closed(1.0, 0.0, unit_ctx())).scale(0).epsilon(1e-10));
}

TEST_CASE("tail bound dominates the computed tail") {
    const double T = 3.0;
    const double tail = theta_time_integral(bound_ctx(), 0.0, 40.0, [](double) { return 1.0; }, true) -
                        theta_time_integral(bound_ctx(), 0.0, T, [](double) { return 1.0; }, true);
    CHECK(tail <= theta_tail_bound(bound_ctx(), T));
    CHECK(theta_tail_bound(bound_ctx(), 40.0) < 1e-12);
}

TEST_CASE("convolution limits") {
    const auto rs = check_convolution_limits(unit_ctx(), TimeFunction::saturating(1.0, 1.0), 0.0);
    REQUIRE(rs.size() == 2);
    for (const auto& r : rs) {
        check_invariant(r);
        CHECK(r.passed);
    }
    CHECK(rs[0].name == "convolution_limit_phi");
    CHECK(rs[0].quantity <= 1e-2);
    CHECK(rs[1].quantity <= 1e-2);

    const double c = 0.7;
    const auto rc = check_convolution_limits(unit_ctx(), TimeFunction::constant(c), 0.0);
    const double direct = theta_time_integral(unit_ctx(), 0.0, 40.0, [](double) { return 1.0; });
    const double conv = c * steady_profile(0.0, unit_ctx()) - rc[0].quantity;
    CHECK(std::abs(c * direct - conv) <= 1e-10);
    CHECK(rc[1].quantity == 0.0);
}

TEST_CASE("convolution limits require declared metadata") {
    const auto phi = TimeFunction::saturating(1.0, 1.0).without_declared_limit();
    CHECK_THROWS_AS(check_convolution_limits(unit_ctx(), phi, 0.0), PreconditionError);
}

TEST_CASE("solution bounds") {
    SUBCASE("zero data") {
        const Solution sol = solve_small(0.0);
        const KernelContext ctx(sol.spec.params);
        const auto r = check_solution_bounds(sol, ctx);
        check_invariant(r);
        CHECK(r.passed);
        CHECK(r.worst_margin >= 0.0);
        CHECK(r.quantity == 0.0);
    }
    SUBCASE("small amplitude") {
        const Solution sol = solve_small(0.1);
        const KernelContext ctx(sol.spec.params);
        const auto r = check_solution_bounds(sol, ctx);
        CHECK(r.passed);
        CHECK(r.worst_margin > 0.0);
    }
    SUBCASE("corrupted solution") {
        Solution sol = solve_small(0.1);
        for (double& u : sol.u.values) u *= 100.0;
        const KernelContext ctx(sol.spec.params);
        const auto r = check_solution_bounds(sol, ctx);
        check_invariant(r);
        CHECK_FALSE(r.passed);
    }
    SUBCASE("boundary fluxes are rejected") {
        Solution sol = solve_small(0.0);
        sol.spec.phi1 = TimeFunction::constant(0.1);
        const KernelContext ctx(sol.spec.params);
        CHECK_THROWS_AS(check_solution_bounds(sol, ctx), PreconditionError);
    }
    SUBCASE("mismatched context") {
        const Solution sol = solve_small(0.0);
        CHECK_THROWS_AS(check_solution_bounds(sol, unit_ctx()), PreconditionError);
    }
}

TEST_CASE("invariant rectangle monitor") {
    const Solution zero = solve_small(0.0);
    const auto r0 = invariant_rectangle_monitor(zero, Rectangle{-1, 1, -1, 1});
    CHECK(r0.passed);
    CHECK(r0.notes == "no exit");

    const Solution sol = solve_small(0.1);
    CHECK(invariant_rectangle_monitor(sol, Rectangle{}).passed);

    double vmax = 0.0;
    for (double v : sol.v.values) vmax = std::max(vmax, v);
    REQUIRE(vmax > 0.0);
    const auto fail = invariant_rectangle_monitor(sol, Rectangle{-0.1, 0.1, -1.0, 0.5 * vmax});
    check_invariant(fail);
    CHECK_FALSE(fail.passed);
    CHECK(fail.notes.rfind("first exit at", 0) == 0);

    CHECK_THROWS_AS(invariant_rectangle_monitor(sol, Rectangle{-0.05, 0.05, -1, 1}), PreconditionError);
}

TEST_CASE("run_checks sorts reports and rejects unknown names") {
    auto cfg = default_verify_config();
    const auto rs = run_checks(cfg, {"steady_limit", "convolution_limits"});
    REQUIRE(rs.size() == 3);
    CHECK(rs[0].name == "convolution_limit_dphi");
    CHECK(rs[1].name == "convolution_limit_phi");
    CHECK(rs[2].name == "steady_limit");
    CHECK_THROWS_AS(run_checks(cfg, {"nope"}), ValidationError);
}
