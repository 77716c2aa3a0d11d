#include "doctest.h"

#include <cmath>
#include <numbers>

#include <boost/numeric/odeint.hpp>

#include "fhn/errors.hpp"
#include "fhn/solver_fd.hpp"
#include "fhn/special.hpp"

using namespace fhn;

namespace {

constexpr double kPi = std::numbers::pi;

ProblemSpec bench_spec(double T) {
    ProblemSpec s;
    s.params = ModelParams(0.1, 0.25, 1.0, 0.8, 1.0);
    s.T = T;
    return s;
}

}  // namespace

TEST_CASE("zero data stays zero") {
    const ProblemSpec s = bench_spec(1.0);
    for (auto scheme : {FdScheme::imex_cn, FdScheme::explicit_rk4}) {
        FDConfig c;
        c.nx = 17;
        c.dt = 1e-3;
        c.scheme = scheme;
        c.nt_out = 11;
        const Solution sol = solve_fd(s, c);
        for (double u : sol.u.values) CHECK(u == 0.0);
        for (double v : sol.v.values) CHECK(v == 0.0);
        CHECK(sol.fd->scheme == to_string(scheme));
    }
    FDConfig c;
    c.nx = 9;
    c.dt = 0.01;
    const auto rep = convergence_study(s, c, 3, RefineAxis::space);
    CHECK(rep.status == "exact");
}

TEST_CASE("uniform data follows the kinetic ODE") {
    ProblemSpec s = bench_spec(5.0);
    s.u0 = SpaceFunction::constant(0.2, 1.0);
    s.v0 = SpaceFunction::constant(0.05, 1.0);
    const auto& p = s.params;

    using State = std::vector<double>;
    State y{0.2, 0.05};
    namespace ode = boost::numeric::odeint;
    ode::integrate_adaptive(ode::make_dense_output(1e-10, 1e-10, ode::runge_kutta_dopri5<State>()),
                            [&](const State& z, State& d, double) {
                                d[0] = -z[1] + nagumo_f(z[0], p.a);
                                d[1] = p.b * z[0] - p.beta * z[1];
                            },
                            y, 0.0, 5.0, 1e-3);

    FDConfig c;
    c.nx = 9;
    c.dt = 1e-3;
    c.nt_out = 2;
    const Solution sol = solve_fd(s, c);
    for (int i = 0; i < c.nx; ++i) {
        CHECK(std::abs(sol.u.at(i, 1) - y[0]) <= 1e-6);
        CHECK(std::abs(sol.v.at(i, 1) - y[1]) <= 1e-6);
    }
}

TEST_CASE("manufactured solution converges at second order in space") {
    // u* = e^{-t} cos(pi x / L), v* = 0, with zero wall fluxes.
    ProblemSpec s = bench_spec(0.5);
    const auto& p = s.params;
    const double k = kPi / p.L;
    s.u0 = SpaceFunction::cosine({0.0, 1.0}, p.L);
    auto exact = [k](double x, double t) { return std::exp(-t) * std::cos(k * x); };
    FDConfig c;
    c.dt = 1e-4;
    c.reaction = FdReaction::full;
    c.source_u = [&, exact](double x, double t) {
        const double u = exact(x, t);
        return -u + p.epsilon * k * k * u - nagumo_f(u, p.a);
    };
    c.source_v = [&, exact](double x, double t) { return -p.b * exact(x, t); };
    const auto rep = convergence_study_nx(s, c, {32, 64, 128}, exact);
    REQUIRE(rep.orders.size() == 2);
    for (double o : rep.orders) CHECK(std::abs(o - 2.0) <= 0.2);
    CHECK(rep.status == "ok");
}

TEST_CASE("temporal self-convergence of the IMEX scheme") {
    ProblemSpec s = bench_spec(1.0);
    s.u0 = SpaceFunction::cosine({0.1, 0.3}, 1.0);
    FDConfig c;
    c.nx = 33;
    c.dt = 0.02;
    const auto rep = convergence_study(s, c, 4, RefineAxis::time);
    REQUIRE(rep.orders.size() == 2);
    for (double o : rep.orders) CHECK(std::abs(o - 2.0) <= 0.3);
}

TEST_CASE("pure diffusion conserves mass") {
    ProblemSpec s;
    s.params = test_context_params(0.1, 0.25, 0.0, 0.0, 1.0);
    s.u0 = SpaceFunction::cosine({0.3, 0.2, -0.1}, 1.0);
    s.T = 2.0;
    FDConfig c;
    c.nx = 33;
    c.dt = 1e-3;
    c.nt_out = 21;
    c.reaction = FdReaction::none;
    const Solution sol = solve_fd(s, c);
    auto mass = [&](int m) {
        double acc = 0.0;
        for (int i = 0; i < c.nx; ++i) acc += (i == 0 || i == c.nx - 1 ? 0.5 : 1.0) * sol.u.at(i, m);
        return acc / (c.nx - 1);
    };
    const double m0 = mass(0);
    for (int m = 1; m < 21; ++m) CHECK(std::abs(mass(m) - m0) <= 1e-10 * s.T);
}

TEST_CASE("configuration errors") {
    const ProblemSpec s = bench_spec(1.0);
    FDConfig c;
    c.nx = 4;
    CHECK_THROWS_AS(solve_fd(s, c), ValidationError);
    c.nx = 65;
    c.scheme = FdScheme::explicit_rk4;
    c.dt = 0.01;
    CHECK_THROWS_AS(solve_fd(s, c), ValidationError);
    CHECK(parse_fd_scheme("explicit_rk4") == FdScheme::explicit_rk4);
    CHECK_THROWS_AS(parse_fd_scheme("euler"), ValidationError);
}
