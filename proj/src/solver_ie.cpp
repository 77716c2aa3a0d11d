#include "fhn/solver_ie.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fhn/errors.hpp"
#include "fhn/parallel.hpp"
#include "fhn/quadrature.hpp"
#include "fhn/special.hpp"

namespace fhn {

namespace {

struct TimeNode {
    int panel;
    double s;  ///< lag
    double w;  ///< quadrature weight in s
    double r;  ///< (s - panel dt) / dt
};

std::vector<TimeNode> time_nodes(int panels, double dt, const IeOptions& opt) {
    std::vector<TimeNode> nodes;
    const GaussRule& g = gauss_legendre(opt.time_order);
    // first panel in u = sqrt(s / dt), geometrically graded towards u = 0
    std::vector<double> cuts{0.0};
    for (int l = opt.panel0_levels; l >= 1; --l) cuts.push_back(std::ldexp(1.0, -l));
    cuts.push_back(1.0);
    for (std::size_t b = 0; b + 1 < cuts.size(); ++b) {
        const double mid = 0.5 * (cuts[b] + cuts[b + 1]);
        const double half = 0.5 * (cuts[b + 1] - cuts[b]);
        for (std::size_t k = 0; k < g.nodes.size(); ++k) {
            const double u = mid + half * g.nodes[k];
            nodes.push_back({0, dt * u * u, half * g.weights[k] * 2.0 * dt * u, u * u});
        }
    }
    for (int q = 1; q < panels; ++q) {
        for (std::size_t k = 0; k < g.nodes.size(); ++k) {
            const double r = 0.5 * (1.0 + g.nodes[k]);
            nodes.push_back({q, (q + r) * dt, 0.5 * dt * g.weights[k], r});
        }
    }
    return nodes;
}

void check_consistency(const ProblemSpec& spec, const Grid& grid, const KernelContext& ctx) {
    validate_spec(spec);
    const auto& p = spec.params;
    const auto& c = ctx.params();
    if (p.epsilon != c.epsilon || p.a != c.a || p.b != c.b || p.beta != c.beta || p.L != c.L) {
        throw ValidationError("params", "kernel context was built from different parameters");
    }
    if (grid.nx < 3 || grid.nt < 2) throw ValidationError("grid", "needs nx >= 3 and nt >= 2");
    if (std::abs(grid.x_nodes.back() - p.L) > 1e-12 * p.L) {
        throw ValidationError("grid", "x nodes must span [0, L]");
    }
    if (std::abs(grid.t_nodes.back() - spec.T) > 1e-12 * spec.T) {
        throw ValidationError("grid", "t nodes must span [0, T]");
    }
}

double wall_weight(int j, int nx) { return (j == 0 || j == nx - 1) ? 0.5 : 1.0; }

// out_i += sum_j g_j (table[|i - j|] + table[i + j])
void green_apply(const double* table, const double* g, int nx, double* out) {
    for (int i = 0; i < nx; ++i) {
        double acc = 0.0;
        for (int j = 0; j < nx; ++j) acc += g[j] * (table[std::abs(i - j)] + table[i + j]);
        out[i] += acc;
    }
}

}  // namespace

IeTables build_ie_tables(const ProblemSpec& spec, const Grid& grid, const KernelContext& ctx,
                         const IeOptions& options) {
    check_consistency(spec, grid, ctx);
    if (options.time_order < 1 || options.panel0_levels < 0) {
        throw ValidationError("solver", "time_order >= 1 and panel0_levels >= 0 required");
    }
    IeTables tb;
    tb.nx = grid.nx;
    tb.nt = grid.nt;
    tb.K = 2 * (grid.nx - 1) + 1;
    tb.h = grid.dx();
    tb.dt = grid.dt();
    tb.has_source = !options.linearized || !spec.v0.is_identically_zero();
    tb.has_point = !spec.u0.is_identically_zero();
    tb.has_boundary = !spec.homogeneous_bc();
    const int K = tb.K, nx = tb.nx, nt = tb.nt;
    const int panels = nt - 1;
    const int order = options.kernel_order;

    if (tb.has_source || tb.has_boundary) {
        const auto nodes = time_nodes(panels, tb.dt, options);
        const std::size_t n = nodes.size();
        std::vector<double> mom(tb.has_source ? n * K : 0);
        std::vector<double> th(tb.has_boundary ? n * nx : 0);
        parallel_for(0, n, [&](std::size_t r) {
            const KernelSlice slice(ctx, nodes[r].s, order);
            if (tb.has_source) slice.theta_hat_moment_lattice(tb.h, {mom.data() + r * K, static_cast<std::size_t>(K)});
            if (tb.has_boundary) slice.theta_lattice(tb.h, {th.data() + r * nx, static_cast<std::size_t>(nx)});
        });
        if (tb.has_source) {
            std::vector<double> w0(static_cast<std::size_t>(panels) * K, 0.0), w1(w0.size(), 0.0);
            for (std::size_t r = 0; r < n; ++r) {
                const auto& nd = nodes[r];
                double* a0 = &w0[static_cast<std::size_t>(nd.panel) * K];
                double* a1 = &w1[static_cast<std::size_t>(nd.panel) * K];
                const double* m = &mom[r * K];
                for (int k = 0; k < K; ++k) {
                    a0[k] += nd.w * (1.0 - nd.r) * m[k];
                    a1[k] += nd.w * nd.r * m[k];
                }
            }
            tb.lag.assign(static_cast<std::size_t>(panels) * K, 0.0);
            tb.end.assign(static_cast<std::size_t>(nt) * K, 0.0);
            for (int l = 0; l < panels; ++l) {
                for (int k = 0; k < K; ++k) {
                    tb.lag[l * K + k] = w0[l * K + k] + (l >= 1 ? w1[(l - 1) * K + k] : 0.0);
                }
            }
            for (int m = 1; m < nt; ++m) {
                std::copy_n(&w1[(m - 1) * K], K, &tb.end[m * K]);
            }
        }
        if (tb.has_boundary) {
            tb.bnd_theta = std::move(th);
            for (const auto& nd : nodes) {
                tb.bnd_s.push_back(nd.s);
                tb.bnd_w.push_back(nd.w);
                tb.bnd_panel.push_back(nd.panel);
            }
        }
    }
    if (tb.has_point) {
        tb.point.assign(static_cast<std::size_t>(nt) * K, 0.0);
        tb.point[0] = 1.0;
        tb.point[K - 1] = 1.0;  // the hat at offset 2L is the same hat
        parallel_for(1, nt, [&](std::size_t m) {
            const KernelSlice slice(ctx, grid.t_nodes[m], order);
            slice.theta_hat_moment_lattice(tb.h, {tb.point.data() + m * K, static_cast<std::size_t>(K)});
        });
    }
    return tb;
}

namespace {

// Green integral of a source given row by row (g_p[j] = c_j S(x_j, t_p)).
Field green_integral(const IeTables& tb, const Grid& grid, const std::vector<double>& g,
                     const std::string& label) {
    Field out(label, grid);
    const int nx = tb.nx, nt = tb.nt, K = tb.K;
    std::vector<double> col(static_cast<std::size_t>(nt) * nx, 0.0);
    parallel_for(1, nt, [&](std::size_t m) {
        double* o = &col[m * nx];
        green_apply(&tb.end[m * K], &g[0], nx, o);
        for (std::size_t p = 1; p <= m; ++p) green_apply(&tb.lag[(m - p) * K], &g[p * nx], nx, o);
    });
    for (int m = 0; m < nt; ++m) {
        for (int i = 0; i < nx; ++i) out.at(i, m) = col[static_cast<std::size_t>(m) * nx + i];
    }
    return out;
}

Field assemble_from_tables(const ProblemSpec& spec, const Grid& grid, const IeTables& tb) {
    Field N("N", grid);
    const int nx = tb.nx, nt = tb.nt, K = tb.K;
    const double eps = spec.params.epsilon;
    std::vector<double> u0(nx), v0(nx);
    for (int j = 0; j < nx; ++j) {
        u0[j] = eval_space_fn(spec.u0, grid.x_nodes[j]);
        v0[j] = eval_space_fn(spec.v0, grid.x_nodes[j]);
    }
    if (tb.has_point) {
        std::vector<double> g(nx), col(nx);
        for (int j = 0; j < nx; ++j) g[j] = wall_weight(j, nx) * u0[j];
        for (int m = 0; m < nt; ++m) {
            std::fill(col.begin(), col.end(), 0.0);
            green_apply(&tb.point[static_cast<std::size_t>(m) * K], g.data(), nx, col.data());
            for (int i = 0; i < nx; ++i) N.at(i, m) += col[i];
        }
    }
    if (!spec.v0.is_identically_zero()) {
        std::vector<double> g(static_cast<std::size_t>(nt) * nx);
        for (int p = 0; p < nt; ++p) {
            const double decay = std::exp(-spec.params.beta * grid.t_nodes[p]);
            for (int j = 0; j < nx; ++j) g[p * nx + j] = -wall_weight(j, nx) * v0[j] * decay;
        }
        const Field mem = green_integral(tb, grid, g, "v0");
        for (std::size_t k = 0; k < N.values.size(); ++k) N.values[k] += mem.values[k];
    }
    if (tb.has_boundary) {
        const std::size_t n = tb.bnd_s.size();
        for (int m = 1; m < nt; ++m) {
            const double tm = grid.t_nodes[m];
            for (std::size_t r = 0; r < n && tb.bnd_panel[r] < m; ++r) {
                const double arg = std::max(0.0, tm - tb.bnd_s[r]);
                const double c1 = -2.0 * eps * tb.bnd_w[r] * eval_time_fn(spec.phi1, arg);
                const double c2 = 2.0 * eps * tb.bnd_w[r] * eval_time_fn(spec.phi2, arg);
                const double* th = &tb.bnd_theta[r * nx];
                for (int i = 0; i < nx; ++i) N.at(i, m) += c1 * th[i] + c2 * th[nx - 1 - i];
            }
        }
    }
    return N;
}

}  // namespace

Field assemble_N(const ProblemSpec& spec, const Grid& grid, const KernelContext& ctx,
                 const IeOptions& options) {
    IeOptions opt = options;
    opt.linearized = true;  // the cubic source is not part of N
    const IeTables tb = build_ie_tables(spec, grid, ctx, opt);
    return assemble_from_tables(spec, grid, tb);
}

IeSystem::IeSystem(const ProblemSpec& spec, const Grid& grid, const KernelContext& ctx,
                   const IeOptions& options)
    : spec_(spec), grid_(grid), options_(options) {
    if (!(options.tol_fix > 0.0)) throw ValidationError("tol_fix", "must be > 0");
    if (options.max_iter < 1) throw ValidationError("max_iter", "must be >= 1");
    if (!(options.rect.u_min < options.rect.u_max) || !(options.rect.v_min < options.rect.v_max)) {
        throw ValidationError("rect", "empty rectangle");
    }
    tables_ = build_ie_tables(spec, grid, ctx, options);
    N_ = assemble_from_tables(spec, grid, tables_);
    const auto& p = spec.params;
    lipschitz_ = options.linearized ? 0.0 : lipschitz_F_range(options.rect.u_min, options.rect.u_max, p.a);
    omega_ = std::min(p.a, p.beta);
    sqrt_b_ = std::sqrt(p.b);
    window_steps_ = 1;
    const int max_steps = grid.nt - 1;
    while (window_steps_ < max_steps && contraction_estimate(window_steps_ + 1) <= options.rho_max) {
        ++window_steps_;
    }
}

double IeSystem::contraction_estimate(int steps) const {
    // Lipschitz constant times 2 int_0^S (1 + sqrt(b) pi s) e^{-omega s} ds
    const double S = steps * grid_.dt();
    const double w = omega_;
    const double e = std::exp(-w * S);
    const double i0 = -std::expm1(-w * S) / w;
    const double i1 = (1.0 - e * (1.0 + w * S)) / (w * w);
    return lipschitz_ * 2.0 * (i0 + sqrt_b_ * std::numbers::pi * i1);
}

void IeSystem::source_row(const Field& u, int p, std::vector<double>& g) const {
    const int nx = grid_.nx;
    g.resize(nx);
    for (int j = 0; j < nx; ++j) {
        g[j] = options_.linearized ? 0.0 : wall_weight(j, nx) * nagumo_nonlinear(u.at(j, p), spec_.params.a);
    }
}

void IeSystem::apply_lag(const double* table, const double* g, double* out) const {
    green_apply(table, g, grid_.nx, out);
}

Field IeSystem::duhamel(const Field& u) const {
    if (u.grid.nx != grid_.nx || u.grid.nt != grid_.nt) throw ShapeError("duhamel: field does not match the grid");
    if (options_.linearized) return Field("D", grid_);
    std::vector<double> g(static_cast<std::size_t>(grid_.nt) * grid_.nx), row;
    for (int p = 0; p < grid_.nt; ++p) {
        source_row(u, p, row);
        std::copy(row.begin(), row.end(), g.begin() + static_cast<std::ptrdiff_t>(p) * grid_.nx);
    }
    return green_integral(tables_, grid_, g, "D");
}

WindowReport IeSystem::picard_window(Field& u, int m0, int m1) const {
    const int nx = grid_.nx, K = tables_.K;
    if (m0 < 0 || m1 <= m0 || m1 >= grid_.nt) throw DomainError("picard_window: bad window bounds");
    WindowReport rep;
    rep.t_start = grid_.t_nodes[m0];
    rep.t_end = grid_.t_nodes[m1];
    rep.contraction_estimate = contraction_estimate(m1 - m0);
    const int w = m1 - m0;

    if (options_.linearized) {
        for (int m = m0 + 1; m <= m1; ++m) {
            for (int i = 0; i < nx; ++i) u.at(i, m) = N_.at(i, m);
        }
        rep.iterations = 1;
        return rep;
    }

    // history from nodes 0..m0
    std::vector<std::vector<double>> hist_src(m0 + 1);
    for (int p = 0; p <= m0; ++p) source_row(u, p, hist_src[p]);
    std::vector<double> hist(static_cast<std::size_t>(w) * nx, 0.0);
    parallel_for(0, w, [&](std::size_t k) {
        const int m = m0 + 1 + static_cast<int>(k);
        double* o = &hist[k * nx];
        green_apply(&tables_.end[static_cast<std::size_t>(m) * K], hist_src[0].data(), nx, o);
        for (int p = 1; p <= m0; ++p) green_apply(&tables_.lag[static_cast<std::size_t>(m - p) * K], hist_src[p].data(), nx, o);
    });

    std::vector<std::vector<double>> src(w);
    std::vector<double> next(static_cast<std::size_t>(w) * nx);
    double prev_res = -1.0;
    for (int it = 1; it <= options_.max_iter; ++it) {
        for (int k = 0; k < w; ++k) source_row(u, m0 + 1 + k, src[k]);
        parallel_for(0, w, [&](std::size_t k) {
            double* o = &next[k * nx];
            const int m = m0 + 1 + static_cast<int>(k);
            for (int i = 0; i < nx; ++i) o[i] = N_.at(i, m) + hist[k * nx + i];
            for (std::size_t p = 0; p <= k; ++p) green_apply(&tables_.lag[(k - p) * K], src[p].data(), nx, o);
        });
        double res = 0.0;
        for (int k = 0; k < w; ++k) {
            const int m = m0 + 1 + k;
            for (int i = 0; i < nx; ++i) {
                const double val = next[static_cast<std::size_t>(k) * nx + i];
                if (!std::isfinite(val) || val < options_.rect.u_min || val > options_.rect.u_max) {
                    throw DivergenceError("picard_window: iterate left the invariant rectangle at x = " +
                                              std::to_string(grid_.x_nodes[i]),
                                          grid_.t_nodes[m]);
                }
                res = std::max(res, std::abs(val - u.at(i, m)));
                u.at(i, m) = val;
            }
        }
        if (prev_res > 1e-14) rep.observed_ratio = std::max(rep.observed_ratio, res / prev_res);
        prev_res = res;
        rep.iterations = it;
        rep.final_residual = res;
        if (res <= options_.tol_fix) return rep;
    }
    throw NonContraction("picard_window: no convergence on [" + std::to_string(rep.t_start) + ", " +
                             std::to_string(rep.t_end) + "]",
                         rep.final_residual);
}

Field recover_v(const Field& u, const ProblemSpec& spec, const Grid& grid) {
    if (u.grid.nx != grid.nx || u.grid.nt != grid.nt) throw ShapeError("recover_v: field does not match the grid");
    const auto& p = spec.params;
    const ConvGrid cg = build_conv_grid(grid.t_nodes.back(), grid.nt, KernelSingularity::none);
    std::vector<double> k(grid.nt);
    for (int m = 0; m < grid.nt; ++m) k[m] = std::exp(-p.beta * cg.t_nodes[m]);
    Field v("v", grid);
    parallel_for(0, grid.nx, [&](std::size_t i) {
        const auto row = u.row(static_cast<int>(i));
        const auto conv = convolve(cg, k, row);
        const double v0 = eval_space_fn(spec.v0, grid.x_nodes[i]);
        for (int m = 0; m < grid.nt; ++m) {
            v.at(static_cast<int>(i), m) = v0 * std::exp(-p.beta * grid.t_nodes[m]) + p.b * conv[m];
        }
    });
    return v;
}

Solution solve_ie(const ProblemSpec& spec, const Grid& grid, const KernelContext& ctx,
                  const IeOptions& options) {
    const IeSystem sys(spec, grid, ctx, options);
    Field u("u", grid);
    for (int i = 0; i < grid.nx; ++i) u.at(i, 0) = eval_space_fn(spec.u0, grid.x_nodes[i]);
    PicardReport report;
    const int last = grid.nt - 1;
    for (int m0 = 0; m0 < last;) {
        const int m1 = std::min(m0 + sys.window_steps(), last);
        for (int m = m0 + 1; m <= m1; ++m) {
            for (int i = 0; i < grid.nx; ++i) u.at(i, m) = u.at(i, m0);
        }
        report.windows.push_back(sys.picard_window(u, m0, m1));
        m0 = m1;
    }
    report.converged = true;

    Solution sol;
    sol.v = recover_v(u, spec, grid);
    sol.u = std::move(u);
    sol.spec = spec;
    sol.method = "ie";
    sol.linearized = options.linearized;
    sol.picard = std::move(report);
    sol.reaction_sup = reaction_sup(sol.u, spec.params.a);
    return sol;
}

double residual_ie(const Solution& sol, const KernelContext& ctx) {
    const Grid& grid = sol.u.grid;
    IeOptions opt;
    opt.linearized = sol.linearized;
    opt.time_order = 16;
    opt.panel0_levels = 9;
    const double sb = std::sqrt(sol.spec.params.b);
    opt.kernel_order = std::clamp(2 * (96 + static_cast<int>(4.0 * sb * sol.spec.T)), 192, 4000);
    const IeSystem sys(sol.spec, grid, ctx, opt);
    const Field D = sys.duhamel(sol.u);
    double worst = 0.0;
    for (std::size_t k = 0; k < sol.u.values.size(); ++k) {
        worst = std::max(worst, std::abs(sol.u.values[k] - sys.N().values[k] - D.values[k]));
    }
    return worst;
}

}  // namespace fhn
