#include "fhn/solver_fd.hpp"

#include <algorithm>
#include <cmath>

#include "fhn/errors.hpp"
#include "fhn/special.hpp"

namespace fhn {

std::string to_string(FdScheme s) { return s == FdScheme::imex_cn ? "imex_cn" : "explicit_rk4"; }

FdScheme parse_fd_scheme(const std::string& s) {
    if (s == "imex_cn") return FdScheme::imex_cn;
    if (s == "explicit_rk4") return FdScheme::explicit_rk4;
    throw ValidationError("fd.scheme", "expected imex_cn or explicit_rk4, got '" + s + "'");
}

namespace {

using Vec = std::vector<double>;

class Model {
public:
    Model(const ProblemSpec& spec, const FDConfig& cfg, const Vec& x)
        : spec_(spec), cfg_(cfg), x_(x), n_(static_cast<int>(x.size())), h_(x[1] - x[0]) {}

    // eps (A u + boundary) with ghost-node Neumann rows
    void diffusion(const Vec& u, double t, Vec& out) const {
        const double c = spec_.params.epsilon / (h_ * h_);
        const int N = n_ - 1;
        out[0] = c * (2.0 * u[1] - 2.0 * u[0]);
        for (int i = 1; i < N; ++i) out[i] = c * (u[i - 1] - 2.0 * u[i] + u[i + 1]);
        out[N] = c * (2.0 * u[N - 1] - 2.0 * u[N]);
        add_boundary(t, 1.0, out);
    }

    // out += scale * eps * boundary vector at time t
    void add_boundary(double t, double scale, Vec& out) const {
        const double c = scale * spec_.params.epsilon / (h_ * h_);
        out[0] += c * (-2.0 * h_ * eval_time_fn(spec_.phi1, t));
        out[n_ - 1] += c * (2.0 * h_ * eval_time_fn(spec_.phi2, t));
    }

    double react(double u) const {
        switch (cfg_.reaction) {
            case FdReaction::full: return nagumo_f(u, spec_.params.a);
            case FdReaction::linear: return -spec_.params.a * u;
            case FdReaction::none: return 0.0;
        }
        return 0.0;
    }

    void kinetics(const Vec& u, const Vec& v, double t, Vec& ru, Vec& rv) const {
        const auto& p = spec_.params;
        for (int i = 0; i < n_; ++i) {
            ru[i] = -v[i] + react(u[i]);
            rv[i] = p.b * u[i] - p.beta * v[i];
            if (cfg_.source_u) ru[i] += cfg_.source_u(x_[i], t);
            if (cfg_.source_v) rv[i] += cfg_.source_v(x_[i], t);
        }
    }

    int size() const { return n_; }
    double h() const { return h_; }

private:
    const ProblemSpec& spec_;
    const FDConfig& cfg_;
    const Vec& x_;
    int n_;
    double h_;
};

// Factorised (I - theta A) for the Neumann Laplacian A with coefficient `coef` = theta eps / h^2.
class ImplicitDiffusion {
public:
    ImplicitDiffusion(int n, double coef) : n_(n), lower_(n), diag_(n), upper_(n) {
        for (int i = 0; i < n; ++i) {
            diag_[i] = 1.0 + 2.0 * coef;
            lower_[i] = -coef;
            upper_[i] = -coef;
        }
        upper_[0] = -2.0 * coef;
        lower_[n - 1] = -2.0 * coef;
        // forward elimination factors
        cp_.resize(n);
        m_.resize(n);
        m_[0] = diag_[0];
        cp_[0] = upper_[0] / m_[0];
        for (int i = 1; i < n; ++i) {
            m_[i] = diag_[i] - lower_[i] * cp_[i - 1];
            cp_[i] = i < n - 1 ? upper_[i] / m_[i] : 0.0;
        }
    }

    void solve(Vec& rhs) const {
        rhs[0] /= m_[0];
        for (int i = 1; i < n_; ++i) rhs[i] = (rhs[i] - lower_[i] * rhs[i - 1]) / m_[i];
        for (int i = n_ - 2; i >= 0; --i) rhs[i] -= cp_[i] * rhs[i + 1];
    }

private:
    int n_;
    Vec lower_, diag_, upper_, cp_, m_;
};

bool finite(const Vec& a) {
    for (double x : a) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

}  // namespace

Solution solve_fd(const ProblemSpec& spec, const FDConfig& cfg) {
    validate_spec(spec);
    if (cfg.nx < 8) throw ValidationError("fd.nx", "must be >= 8");
    if (!(cfg.dt > 0.0)) throw ValidationError("fd.dt", "must be > 0");
    if (!(cfg.safety > 0.0)) throw ValidationError("fd.safety", "must be > 0");
    if (cfg.nt_out == 1 || cfg.nt_out < 0) throw ValidationError("fd.nt_out", "must be 0 or >= 2");
    const auto& p = spec.params;
    const double T = spec.T;

    long steps = static_cast<long>(std::ceil(T / cfg.dt - 1e-9));
    steps = std::max(steps, 1L);
    if (cfg.nt_out >= 2) {
        const long every = cfg.nt_out - 1;
        steps = ((steps + every - 1) / every) * every;
    }
    const double dt = T / static_cast<double>(steps);
    const int nt = cfg.nt_out >= 2 ? cfg.nt_out : static_cast<int>(steps + 1);
    const long stride = steps / (nt - 1);

    const Grid grid = make_grid(p.L, T, cfg.nx, nt);
    const Vec& x = grid.x_nodes;
    const double h = grid.dx();
    if (cfg.scheme == FdScheme::explicit_rk4 && dt > cfg.safety * h * h / (2.0 * p.epsilon)) {
        throw ValidationError("fd.dt", "explicit_rk4 needs dt <= safety h^2 / (2 eps) = " +
                                           std::to_string(cfg.safety * h * h / (2.0 * p.epsilon)));
    }

    const Model model(spec, cfg, x);
    const int n = cfg.nx;
    Vec u(n), v(n);
    for (int i = 0; i < n; ++i) {
        u[i] = eval_space_fn(spec.u0, x[i]);
        v[i] = eval_space_fn(spec.v0, x[i]);
    }

    Solution sol;
    sol.u = Field("u", grid);
    sol.v = Field("v", grid);
    auto store = [&](int m) {
        for (int i = 0; i < n; ++i) {
            sol.u.at(i, m) = u[i];
            sol.v.at(i, m) = v[i];
        }
    };
    store(0);

    Vec ru(n), rv(n), ru_old(n), rv_old(n), lap(n), rhs(n), us(n), vs(n), ru2(n), rv2(n);
    double last_good = 0.0;

    if (cfg.scheme == FdScheme::imex_cn) {
        const ImplicitDiffusion lhs(n, 0.5 * dt * p.epsilon / (h * h));
        for (long k = 0; k < steps; ++k) {
            const double t = k * dt, t1 = (k + 1) * dt;
            model.kinetics(u, v, t, ru, rv);
            model.diffusion(u, t, lap);
            auto cn_rhs = [&](const Vec& react) {
                for (int i = 0; i < n; ++i) rhs[i] = u[i] + 0.5 * dt * lap[i] + dt * react[i];
                model.add_boundary(t1, 0.5 * dt, rhs);
            };
            if (k == 0) {
                // Heun start
                cn_rhs(ru);
                us = rhs;
                lhs.solve(us);
                for (int i = 0; i < n; ++i) vs[i] = v[i] + dt * rv[i];
                model.kinetics(us, vs, t1, ru2, rv2);
                Vec avg(n);
                for (int i = 0; i < n; ++i) avg[i] = 0.5 * (ru[i] + ru2[i]);
                cn_rhs(avg);
                lhs.solve(rhs);
                for (int i = 0; i < n; ++i) v[i] += 0.5 * dt * (rv[i] + rv2[i]);
            } else {
                Vec ab(n);
                for (int i = 0; i < n; ++i) ab[i] = 1.5 * ru[i] - 0.5 * ru_old[i];
                cn_rhs(ab);
                lhs.solve(rhs);
                for (int i = 0; i < n; ++i) v[i] += dt * (1.5 * rv[i] - 0.5 * rv_old[i]);
            }
            u = rhs;
            ru_old = ru;
            rv_old = rv;
            if (!finite(u) || !finite(v)) throw BlowUpError("solve_fd: non-finite state", last_good);
            last_good = t1;
            if ((k + 1) % stride == 0) store(static_cast<int>((k + 1) / stride));
        }
    } else {
        Vec ku[4], kv[4];
        for (auto& a : ku) a.resize(n);
        for (auto& a : kv) a.resize(n);
        auto rhs_fn = [&](const Vec& uu, const Vec& vv, double t, Vec& du, Vec& dv) {
            model.kinetics(uu, vv, t, du, dv);
            model.diffusion(uu, t, lap);
            for (int i = 0; i < n; ++i) du[i] += lap[i];
        };
        for (long k = 0; k < steps; ++k) {
            const double t = k * dt;
            rhs_fn(u, v, t, ku[0], kv[0]);
            for (int i = 0; i < n; ++i) { us[i] = u[i] + 0.5 * dt * ku[0][i]; vs[i] = v[i] + 0.5 * dt * kv[0][i]; }
            rhs_fn(us, vs, t + 0.5 * dt, ku[1], kv[1]);
            for (int i = 0; i < n; ++i) { us[i] = u[i] + 0.5 * dt * ku[1][i]; vs[i] = v[i] + 0.5 * dt * kv[1][i]; }
            rhs_fn(us, vs, t + 0.5 * dt, ku[2], kv[2]);
            for (int i = 0; i < n; ++i) { us[i] = u[i] + dt * ku[2][i]; vs[i] = v[i] + dt * kv[2][i]; }
            rhs_fn(us, vs, t + dt, ku[3], kv[3]);
            for (int i = 0; i < n; ++i) {
                u[i] += dt / 6.0 * (ku[0][i] + 2.0 * ku[1][i] + 2.0 * ku[2][i] + ku[3][i]);
                v[i] += dt / 6.0 * (kv[0][i] + 2.0 * kv[1][i] + 2.0 * kv[2][i] + kv[3][i]);
            }
            if (!finite(u) || !finite(v)) throw BlowUpError("solve_fd: non-finite state", last_good);
            last_good = t + dt;
            if ((k + 1) % stride == 0) store(static_cast<int>((k + 1) / stride));
        }
    }

    sol.spec = spec;
    sol.method = "fd";
    sol.linearized = cfg.reaction != FdReaction::full;
    sol.fd = FdRunInfo{to_string(cfg.scheme), dt, steps};
    sol.reaction_sup = reaction_sup(sol.u, p.a);
    return sol;
}

namespace {

ConvergenceReport summarise(ConvergenceReport rep) {
    const auto& e = rep.errors;
    double scale = 0.0;
    for (double v : e) scale = std::max(scale, v);
    if (scale <= 1e-14) {
        rep.status = "exact";
        return rep;
    }
    rep.status = "ok";
    for (std::size_t k = 0; k + 1 < e.size(); ++k) {
        const double ratio = rep.steps[k] / rep.steps[k + 1];
        if (!(e[k + 1] < e[k]) || e[k + 1] <= 0.0) {
            rep.status = "inconclusive";
            rep.orders.push_back(std::nan(""));
            continue;
        }
        rep.orders.push_back(std::log(e[k] / e[k + 1]) / std::log(ratio));
    }
    return rep;
}

FDConfig final_only(FDConfig cfg) {
    cfg.nt_out = 2;
    return cfg;
}

}  // namespace

ConvergenceReport convergence_study(const ProblemSpec& spec, const FDConfig& cfg_base, int levels,
                                    RefineAxis axis, const ExactFn& exact) {
    if (levels < 3) throw ValidationError("levels", "must be >= 3");
    ConvergenceReport rep;
    rep.axis = axis;
    std::vector<Solution> runs;
    for (int k = 0; k < levels; ++k) {
        FDConfig cfg = final_only(cfg_base);
        if (axis == RefineAxis::space) {
            cfg.nx = (cfg_base.nx - 1) * (1 << k) + 1;
        } else {
            cfg.dt = cfg_base.dt / (1 << k);
        }
        runs.push_back(solve_fd(spec, cfg));
        rep.steps.push_back(axis == RefineAxis::space ? runs.back().u.grid.dx() : runs.back().fd->dt);
    }
    auto final_u = [](const Solution& s, int i) { return s.u.at(i, s.u.grid.nt - 1); };
    if (exact) {
        for (const auto& s : runs) {
            double e = 0.0;
            for (int i = 0; i < s.u.grid.nx; ++i) {
                e = std::max(e, std::abs(final_u(s, i) - exact(s.u.grid.x_nodes[i], spec.T)));
            }
            rep.errors.push_back(e);
        }
    } else {
        for (int k = 0; k + 1 < levels; ++k) {
            const auto& c = runs[k];
            const auto& f = runs[k + 1];
            const int stride = axis == RefineAxis::space ? 2 : 1;
            double e = 0.0;
            for (int i = 0; i < c.u.grid.nx; ++i) e = std::max(e, std::abs(final_u(c, i) - final_u(f, stride * i)));
            rep.errors.push_back(e);
        }
        rep.steps.pop_back();
    }
    return summarise(std::move(rep));
}

ConvergenceReport convergence_study_nx(const ProblemSpec& spec, const FDConfig& cfg_base,
                                       const std::vector<int>& nx_levels, const ExactFn& exact) {
    if (nx_levels.size() < 3) throw ValidationError("levels", "must be >= 3");
    if (!exact) throw PreconditionError("convergence_study_nx: needs an exact solution");
    ConvergenceReport rep;
    rep.axis = RefineAxis::space;
    for (int nx : nx_levels) {
        FDConfig cfg = final_only(cfg_base);
        cfg.nx = nx;
        const Solution s = solve_fd(spec, cfg);
        double e = 0.0;
        for (int i = 0; i < nx; ++i) {
            e = std::max(e, std::abs(s.u.at(i, 1) - exact(s.u.grid.x_nodes[i], spec.T)));
        }
        rep.steps.push_back(s.u.grid.dx());
        rep.errors.push_back(e);
    }
    return summarise(std::move(rep));
}

}  // namespace fhn
