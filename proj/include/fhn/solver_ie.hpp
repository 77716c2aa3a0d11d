#pragma once

#include <vector>

#include "fhn/field.hpp"
#include "fhn/kernel.hpp"
#include "fhn/model.hpp"

namespace fhn {

struct IeOptions {
    double tol_fix = 1e-9;  ///< sup-norm update that ends a Picard window
    int max_iter = 100;
    Rectangle rect;         ///< iterates leaving [u_min, u_max] raise DivergenceError
    bool linearized = false;  ///< drop u^2 (a + 1 - u) from the source
    double rho_max = 0.5;   ///< target a-priori contraction per window

    // quadrature resolution of the product-integration tables
    int kernel_order = 0;   ///< phi nodes per kernel slice (0: automatic)
    int time_order = 8;     ///< Gauss-Legendre nodes per time panel
    int panel0_levels = 6;  ///< geometric refinements of the first panel
};

/// Product-integration tables on a fixed grid.
///
/// The source is taken piecewise linear in x (hat functions) and in t. With
/// A(k, s) the hat moment of theta(., s) at offset k h, the Green moment of hat
/// j seen from node i is c_j [A(|i - j|, s) + A(i + j, s)], c_j = 1/2 at the
/// walls. `lag[l]` integrates A against the time hat at lag l, `end[m]` the
/// half hat at tau = 0 seen from t_m, and `point[m]` holds A(., t_m).
struct IeTables {
    int nx = 0, nt = 0, K = 0;
    double h = 0.0, dt = 0.0;
    std::vector<double> lag;    ///< (nt - 1) x K
    std::vector<double> end;    ///< nt x K, row 0 unused
    std::vector<double> point;  ///< nt x K, row 0 = unit impulse
    // boundary quadrature: nodes s with weights, theta(x_i, s) for i < nx
    std::vector<double> bnd_s, bnd_w;
    std::vector<int> bnd_panel;
    std::vector<double> bnd_theta;  ///< n_nodes x nx
    bool has_source = false, has_point = false, has_boundary = false;
};

/// Discretised integral equation u = N + D(u) for one spec on one grid.
class IeSystem {
public:
    IeSystem(const ProblemSpec& spec, const Grid& grid, const KernelContext& ctx,
             const IeOptions& options = {});

    const Field& N() const noexcept { return N_; }
    const IeTables& tables() const noexcept { return tables_; }
    const Grid& grid() const noexcept { return grid_; }
    const IeOptions& options() const noexcept { return options_; }

    /// D(u) at every node: the space-time Green integral of u^2 (a + 1 - u).
    /// Identically zero in linearized mode.
    Field duhamel(const Field& u) const;

    /// Number of time steps per window and the matching a-priori contraction bound.
    int window_steps() const noexcept { return window_steps_; }
    double contraction_estimate(int steps) const;

    /// Iterates nodes m0 < m <= m1 of u to a fixed point; nodes <= m0 are
    /// taken as converged history. On entry u holds the initial iterate.
    WindowReport picard_window(Field& u, int m0, int m1) const;

private:
    void source_row(const Field& u, int p, std::vector<double>& g) const;
    void apply_lag(const double* table, const double* g, double* out) const;

    ProblemSpec spec_;
    Grid grid_;
    IeOptions options_;
    IeTables tables_;
    Field N_;
    double lipschitz_ = 0.0;
    double omega_ = 0.0, sqrt_b_ = 0.0;
    int window_steps_ = 1;
};

IeTables build_ie_tables(const ProblemSpec& spec, const Grid& grid, const KernelContext& ctx,
                         const IeOptions& options);

/// Data term: u0 propagated by G, the two wall fluxes convolved with theta,
/// and the v0 memory term written as the Green integral of -v0 e^{-beta t}.
Field assemble_N(const ProblemSpec& spec, const Grid& grid, const KernelContext& ctx,
                 const IeOptions& options = {});

Solution solve_ie(const ProblemSpec& spec, const Grid& grid, const KernelContext& ctx,
                  const IeOptions& options = {});

/// v = v0 e^{-beta t} + b (e^{-beta .} * u) by the trapezoid product rule.
Field recover_v(const Field& u, const ProblemSpec& spec, const Grid& grid);

/// sup |u - N - D(u)| with tables rebuilt at doubled resolution.
double residual_ie(const Solution& sol, const KernelContext& ctx);

}  // namespace fhn
