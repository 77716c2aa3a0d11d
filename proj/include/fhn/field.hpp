#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fhn/model.hpp"

namespace fhn {

/// Uniform space-time grid: nx nodes on [0, L], nt nodes on [0, T].
struct Grid {
    std::vector<double> x_nodes;
    std::vector<double> t_nodes;
    int nx = 0;
    int nt = 0;

    double dx() const { return x_nodes[1] - x_nodes[0]; }
    double dt() const { return t_nodes[1] - t_nodes[0]; }
};

/// Throws ValidationError unless nx >= 3, nt >= 2, L > 0, T > 0.
Grid make_grid(double L, double T, int nx, int nt);

/// nx x nt samples, stored x-major: values[i * nt + m] = f(x_i, t_m).
struct Field {
    std::string label;
    Grid grid;
    std::vector<double> values;

    Field() = default;
    Field(std::string label, Grid grid);

    double& at(int i, int m) { return values[static_cast<std::size_t>(i) * grid.nt + m]; }
    double at(int i, int m) const { return values[static_cast<std::size_t>(i) * grid.nt + m]; }
    /// Profile at time index m.
    std::vector<double> slice(int m) const;
    /// Time series at space index i.
    std::vector<double> row(int i) const;
    bool all_finite() const;
};

/// Box in the (u, v) phase plane.
struct Rectangle {
    double u_min = -1.0, u_max = 2.0;
    double v_min = -1.0, v_max = 1.0;
};

struct WindowReport {
    double t_start = 0.0;
    double t_end = 0.0;
    int iterations = 0;
    double final_residual = 0.0;
    double contraction_estimate = 0.0;  ///< a-priori bound on the Picard map's Lipschitz constant
    double observed_ratio = 0.0;        ///< largest ratio of successive updates (0 if < 2 updates)
};

struct PicardReport {
    std::vector<WindowReport> windows;
    bool converged = false;
};

struct FdRunInfo {
    std::string scheme;
    double dt = 0.0;
    long steps = 0;
};

struct Solution {
    Field u;
    Field v;
    ProblemSpec spec;
    std::string method;  ///< "ie" or "fd"
    bool linearized = false;
    std::optional<PicardReport> picard;
    std::optional<FdRunInfo> fd;
    /// sup |u^2 (a + 1 - u)| over the stored grid, recorded when the run finishes.
    std::optional<double> reaction_sup;
};

double reaction_sup(const Field& u, double a);

}  // namespace fhn
