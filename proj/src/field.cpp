#include "fhn/field.hpp"

#include <algorithm>
#include <cmath>

#include "fhn/errors.hpp"

namespace fhn {

Grid make_grid(double L, double T, int nx, int nt) {
    if (nx < 3) throw ValidationError("grid.nx", "must be >= 3");
    if (nt < 2) throw ValidationError("grid.nt", "must be >= 2");
    if (!(L > 0.0)) throw ValidationError("L", "must be > 0");
    if (!(T > 0.0)) throw ValidationError("T", "must be > 0");
    Grid g;
    g.nx = nx;
    g.nt = nt;
    g.x_nodes.resize(nx);
    g.t_nodes.resize(nt);
    for (int i = 0; i < nx; ++i) g.x_nodes[i] = L * i / (nx - 1);
    for (int m = 0; m < nt; ++m) g.t_nodes[m] = T * m / (nt - 1);
    g.x_nodes.back() = L;
    g.t_nodes.back() = T;
    return g;
}

Field::Field(std::string label, Grid grid)
    : label(std::move(label)), grid(std::move(grid)),
      values(static_cast<std::size_t>(this->grid.nx) * this->grid.nt, 0.0) {}

std::vector<double> Field::slice(int m) const {
    std::vector<double> out(grid.nx);
    for (int i = 0; i < grid.nx; ++i) out[i] = at(i, m);
    return out;
}

std::vector<double> Field::row(int i) const {
    return {values.begin() + static_cast<std::ptrdiff_t>(i) * grid.nt,
            values.begin() + static_cast<std::ptrdiff_t>(i + 1) * grid.nt};
}

bool Field::all_finite() const {
    for (double v : values) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

double reaction_sup(const Field& u, double a) {
    double m = 0.0;
    for (double x : u.values) m = std::max(m, std::abs(x * x * (a + 1.0 - x)));
    return m;
}

}  // namespace fhn
