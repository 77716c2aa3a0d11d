#pragma once

#include <string>
#include <utility>
#include <vector>

#include "fhn/analysis.hpp"
#include "fhn/kernel.hpp"
#include "fhn/model.hpp"
#include "fhn/solver_fd.hpp"
#include "fhn/solver_ie.hpp"

namespace fhn {

/// Everything a CLI run needs, read from one YAML document.
///
///     params: {epsilon: 0.1, a: 0.25, b: 1, beta: 0.8, L: 1}
///     T: 2
///     u0: {kind: cosine, coeffs: [0, 0.1]}
///     v0: 0
///     phi1: {kind: saturating, limit: 0.1, rate: 1}
///     grid: {nx: 65, nt: 201}
///     ie: {tol_fix: 1e-9, linearized: false}
///     fd: {nx: 65, dt: 1e-3, scheme: imex_cn}
///
/// Scalars stand for constant functions. Space kinds: constant (value),
/// polynomial and cosine (coeffs), table (x, values). Time kinds: constant
/// (value), saturating (limit, rate), decaying (value, rate), ramp (start, end,
/// t_ramp), table (t, values, interp). Optional sections: kernel (tol_kernel,
/// n_image_max), tabulate (nx, nt), verify (samples, seed, x, steady_tol, nx, nt).
struct RunSettings {
    ProblemSpec spec;
    int nx = 65;
    int nt = 201;
    IeOptions ie;
    FDConfig fd;  ///< nx and nt_out default to the grid section
    KernelOptions kernel;
    int tab_nx = 11;
    int tab_nt = 10;
    VerifyConfig verify;
};

using Override = std::pair<std::string, std::string>;

/// Parses "a.b.c=value"; throws ParseError on a missing '=' or empty key.
Override parse_override(const std::string& text);

/// What the document is for. solve needs params (model range) and T;
/// tabulate needs params in kernel range; verify needs neither, and a problem
/// given there replaces the default one of the solution checks.
enum class Purpose { solve, tabulate, verify };

/// Loads the document (empty path: no document), applies dotted overrides,
/// and converts. Every failure is a ParseError naming the field and, when
/// known, the line.
RunSettings load_settings(const std::string& path, const std::vector<Override>& overrides,
                          Purpose purpose = Purpose::solve);
RunSettings load_settings_from_string(const std::string& yaml, const std::vector<Override>& overrides,
                                      Purpose purpose = Purpose::solve);

}  // namespace fhn
