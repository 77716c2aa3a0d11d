#pragma once

#include <functional>
#include <string>
#include <vector>

#include "fhn/field.hpp"
#include "fhn/model.hpp"

namespace fhn {

enum class FdScheme { imex_cn, explicit_rk4 };

/// Which reaction term the finite-difference model carries:
/// full f(u), its linear part -a u, or nothing (pure diffusion plus v coupling).
enum class FdReaction { full, linear, none };

using SourceFn = std::function<double(double x, double t)>;

struct FDConfig {
    int nx = 65;
    double dt = 1e-3;  ///< rounded down so that T / dt is an integer
    FdScheme scheme = FdScheme::imex_cn;
    double safety = 0.9;  ///< explicit_rk4 requires dt <= safety h^2 / (2 eps)
    int nt_out = 0;       ///< output nodes on [0, T]; 0 keeps every step
    FdReaction reaction = FdReaction::full;
    SourceFn source_u;  ///< optional forcing added to the u equation
    SourceFn source_v;  ///< optional forcing added to the v equation
};

std::string to_string(FdScheme s);
FdScheme parse_fd_scheme(const std::string& s);

/// Method of lines with ghost-node Neumann fluxes. Throws BlowUpError when a
/// non-finite value appears.
Solution solve_fd(const ProblemSpec& spec, const FDConfig& cfg);

enum class RefineAxis { space, time };

struct ConvergenceReport {
    RefineAxis axis = RefineAxis::space;
    std::vector<double> steps;   ///< h or dt per level
    std::vector<double> errors;  ///< against the exact solution, or between successive levels
    std::vector<double> orders;  ///< log(e_k / e_{k+1}) / log(step_k / step_{k+1})
    std::string status;          ///< "ok", "inconclusive" (non-monotone errors) or "exact"
};

using ExactFn = std::function<double(double x, double t)>;

/// Refines nx (space: nx_k = (nx - 1) 2^k + 1) or dt (time: dt / 2^k) over
/// `levels` runs and compares u at the final time. Without `exact`, errors are
/// differences between successive levels on the coarse nodes.
ConvergenceReport convergence_study(const ProblemSpec& spec, const FDConfig& cfg_base, int levels,
                                    RefineAxis axis, const ExactFn& exact = nullptr);

/// Variant with explicit node counts (space axis, exact solution required).
ConvergenceReport convergence_study_nx(const ProblemSpec& spec, const FDConfig& cfg_base,
                                       const std::vector<int>& nx_levels, const ExactFn& exact);

}  // namespace fhn
