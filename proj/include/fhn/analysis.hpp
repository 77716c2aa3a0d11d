#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fhn/field.hpp"
#include "fhn/kernel.hpp"
#include "fhn/model.hpp"

namespace fhn {

/// Outcome of one bound or limit check.
///
/// worst_margin is bound minus quantity at the worst sample (negative means the
/// bound is violated). For limit checks the bound is zero and the quantity is
/// the distance to the limit, so the tolerance carries the acceptance band.
struct CheckReport {
    std::string name;
    long samples = 0;
    double worst_margin = 0.0;
    double tolerance = 0.0;
    bool passed = true;
    std::string status = "pass";  ///< "pass", "fail" or "skipped: <reason>"
    std::string notes;
    std::optional<unsigned> seed;  ///< Sobol skip count, for sampled checks
    double quantity = 0.0;         ///< left side at the worst sample
    double bound = 0.0;            ///< right side at the worst sample

    bool skipped() const noexcept { return status.rfind("skipped", 0) == 0; }
};

/// Sets passed and status from worst_margin and tolerance.
void finalize(CheckReport& report);

struct SamplePlan {
    long samples = 10000;
    unsigned seed = 0;   ///< number of leading Sobol points skipped
    double r_max = 5.0;  ///< scaled distance range |x|/sqrt(eps) for pointwise checks
    double t_max = 10.0;
};

/// Low-discrepancy points in (0, 1]^dim. Deterministic in (n, dim, seed).
std::vector<std::vector<double>> sobol_points(long n, int dim, unsigned seed);

inline constexpr double kBoundSlack = 1e-8;

/// Five reports, in order: pointwise envelope of K, whole-line mass of |K|,
/// its time integral, strip mass of |theta|, its time integral.
std::vector<CheckReport> check_kernel_bounds(const KernelContext& ctx, const SamplePlan& plan = {});

/// int_0^T theta(x, tau) w(tau) dtau (|theta| when absolute is set). The first
/// panel absorbs the tau^(-1/2) behaviour at x = 0.
double theta_time_integral(const KernelContext& ctx, double x, double T,
                           const std::function<double(double)>& w, bool absolute = false,
                           double tol = 1e-12);

/// int_T^inf of theta_envelope.
double theta_tail_bound(const KernelContext& ctx, double T);

inline constexpr double kDecayTolerance = 1e-6;

/// |theta(x, T_max)| < 1e-6 and int_0^T_max |theta| + tail <= C0.
/// Skipped when C0 is undefined (a = beta).
CheckReport check_theta_decay(const KernelContext& ctx, double x, std::optional<double> T_max = {});

/// |int_0^T theta(x, tau) dtau - steady_profile(x)| <= tol, with T doubled from
/// 40/omega until the tail bound is below tol/2. Throws AccuracyUnreachable.
CheckReport check_steady_limit(const KernelContext& ctx, double x, double tol = 1e-3);

/// Limit-check band: max(1e-3, 1e-2 |target|).
double asymptotic_tolerance(double target);

/// Report A: (theta * phi)(T) against phi_inf * steady_profile(x).
/// Report B: (theta * phi')(T) against 0.
/// phi must declare its limit and an integrable derivative (PreconditionError).
std::vector<CheckReport> check_convolution_limits(const KernelContext& ctx, const TimeFunction& phi,
                                                  double x, std::optional<double> T = {},
                                                  std::optional<double> tol = {});

/// Pointwise a-priori bounds on |u| and |v| for homogeneous boundary data.
/// ||F|| is the reaction sup recorded by the solver (recomputed if absent).
CheckReport check_solution_bounds(const Solution& sol, const KernelContext& ctx);

/// Passes iff every stored (u, v) lies in rect; notes carry the first exit.
CheckReport invariant_rectangle_monitor(const Solution& sol, const Rectangle& rect);

/// Names accepted by run_checks.
const std::vector<std::string>& check_names();

struct VerifyConfig {
    ModelParams bound_params{1.0, 2.0, 1.0, 1.0, 1.0};
    ModelParams limit_params{1.0, 1.0, 1.0, 1.0, 1.0};
    SamplePlan plan;
    double x = 0.0;
    double steady_tol = 1e-3;
    TimeFunction phi = TimeFunction::saturating(1.0, 1.0);
    /// Problem for the solution checks; solved with the integral-equation solver.
    ProblemSpec problem;
    int nx = 33;
    int nt = 101;
    Rectangle rect;
};

VerifyConfig default_verify_config();

/// Runs the named checks (all when names is empty) and returns the reports
/// sorted by name. Unknown names throw ValidationError.
std::vector<CheckReport> run_checks(const VerifyConfig& cfg, const std::vector<std::string>& names = {});

}  // namespace fhn
