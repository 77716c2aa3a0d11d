#pragma once

#include <functional>
#include <span>
#include <vector>

namespace fhn {

struct QuadResult {
    double value = 0.0;
    double err_estimate = 0.0;  ///< absolute, >= 0
    long evaluations = 0;
};

/// Endpoint weight absorbed analytically by integrate().
///   inv_sqrt_upper: (hi - y)^(-1/2)
///   inv_sqrt_lower: (y - lo)^(-1/2)
/// Both go through y = lo + (hi - lo) sin^2(phi), which turns the weight into
/// a bounded factor on phi in [0, pi/2].
enum class Weight { none, inv_sqrt_upper, inv_sqrt_lower };

using Integrand = std::function<double(double)>;

inline constexpr long kDefaultEvalBudget = 200000;

/// Globally adaptive Gauss-Kronrod (10/21) quadrature of f * weight on [lo, hi].
/// Stops when the error estimate is below max(abs_tol, rel_tol |value|).
/// Throws BudgetExceeded (carrying the best estimate) if max_evals is hit first.
QuadResult integrate(const Integrand& f, double lo, double hi, Weight weight, double abs_tol,
                     long max_evals = kDefaultEvalBudget, double rel_tol = 0.0);

/// Integral of f over [0, inf). Panels are cut at multiples of 1/decay_rate_hint;
/// the remainder beyond the last cut is bounded by sup|f| near the cut divided
/// by the hint. With singular_at_zero the first panel uses the inv_sqrt_lower
/// weight on sqrt(t) f(t), for integrands that blow up like t^(-1/2).
/// Throws AccuracyUnreachable when the tail bound stays above tol/2.
QuadResult integrate_semi_infinite(const Integrand& f, double decay_rate_hint, double tol,
                                   bool singular_at_zero = false);

/// Gauss-Legendre nodes and weights on [-1, 1]; cached per order.
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
const GaussRule& gauss_legendre(int n);

enum class KernelSingularity { none, inv_sqrt };

/// Uniform time grid with product-integration weights for (k * g)(t_i).
///
/// Panel q covers lags [q dt, (q+1) dt]. `w_near[q]` multiplies the lag-q
/// sample and `w_far[q]` the lag-(q+1) sample. For inv_sqrt grids the weights
/// integrate s^(-1/2) against the linear interpolant exactly, and the kernel
/// samples passed to convolve() are the regular factor sqrt(s) k(s).
struct ConvGrid {
    std::vector<double> t_nodes;
    KernelSingularity singularity = KernelSingularity::none;
    double dt = 0.0;
    std::vector<double> w_near;
    std::vector<double> w_far;
};

ConvGrid build_conv_grid(double t_max, int n, KernelSingularity singularity);

/// (k * g)(t_i) = int_0^{t_i} k(t_i - s) g(s) ds at every node.
/// k_samples are indexed by lag node; g_samples by time node.
std::vector<double> convolve(const ConvGrid& grid, std::span<const double> k_samples,
                             std::span<const double> g_samples);

}  // namespace fhn
