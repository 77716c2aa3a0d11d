#pragma once

#include <span>
#include <vector>

#include "fhn/model.hpp"

namespace fhn {

struct KernelOptions {
    double tol_kernel = 1e-12;  ///< absolute tolerance on K and theta values
    int n_image_max = 400;      ///< cap on image pairs in the theta sum
};

/// Immutable evaluation context for the fundamental solution and its images.
class KernelContext {
public:
    /// Validates `params` in kernel scope (a > 0 only) unless they are a test context.
    explicit KernelContext(const ModelParams& params, KernelOptions options = {});

    const ModelParams& params() const noexcept { return params_; }
    const DerivedConstants& consts() const noexcept { return consts_; }
    double tol_kernel() const noexcept { return options_.tol_kernel; }
    int n_image_max() const noexcept { return options_.n_image_max; }
    const KernelOptions& options() const noexcept { return options_; }

    /// sigma(s) = sqrt(s + a + b/(s + beta)); requires s > max(-a, -beta).
    double sigma(double s) const;

    /// Multiplier applied to every K value. Always 1 outside test builds.
    double kernel_scale() const noexcept { return scale_; }

private:
    ModelParams params_;
    DerivedConstants consts_;
    KernelOptions options_;
    double scale_ = 1.0;
    friend KernelContext with_kernel_scale(KernelContext ctx, double scale);
};

KernelContext with_kernel_scale(KernelContext ctx, double scale);

#ifdef FHN_TEST_CONTEXTS
/// Corrupts the kernel by a constant factor, for checks that must fail.
inline KernelContext scaled_kernel_for_testing(KernelContext ctx, double scale) {
    return with_kernel_scale(std::move(ctx), scale);
}
#endif

/// Fundamental solution K at physical offset x (r = |x|/sqrt(eps) is applied
/// internally) and time t > 0. The memory integral is evaluated adaptively with
/// the (t - y)^(-1/2) endpoint weight absorbed analytically.
double eval_K(double x, double t, const KernelContext& ctx);

/// Pointwise envelope e^{-x^2/(4 eps t)} / (2 sqrt(pi eps t)) [e^{-a t} + b t E(t)].
double kernel_envelope(double x, double t, const KernelContext& ctx);

/// Laplace transform of K in t: e^{-r sigma} / (2 sqrt(eps) sigma), real s.
double laplace_K_closed(double x, double s, const KernelContext& ctx);

struct ThetaEval {
    double value = 0.0;
    int image_pairs = 0;     ///< image pairs beyond n = 0 that were summed
    double tail_bound = 0.0; ///< rigorous bound on the neglected images
};

/// theta(x, t) = sum_n K(x + 2 n L, t), truncated once the envelope bound of the
/// remaining images drops below tol_kernel. Throws BudgetExceeded (with the
/// partial sum) if n_image_max pairs are not enough.
ThetaEval eval_theta_detailed(double x, double t, const KernelContext& ctx);
double eval_theta(double x, double t, const KernelContext& ctx);

/// Neumann Green function theta(|x - xi|) + theta(|x + xi|); x, xi in [0, L].
double eval_G(double x, double xi, double t, const KernelContext& ctx);

/// cosh[(sigma/sqrt(eps))(L - y)] / (2 sqrt(eps) sigma sinh[(sigma/sqrt(eps)) L]).
double laplace_theta_closed(double y, double s, const KernelContext& ctx);

/// Large-time limit of int_0^t theta(x, tau) dtau:
/// cosh(sigma0 (x - L)) / (2 eps sigma0 sinh(sigma0 L)).
double steady_profile(double x, const KernelContext& ctx);

/// Upper bound on |theta(x, t)| valid for every x:
/// (1 + sqrt(pi eps t)/L) [e^{-a t} + b t E(t)] / (2 sqrt(pi eps t)).
double theta_envelope(double t, const KernelContext& ctx);

/// Fixed-time evaluator for bulk tabulation.
///
/// K(., t) is a superposition of heat kernels: e^{-a t} H(., t) minus a memory
/// integral of H(., y) over y in (0, t). The slice freezes that integral on a
/// Gauss-Legendre rule in phi (y = t sin^2 phi), so any functional that is
/// linear in H (periodisation, hat moments) costs one pass over the nodes.
class KernelSlice {
public:
    /// n_nodes = 0 picks an order from t and b.
    KernelSlice(const KernelContext& ctx, double t, int n_nodes = 0);

    double time() const noexcept { return t_; }
    int order() const noexcept { return static_cast<int>(y_.size()); }

    /// K(x, t) on the whole line.
    double whole_line(double x) const;
    /// theta(x, t).
    double theta(double x) const;
    /// int theta(z - eta, t) Lambda_h(eta) d eta, Lambda_h the unit hat of half-width h.
    double theta_hat_moment(double z, double h) const;
    /// Batched theta(z_k, t) and hat moments; out must match z in length.
    void theta_batch(std::span<const double> z, std::span<double> out) const;
    void theta_hat_moment_batch(std::span<const double> z, double h, std::span<double> out) const;
    /// Same quantities on the lattice z_k = k h, k = 0..out.size()-1. L must be
    /// an integer multiple of h; the work then scales with the kernel width
    /// rather than with out.size() times the image count.
    void theta_lattice(double h, std::span<double> out) const;
    void theta_hat_moment_lattice(double h, std::span<double> out) const;

    /// 2L-periodised heat kernel of variance 2 eps y (y > 0), and its hat
    /// moment (y = 0 gives the periodised hat itself).
    double periodic_heat(double z, double y) const;
    double periodic_heat_hat(double z, double y, double h) const;

private:
    void accumulate(std::span<const double> z, double h, std::span<double> out) const;
    void accumulate_lattice(double h, bool moment, std::span<double> out) const;

    double eps_, L_, scale_;
    double t_;
    double heat_coef_;
    std::vector<double> y_;
    std::vector<double> c_;
};

}  // namespace fhn
