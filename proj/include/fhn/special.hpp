#pragma once

namespace fhn {

/// Bessel functions of the first kind, orders 0..2, real argument.
///
/// Three regimes: power series for |z| <= 4, Miller backward recurrence
/// normalised by J0 + 2 sum J_2k = 1 for 4 < |z| <= 25, and the Hankel
/// asymptotic expansion beyond. Absolute error is below 1e-14 on |z| <= 50.
/// Non-finite input throws DomainError.
double bessel_j0(double z);
double bessel_j1(double z);
double bessel_j2(double z);

namespace detail {
// Individual branches, exposed so the crossover agreement can be tested.
double bessel_j1_series(double z);
double bessel_j1_miller(double z);
double bessel_j1_hankel(double z);
double bessel_j0_series(double z);
double bessel_j0_miller(double z);
double bessel_j0_hankel(double z);
inline constexpr double kSeriesLimit = 4.0;
inline constexpr double kAsymptoticLimit = 25.0;
}  // namespace detail

/// E(t) = (exp(-beta t) - exp(-a t)) / (a - beta), with the a -> beta limit
/// t exp(-a t) handled by a series branch.
double eval_E(double t, double a, double beta);

/// Relative |a - beta| below which eval_E switches to its series branch.
inline constexpr double kEBranchRelTol = 1e-6;

/// Cubic reaction f(u) = u (a - u)(u - 1).
double nagumo_f(double u, double a);

/// Source F = u^2 (a + 1 - u) - v0 exp(-beta t); satisfies
/// f(u) = F(u, 0, t) - a u.
double nagumo_F(double u, double v0_at_x, double t, double a, double beta);

/// Nonlinear part u^2 (a + 1 - u) of the source.
double nagumo_nonlinear(double u, double a);

/// sup over |u| <= M of |d/du [u^2 (a + 1 - u)]|.
double lipschitz_F(double M, double a);

/// Same supremum over the interval lo <= u <= hi.
double lipschitz_F_range(double lo, double hi, double a);

}  // namespace fhn
