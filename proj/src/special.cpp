#include "fhn/special.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fhn/errors.hpp"

namespace fhn {
namespace detail {

namespace {

// sum_k (-1)^k (z/2)^(2k+nu) / (k! (k+nu)!)
double series(double z, int nu) {
    const double h = 0.5 * z;
    const double h2 = h * h;
    double term = nu == 0 ? 1.0 : h;
    double sum = term;
    for (int k = 1; k < 60; ++k) {
        term *= -h2 / (static_cast<double>(k) * static_cast<double>(k + nu));
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

struct MillerPair {
    double j0, j1;
};

// Backward recurrence J_{n-1} = (2n/z) J_n - J_{n+1}, normalised with
// J0 + 2 (J2 + J4 + ...) = 1. Valid for z > 0.
MillerPair miller(double z) {
    const int start = 2 * static_cast<int>((z + 8.0 * std::cbrt(z) + 26.0) / 2.0);
    double jp1 = 0.0, j = 1e-300, norm = 0.0;
    double j1 = 0.0;
    for (int n = start; n > 0; --n) {
        const double jm1 = (2.0 * n / z) * j - jp1;
        jp1 = j;
        j = jm1;  // now holds J_{n-1}
        if (n - 1 == 1) j1 = j;
        if ((n - 1) % 2 == 0 && n - 1 > 0) norm += 2.0 * j;
        if (std::abs(j) > 1e250) {
            j *= 1e-250;
            jp1 *= 1e-250;
            j1 *= 1e-250;
            norm *= 1e-250;
        }
    }
    norm += j;  // J0
    return {j / norm, j1 / norm};
}

// Hankel expansion of J_nu for large positive z.
double hankel(double z, int nu) {
    const double mu = 4.0 * nu * nu;
    double p = 1.0, q = 0.0;
    double term = 1.0;
    const double inv8z = 1.0 / (8.0 * z);
    double prev = 1e300;
    for (int k = 1; k < 200; ++k) {
        const double odd = 2.0 * k - 1.0;
        term *= (mu - odd * odd) * inv8z / k;
        if (std::abs(term) > prev) break;  // asymptotic: stop at the smallest term
        prev = std::abs(term);
        switch (k % 4) {
            case 1: q += term; break;
            case 2: p -= term; break;
            case 3: q -= term; break;
            case 0: p += term; break;
        }
        if (std::abs(term) < 1e-18) break;
    }
    const double chi = z - (0.5 * nu + 0.25) * std::numbers::pi;
    return std::sqrt(2.0 / (std::numbers::pi * z)) * (p * std::cos(chi) - q * std::sin(chi));
}

}  // namespace

double bessel_j1_series(double z) { return series(z, 1); }
double bessel_j0_series(double z) { return series(z, 0); }

double bessel_j1_miller(double z) {
    if (z == 0.0) return 0.0;
    const double s = z < 0 ? -1.0 : 1.0;
    return s * miller(std::abs(z)).j1;
}

double bessel_j0_miller(double z) {
    if (z == 0.0) return 1.0;
    return miller(std::abs(z)).j0;
}

double bessel_j1_hankel(double z) {
    const double s = z < 0 ? -1.0 : 1.0;
    return s * hankel(std::abs(z), 1);
}

double bessel_j0_hankel(double z) { return hankel(std::abs(z), 0); }

}  // namespace detail

double bessel_j1(double z) {
    if (!std::isfinite(z)) throw DomainError("bessel_j1: non-finite argument");
    const double az = std::abs(z);
    if (az <= detail::kSeriesLimit) return detail::bessel_j1_series(z);
    if (az <= detail::kAsymptoticLimit) return detail::bessel_j1_miller(z);
    return detail::bessel_j1_hankel(z);
}

double bessel_j0(double z) {
    if (!std::isfinite(z)) throw DomainError("bessel_j0: non-finite argument");
    const double az = std::abs(z);
    if (az <= detail::kSeriesLimit) return detail::bessel_j0_series(z);
    if (az <= detail::kAsymptoticLimit) return detail::bessel_j0_miller(z);
    return detail::bessel_j0_hankel(z);
}

double bessel_j2(double z) {
    if (!std::isfinite(z)) throw DomainError("bessel_j2: non-finite argument");
    if (std::abs(z) < 1.0) {
        // recurrence loses digits near 0; use the series directly
        const double h = 0.5 * z, h2 = h * h;
        double term = 0.5 * h2, sum = term;
        for (int k = 1; k < 40; ++k) {
            term *= -h2 / (static_cast<double>(k) * (k + 2.0));
            sum += term;
            if (std::abs(term) < 1e-18 * std::abs(sum)) break;
        }
        return sum;
    }
    return 2.0 / z * bessel_j1(z) - bessel_j0(z);
}

double eval_E(double t, double a, double beta) {
    if (!(t >= 0.0)) throw DomainError("eval_E: t must be >= 0");
    const double d = a - beta;
    const double scale = std::max(std::abs(a), std::abs(beta));
    if (std::abs(d) <= kEBranchRelTol * scale) {
        // t e^{-a t} * (e^{d t} - 1)/(d t), expanded to third order in d t
        const double x = d * t;
        return t * std::exp(-a * t) * (1.0 + x / 2.0 + x * x / 6.0 + x * x * x / 24.0);
    }
    if (std::abs(d) * t < 1.0) {
        // e^{-a t} (e^{d t} - 1) / d without cancellation
        return std::exp(-a * t) * std::expm1(d * t) / d;
    }
    return (std::exp(-beta * t) - std::exp(-a * t)) / d;
}

double nagumo_f(double u, double a) { return u * (a - u) * (u - 1.0); }

double nagumo_nonlinear(double u, double a) { return u * u * (a + 1.0 - u); }

double nagumo_F(double u, double v0_at_x, double t, double a, double beta) {
    return nagumo_nonlinear(u, a) - v0_at_x * std::exp(-beta * t);
}

double lipschitz_F(double M, double a) {
    if (!(M >= 0.0)) throw DomainError("lipschitz_F: M must be >= 0");
    auto slope = [a](double u) { return std::abs(2.0 * (a + 1.0) * u - 3.0 * u * u); };
    double best = std::max(slope(M), slope(-M));
    const double crit = (a + 1.0) / 3.0;
    if (crit <= M) best = std::max(best, slope(crit));
    return best;
}

double lipschitz_F_range(double lo, double hi, double a) {
    if (!(lo <= hi)) throw DomainError("lipschitz_F_range: requires lo <= hi");
    auto slope = [a](double u) { return std::abs(2.0 * (a + 1.0) * u - 3.0 * u * u); };
    double best = std::max(slope(lo), slope(hi));
    const double crit = (a + 1.0) / 3.0;
    if (crit >= lo && crit <= hi) best = std::max(best, slope(crit));
    return best;
}

}  // namespace fhn
