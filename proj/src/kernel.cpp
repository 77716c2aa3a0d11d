#include "fhn/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fhn/errors.hpp"
#include "fhn/quadrature.hpp"
#include "fhn/special.hpp"

namespace fhn {

namespace {

constexpr double kPi = std::numbers::pi;

// Images further than this many standard deviations are dropped (e^{-40.5}).
constexpr double kGaussCut = 9.0;
// Switch from the image sum to the cosine series once sigma exceeds this * L.
constexpr double kSeriesSwitch = 0.6;

double reduce_offset(double x, double L) {
    double r = std::fmod(std::abs(x), 2.0 * L);
    if (r > L) r = 2.0 * L - r;
    return r;
}

// E[(d - X)_+] for X ~ N(0, s^2).
double ramp_moment(double d, double s) {
    const double u = d / s;
    return d * 0.5 * std::erfc(-u / std::numbers::sqrt2) +
           s * std::exp(-0.5 * u * u) / std::sqrt(2.0 * kPi);
}

double hat(double z, double h) { return std::max(0.0, 1.0 - std::abs(z) / h); }

double sinc(double x) { return std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x; }

void check_position(double x, double L, const char* what) {
    if (!(x >= -1e-12 * L && x <= L * (1.0 + 1e-12))) {
        throw DomainError(std::string(what) + " must lie in [0, L]");
    }
}

}  // namespace

KernelContext::KernelContext(const ModelParams& params, KernelOptions options)
    : params_(params), options_(options) {
    if (!params.is_test_context()) check_params(params, ParamScope::kernel);
    if (!(options.tol_kernel > 0.0)) throw ValidationError("tol_kernel", "must be > 0");
    if (options.n_image_max < 1) throw ValidationError("n_image_max", "must be >= 1");
    consts_ = derive_constants(params);
}

double KernelContext::sigma(double s) const {
    const double a = params_.a, b = params_.b, beta = params_.beta;
    if (!(s > std::max(-a, -beta))) throw DomainError("sigma: s outside the half-plane s > max(-a, -beta)");
    return std::sqrt(s + a + b / (s + beta));
}

KernelContext with_kernel_scale(KernelContext ctx, double scale) {
    ctx.scale_ = scale;
    return ctx;
}

double kernel_envelope(double x, double t, const KernelContext& ctx) {
    if (!(t > 0.0)) throw DomainError("kernel_envelope: t must be > 0");
    const auto& p = ctx.params();
    const double gauss = std::exp(-x * x / (4.0 * p.epsilon * t));
    return gauss / (2.0 * std::sqrt(kPi * p.epsilon * t)) *
           (std::exp(-p.a * t) + p.b * t * eval_E(t, p.a, p.beta));
}

double eval_K(double x, double t, const KernelContext& ctx) {
    if (!(t > 0.0)) throw DomainError("eval_K: t must be > 0");
    if (!std::isfinite(x)) throw DomainError("eval_K: x must be finite");
    const auto& p = ctx.params();
    const double tol = ctx.tol_kernel();
    if (kernel_envelope(x, t, ctx) < 1e-3 * tol) return 0.0;

    const double eps = p.epsilon, a = p.a, b = p.b, beta = p.beta;
    const double x2 = x * x;
    const double norm = 1.0 / (2.0 * std::sqrt(kPi * eps));
    const double direct = std::exp(-x2 / (4.0 * eps * t) - a * t) / std::sqrt(t);
    double memory = 0.0;
    if (b > 0.0) {
        const double sb = std::sqrt(b);
        auto integrand = [&](double y) {
            if (y <= 0.0) return 0.0;
            const double s = std::max(t - y, 0.0);
            return std::exp(-x2 / (4.0 * eps * y) - a * y - beta * s) *
                   bessel_j1(2.0 * std::sqrt(b * y * s));
        };
        const double abs_tol = 0.5 * tol / (norm * sb);
        memory = sb * integrate(integrand, 0.0, t, Weight::inv_sqrt_upper, abs_tol).value;
    }
    return ctx.kernel_scale() * norm * (direct - memory);
}

double laplace_K_closed(double x, double s, const KernelContext& ctx) {
    const double eps = ctx.params().epsilon;
    const double sig = ctx.sigma(s);
    const double r = std::abs(x) / std::sqrt(eps);
    return std::exp(-r * sig) / (2.0 * std::sqrt(eps) * sig);
}

ThetaEval eval_theta_detailed(double x, double t, const KernelContext& ctx) {
    if (!(t > 0.0)) throw DomainError("eval_theta: t must be > 0");
    if (!std::isfinite(x)) throw DomainError("eval_theta: x must be finite");
    const auto& p = ctx.params();
    const double L = p.L, eps = p.epsilon;
    const double xa = reduce_offset(x, L);
    const double env0 = kernel_envelope(0.0, t, ctx);

    // Bound on sum_{n > N} of both image families, nearest at d = 2(N+1)L - xa.
    auto tail = [&](int N) {
        const double d = 2.0 * (N + 1) * L - xa;
        const double ratio = std::exp(-d * L / (eps * t));
        return 2.0 * env0 * std::exp(-d * d / (4.0 * eps * t)) / (1.0 - ratio);
    };

    ThetaEval out;
    out.value = eval_K(xa, t, ctx);
    int N = 0;
    double bound = tail(0);
    while (bound > ctx.tol_kernel()) {
        if (N >= ctx.n_image_max()) {
            throw BudgetExceeded("eval_theta: image cap reached before the tail bound met tol_kernel",
                                 out.value, bound);
        }
        ++N;
        out.value += eval_K(2.0 * N * L - xa, t, ctx) + eval_K(2.0 * N * L + xa, t, ctx);
        bound = tail(N);
    }
    out.image_pairs = N;
    out.tail_bound = bound;
    return out;
}

double eval_theta(double x, double t, const KernelContext& ctx) {
    return eval_theta_detailed(x, t, ctx).value;
}

double eval_G(double x, double xi, double t, const KernelContext& ctx) {
    const double L = ctx.params().L;
    check_position(x, L, "eval_G: x");
    check_position(xi, L, "eval_G: xi");
    return eval_theta(std::abs(x - xi), t, ctx) + eval_theta(x + xi, t, ctx);
}

double laplace_theta_closed(double y, double s, const KernelContext& ctx) {
    const auto& p = ctx.params();
    check_position(y, p.L, "laplace_theta_closed: y");
    const double sig = ctx.sigma(s);
    const double se = std::sqrt(p.epsilon);
    const double alpha = sig / se;
    const double num = std::exp(-alpha * y) + std::exp(-alpha * (2.0 * p.L - y));
    return num / (-std::expm1(-2.0 * alpha * p.L)) / (2.0 * se * sig);
}

double steady_profile(double x, const KernelContext& ctx) {
    const auto& p = ctx.params();
    check_position(x, p.L, "steady_profile: x");
    const double s0 = ctx.consts().sigma0;
    const double num = std::exp(-s0 * x) + std::exp(-s0 * (2.0 * p.L - x));
    return num / (-std::expm1(-2.0 * s0 * p.L)) / (2.0 * p.epsilon * s0);
}

double theta_envelope(double t, const KernelContext& ctx) {
    if (!(t > 0.0)) throw DomainError("theta_envelope: t must be > 0");
    const auto& p = ctx.params();
    const double root = std::sqrt(kPi * p.epsilon * t);
    return (1.0 + root / p.L) * (std::exp(-p.a * t) + p.b * t * eval_E(t, p.a, p.beta)) /
           (2.0 * root);
}

KernelSlice::KernelSlice(const KernelContext& ctx, double t, int n_nodes)
    : eps_(ctx.params().epsilon), L_(ctx.params().L), scale_(ctx.kernel_scale()), t_(t) {
    if (!(t > 0.0)) throw DomainError("KernelSlice: t must be > 0");
    const auto& p = ctx.params();
    heat_coef_ = std::exp(-p.a * t);
    const double sb = std::sqrt(p.b);
    int n = n_nodes;
    if (n <= 0) n = std::clamp(96 + static_cast<int>(4.0 * sb * t), 96, 2000);
    const GaussRule& rule = gauss_legendre(n);
    y_.resize(n);
    c_.resize(n);
    for (int q = 0; q < n; ++q) {
        const double phi = 0.25 * kPi * (1.0 + rule.nodes[q]);
        const double s = std::sin(phi), c = std::cos(phi);
        const double s2 = s * s;
        y_[q] = t * s2;
        const double m = 2.0 * t * sb * s2 * std::exp(-p.a * t * s2 - p.beta * t * c * c) *
                         (sb > 0.0 ? bessel_j1(sb * t * 2.0 * s * c) : 0.0);
        c_[q] = 0.25 * kPi * rule.weights[q] * m;
    }
}

// out[i] += scale * [e^{-at} F(z_i, t) - sum_q c_q F(z_i, y_q)], F the periodised
// heat kernel (h <= 0) or its hat moment (h > 0).
void KernelSlice::accumulate(std::span<const double> z, double h, std::span<double> out) const {
    if (z.size() != out.size()) throw ShapeError("KernelSlice: z and out differ in length");
    const bool moment = h > 0.0;
    const double L = L_;
    std::vector<double> zr(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) zr[i] = reduce_offset(z[i], L);
    std::vector<double> coef;  // cosine-series coefficients (before the 1/(2L) factor)

    auto node = [&](double y, double w) {
        if (w == 0.0) return;
        const double sig = std::sqrt(2.0 * eps_ * y);
        if (sig > kSeriesSwitch * L) {
            for (std::size_t k = 0;; ++k) {
                const double om = k * kPi / L;
                const double g = std::exp(-eps_ * om * om * y);
                if (g < 1e-18) break;
                if (coef.size() <= k) coef.resize(k + 1, 0.0);
                coef[k] += w * g;
            }
            return;
        }
        const double reach = kGaussCut * sig + (moment ? h : 0.0);
        const int nmax = static_cast<int>(std::ceil((reach + L) / (2.0 * L)));
        const double inv_norm = 1.0 / std::sqrt(4.0 * kPi * eps_ * y);
        for (std::size_t i = 0; i < zr.size(); ++i) {
            double acc = 0.0;
            for (int n = -nmax; n <= nmax; ++n) {
                const double d = zr[i] + 2.0 * n * L;
                if (std::abs(d) > reach) continue;
                if (moment) {
                    acc += (ramp_moment(d + h, sig) - 2.0 * ramp_moment(d, sig) +
                            ramp_moment(d - h, sig)) / h;
                } else {
                    acc += std::exp(-d * d / (4.0 * eps_ * y)) * inv_norm;
                }
            }
            out[i] += scale_ * w * acc;
        }
    };

    node(t_, heat_coef_);
    for (std::size_t q = 0; q < y_.size(); ++q) node(y_[q], -c_[q]);

    if (!coef.empty()) {
        for (std::size_t i = 0; i < zr.size(); ++i) {
            double acc = moment ? h * coef[0] : coef[0];
            for (std::size_t k = 1; k < coef.size(); ++k) {
                const double om = k * kPi / L;
                const double shape = moment ? h * sinc(0.5 * om * h) * sinc(0.5 * om * h) : 1.0;
                acc += 2.0 * coef[k] * shape * std::cos(om * zr[i]);
            }
            out[i] += scale_ * acc / (2.0 * L);
        }
    }
}

// Lattice variant of accumulate(): every image of every z_k sits on the same
// lattice, so each node only needs its profile at |m| h, m <= reach / h.
void KernelSlice::accumulate_lattice(double h, bool moment, std::span<double> out) const {
    if (!(h > 0.0)) throw DomainError("KernelSlice: lattice spacing must be > 0");
    const double L = L_;
    const long cells = std::lround(L / h);
    if (cells < 1 || std::abs(cells * h - L) > 1e-9 * L) {
        throw DomainError("KernelSlice: L must be an integer multiple of the lattice spacing");
    }
    const long period = 2 * cells;
    const long K = static_cast<long>(out.size());
    std::vector<double> coef;
    std::vector<double> prof, ramp;

    auto node = [&](double y, double w) {
        if (w == 0.0) return;
        const double sig = std::sqrt(2.0 * eps_ * y);
        if (sig > kSeriesSwitch * L) {
            for (std::size_t k = 0;; ++k) {
                const double om = k * kPi / L;
                const double g = std::exp(-eps_ * om * om * y);
                if (g < 1e-18) break;
                if (coef.size() <= k) coef.resize(k + 1, 0.0);
                coef[k] += w * g;
            }
            return;
        }
        const double reach = kGaussCut * sig + (moment ? h : 0.0);
        const long M = static_cast<long>(std::floor(reach / h));
        prof.assign(M + 1, 0.0);
        if (moment) {
            ramp.resize(M + 2);
            for (long m = 0; m <= M + 1; ++m) ramp[m] = ramp_moment(m * h, sig);
            // R(-d) = R(d) - d
            const double r_minus1 = ramp[1] - h;
            for (long m = 0; m <= M; ++m) {
                const double lo = m == 0 ? r_minus1 : ramp[m - 1];
                prof[m] = (ramp[m + 1] - 2.0 * ramp[m] + lo) / h;
            }
        } else {
            const double inv_norm = 1.0 / std::sqrt(4.0 * kPi * eps_ * y);
            for (long m = 0; m <= M; ++m) {
                const double d = m * h;
                prof[m] = std::exp(-d * d / (4.0 * eps_ * y)) * inv_norm;
            }
        }
        const double sw = scale_ * w;
        for (long k = 0; k < K; ++k) {
            // images k + n period with |k + n period| <= M
            const long nlo = static_cast<long>(std::ceil(static_cast<double>(-M - k) / period));
            const long nhi = static_cast<long>(std::floor(static_cast<double>(M - k) / period));
            double acc = 0.0;
            for (long n = nlo; n <= nhi; ++n) acc += prof[std::labs(k + n * period)];
            out[k] += sw * acc;
        }
    };

    node(t_, heat_coef_);
    for (std::size_t q = 0; q < y_.size(); ++q) node(y_[q], -c_[q]);

    if (!coef.empty()) {
        for (long i = 0; i < K; ++i) {
            const double z = i * h;
            double acc = moment ? h * coef[0] : coef[0];
            for (std::size_t k = 1; k < coef.size(); ++k) {
                const double om = k * kPi / L;
                const double shape = moment ? h * sinc(0.5 * om * h) * sinc(0.5 * om * h) : 1.0;
                acc += 2.0 * coef[k] * shape * std::cos(om * z);
            }
            out[i] += scale_ * acc / (2.0 * L);
        }
    }
}

void KernelSlice::theta_lattice(double h, std::span<double> out) const {
    std::fill(out.begin(), out.end(), 0.0);
    accumulate_lattice(h, false, out);
}

void KernelSlice::theta_hat_moment_lattice(double h, std::span<double> out) const {
    std::fill(out.begin(), out.end(), 0.0);
    accumulate_lattice(h, true, out);
}

double KernelSlice::whole_line(double x) const {
    auto H = [&](double y) {
        return std::exp(-x * x / (4.0 * eps_ * y)) / std::sqrt(4.0 * kPi * eps_ * y);
    };
    double v = heat_coef_ * H(t_);
    for (std::size_t q = 0; q < y_.size(); ++q) v -= c_[q] * H(y_[q]);
    return scale_ * v;
}

double KernelSlice::theta(double x) const {
    double out = 0.0;
    accumulate(std::span<const double>(&x, 1), 0.0, std::span<double>(&out, 1));
    return out;
}

double KernelSlice::theta_hat_moment(double z, double h) const {
    if (!(h > 0.0)) throw DomainError("theta_hat_moment: h must be > 0");
    double out = 0.0;
    accumulate(std::span<const double>(&z, 1), h, std::span<double>(&out, 1));
    return out;
}

void KernelSlice::theta_batch(std::span<const double> z, std::span<double> out) const {
    std::fill(out.begin(), out.end(), 0.0);
    accumulate(z, 0.0, out);
}

void KernelSlice::theta_hat_moment_batch(std::span<const double> z, double h,
                                         std::span<double> out) const {
    if (!(h > 0.0)) throw DomainError("theta_hat_moment: h must be > 0");
    std::fill(out.begin(), out.end(), 0.0);
    accumulate(z, h, out);
}

double KernelSlice::periodic_heat(double z, double y) const {
    if (!(y > 0.0)) throw DomainError("periodic_heat: y must be > 0");
    const double L = L_;
    const double zr = reduce_offset(z, L);
    const double sig = std::sqrt(2.0 * eps_ * y);
    double acc = 0.0;
    if (sig > kSeriesSwitch * L) {
        acc = 1.0;
        for (int k = 1;; ++k) {
            const double om = k * kPi / L;
            const double g = std::exp(-eps_ * om * om * y);
            if (g < 1e-18) break;
            acc += 2.0 * g * std::cos(om * zr);
        }
        return acc / (2.0 * L);
    }
    const int nmax = static_cast<int>(std::ceil((kGaussCut * sig + L) / (2.0 * L)));
    for (int n = -nmax; n <= nmax; ++n) {
        const double d = zr + 2.0 * n * L;
        acc += std::exp(-d * d / (4.0 * eps_ * y));
    }
    return acc / std::sqrt(4.0 * kPi * eps_ * y);
}

double KernelSlice::periodic_heat_hat(double z, double y, double h) const {
    if (!(h > 0.0)) throw DomainError("periodic_heat_hat: h must be > 0");
    if (y < 0.0) throw DomainError("periodic_heat_hat: y must be >= 0");
    const double L = L_;
    const double zr = reduce_offset(z, L);
    const int nmax_hat = static_cast<int>(std::ceil((h + L) / (2.0 * L)));
    if (y == 0.0) {
        double acc = 0.0;
        for (int n = -nmax_hat; n <= nmax_hat; ++n) acc += hat(zr + 2.0 * n * L, h);
        return acc;
    }
    const double sig = std::sqrt(2.0 * eps_ * y);
    double acc = 0.0;
    if (sig > kSeriesSwitch * L) {
        acc = h;
        for (int k = 1;; ++k) {
            const double om = k * kPi / L;
            const double g = std::exp(-eps_ * om * om * y);
            if (g < 1e-18) break;
            const double sc = sinc(0.5 * om * h);
            acc += 2.0 * g * h * sc * sc * std::cos(om * zr);
        }
        return acc / (2.0 * L);
    }
    const double reach = kGaussCut * sig + h;
    const int nmax = static_cast<int>(std::ceil((reach + L) / (2.0 * L)));
    for (int n = -nmax; n <= nmax; ++n) {
        const double d = zr + 2.0 * n * L;
        if (std::abs(d) > reach) continue;
        acc += (ramp_moment(d + h, sig) - 2.0 * ramp_moment(d, sig) + ramp_moment(d - h, sig)) / h;
    }
    return acc;
}

}  // namespace fhn
