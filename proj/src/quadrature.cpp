#include "fhn/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>

#include "fhn/errors.hpp"

namespace fhn {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Gauss-Kronrod 10/21 abscissae and weights (QUADPACK qk21).
constexpr double xgk[11] = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};
constexpr double wgk[11] = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077524800935890, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
constexpr double wg[5] = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Panel {
    double lo, hi, value, err, resabs;
};

template <class G>
Panel gk21(const G& g, double lo, double hi) {
    const double center = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    const double fc = g(center);
    double resk = fc * wgk[10];
    double resg = 0.0;
    double resabs = std::abs(resk);
    double fv1[10], fv2[10];
    for (int j = 0; j < 10; ++j) {
        const double dx = half * xgk[j];
        fv1[j] = g(center - dx);
        fv2[j] = g(center + dx);
        const double sum = fv1[j] + fv2[j];
        resk += wgk[j] * sum;
        resabs += wgk[j] * (std::abs(fv1[j]) + std::abs(fv2[j]));
        if (j % 2 == 1) resg += wg[j / 2] * sum;
    }
    const double mean = 0.5 * resk;
    double resasc = wgk[10] * std::abs(fc - mean);
    for (int j = 0; j < 10; ++j) {
        resasc += wgk[j] * (std::abs(fv1[j] - mean) + std::abs(fv2[j] - mean));
    }
    const double value = resk * half;
    resabs *= std::abs(half);
    resasc *= std::abs(half);
    double err = std::abs((resk - resg) * half);
    if (resasc != 0.0 && err != 0.0) {
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    }
    if (resabs > std::numeric_limits<double>::min() / (50.0 * kEps)) {
        err = std::max(50.0 * kEps * resabs, err);
    }
    return {lo, hi, value, err, resabs};
}

template <class G>
QuadResult adaptive(const G& g, double lo, double hi, double abs_tol, double rel_tol,
                    long max_evals) {
    std::vector<Panel> heap;
    heap.reserve(16);
    auto by_err = [](const Panel& x, const Panel& y) { return x.err < y.err; };
    heap.push_back(gk21(g, lo, hi));
    long evals = 21;
    double value = heap.front().value;
    double err = heap.front().err;
    double resabs = heap.front().resabs;
    while (true) {
        const double target = std::max(abs_tol, rel_tol * std::abs(value));
        if (err <= target || err <= 100.0 * kEps * resabs) break;
        if (evals + 42 > max_evals) {
            throw BudgetExceeded("integrate: evaluation budget exhausted", value, err);
        }
        std::pop_heap(heap.begin(), heap.end(), by_err);
        const Panel worst = heap.back();
        heap.pop_back();
        const double mid = 0.5 * (worst.lo + worst.hi);
        if (!(mid > worst.lo && mid < worst.hi)) {
            // cannot split further in floating point; accept what we have
            heap.push_back(worst);
            std::push_heap(heap.begin(), heap.end(), by_err);
            break;
        }
        const Panel left = gk21(g, worst.lo, mid);
        const Panel right = gk21(g, mid, worst.hi);
        evals += 42;
        value += left.value + right.value - worst.value;
        resabs += left.resabs + right.resabs - worst.resabs;
        heap.push_back(left);
        std::push_heap(heap.begin(), heap.end(), by_err);
        heap.push_back(right);
        std::push_heap(heap.begin(), heap.end(), by_err);
        // re-sum to avoid drift from repeated add/subtract
        err = 0.0;
        for (const auto& p : heap) err += p.err;
    }
    // final sum from panels for accuracy
    double v = 0.0;
    for (const auto& p : heap) v += p.value;
    if (!std::isfinite(v)) throw DomainError("integrate: integrand produced a non-finite value");
    return {v, err, evals};
}

}  // namespace

QuadResult integrate(const Integrand& f, double lo, double hi, Weight weight, double abs_tol,
                     long max_evals, double rel_tol) {
    if (!(lo < hi)) throw DomainError("integrate: requires lo < hi");
    if (!(abs_tol > 0.0) && !(rel_tol > 0.0)) throw DomainError("integrate: tol must be > 0");
    const double span = hi - lo;
    switch (weight) {
        case Weight::none:
            return adaptive(f, lo, hi, abs_tol, rel_tol, max_evals);
        case Weight::inv_sqrt_upper: {
            const double c = 2.0 * std::sqrt(span);
            auto g = [&](double phi) {
                const double s = std::sin(phi);
                return f(lo + span * s * s) * c * s;
            };
            return adaptive(g, 0.0, 0.5 * std::numbers::pi, abs_tol, rel_tol, max_evals);
        }
        case Weight::inv_sqrt_lower: {
            const double c = 2.0 * std::sqrt(span);
            auto g = [&](double phi) {
                const double s = std::sin(phi);
                return f(lo + span * s * s) * c * std::cos(phi);
            };
            return adaptive(g, 0.0, 0.5 * std::numbers::pi, abs_tol, rel_tol, max_evals);
        }
    }
    return {};
}

QuadResult integrate_semi_infinite(const Integrand& f, double decay_rate_hint, double tol,
                                   bool singular_at_zero) {
    if (!(decay_rate_hint > 0.0)) throw DomainError("integrate_semi_infinite: hint must be > 0");
    if (!(tol > 0.0)) throw DomainError("integrate_semi_infinite: tol must be > 0");
    const double unit = 1.0 / decay_rate_hint;
    const double max_cut = 200.0 * unit;
    const double widths[] = {0.5, 0.5, 1.0, 2.0, 4.0};

    QuadResult total;
    double lo = 0.0;
    for (int j = 0;; ++j) {
        const double w = unit * widths[std::min(j, 4)];
        const double hi = lo + w;
        const double panel_tol = 0.25 * tol * 6.0 / (std::numbers::pi * std::numbers::pi) /
                                 static_cast<double>((j + 1) * (j + 1));
        QuadResult r;
        if (j == 0 && singular_at_zero) {
            r = integrate([&](double t) { return f(t) * std::sqrt(t); }, lo, hi,
                          Weight::inv_sqrt_lower, panel_tol);
        } else {
            r = integrate(f, lo, hi, Weight::none, panel_tol);
        }
        total.value += r.value;
        total.err_estimate += r.err_estimate;
        total.evaluations += r.evaluations;
        lo = hi;

        // tail: |f| assumed to decay at least like exp(-hint (t - lo))
        double m = 0.0;
        for (double off : {0.0, 0.25, 0.5, 1.0}) m = std::max(m, std::abs(f(lo + off * unit)));
        total.evaluations += 4;
        const double tail = 2.0 * m * unit;
        if (tail <= 0.5 * tol) {
            total.err_estimate += tail;
            return total;
        }
        if (lo >= max_cut) {
            throw AccuracyUnreachable("integrate_semi_infinite: tail bound above tolerance", tail);
        }
    }
}

const GaussRule& gauss_legendre(int n) {
    static std::mutex mu;
    static std::map<int, GaussRule> cache;
    if (n < 1) throw DomainError("gauss_legendre: n must be >= 1");
    std::lock_guard lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1.0;
            const double p = n == 1 ? x : p1;
            dp = n * (x * p - p0) / (x * x - 1.0);
            const double dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // one more derivative evaluation at the converged node
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n == 1 ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return cache.emplace(n, std::move(rule)).first->second;
}

ConvGrid build_conv_grid(double t_max, int n, KernelSingularity singularity) {
    if (n < 2) throw DomainError("build_conv_grid: n must be >= 2");
    if (!(t_max > 0.0)) throw DomainError("build_conv_grid: t_max must be > 0");
    ConvGrid g;
    g.singularity = singularity;
    g.dt = t_max / (n - 1);
    g.t_nodes.resize(n);
    for (int i = 0; i < n; ++i) g.t_nodes[i] = i * g.dt;
    g.t_nodes.back() = t_max;
    g.w_near.resize(n - 1);
    g.w_far.resize(n - 1);
    const double sdt = std::sqrt(g.dt);
    for (int q = 0; q < n - 1; ++q) {
        if (singularity == KernelSingularity::none) {
            g.w_near[q] = g.w_far[q] = 0.5 * g.dt;
            continue;
        }
        // int_{q}^{q+1} s^{-1/2} ds and int s^{-1/2} (s - q) ds in units of dt,
        // written without the sqrt(q+1) - sqrt(q) cancellation.
        const double qd = q;
        const double r = 1.0 / (std::sqrt(qd + 1.0) + std::sqrt(qd));
        const double i0 = 2.0 * r;
        const double corr = q == 0 ? 0.0 : 1.0 / (std::sqrt(1.0 + 1.0 / qd) + 1.0);
        const double i1 = (2.0 / 3.0) * r * (1.0 + corr);
        g.w_far[q] = sdt * i1;
        g.w_near[q] = sdt * (i0 - i1);
    }
    return g;
}

std::vector<double> convolve(const ConvGrid& grid, std::span<const double> k_samples,
                             std::span<const double> g_samples) {
    const std::size_t n = grid.t_nodes.size();
    if (k_samples.size() != n || g_samples.size() != n) {
        throw ShapeError("convolve: sample arrays must match the grid length");
    }
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t q = 0; q < i; ++q) {
            acc += grid.w_near[q] * k_samples[q] * g_samples[i - q] +
                   grid.w_far[q] * k_samples[q + 1] * g_samples[i - q - 1];
        }
        out[i] = acc;
    }
    return out;
}

}  // namespace fhn
