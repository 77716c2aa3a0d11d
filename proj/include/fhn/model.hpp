#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fhn {

/// Which constraint set a parameter tuple is validated against.
///
/// `model` is the full FitzHugh-Nagumo range (0 < a < 1). `kernel` only
/// needs a > 0, because the fundamental solution treats `a` as a decay
/// rate; the kernel bound checks are run at a = 2.
enum class ParamScope { model, kernel };

struct ModelParams {
    ModelParams() = default;
    ModelParams(double epsilon, double a, double b, double beta, double L)
        : epsilon(epsilon), a(a), b(b), beta(beta), L(L) {}

    double epsilon = 1.0;  ///< diffusion coefficient
    double a = 0.5;        ///< kinetic threshold
    double b = 1.0;        ///< recovery coupling
    double beta = 1.0;     ///< recovery decay
    double L = 1.0;        ///< strip length

    /// True only for tuples built through `test_context_params`, which may
    /// carry limiting values (b = 0, beta = 0) rejected in production.
    bool is_test_context() const noexcept { return test_context_; }

private:
    bool test_context_ = false;
    friend ModelParams mark_test_context(ModelParams p);
};

ModelParams mark_test_context(ModelParams p);

/// Throws ValidationError naming the first violated field.
void check_params(const ModelParams& p, ParamScope scope = ParamScope::model);

/// Builds parameters from a name -> value map (keys: epsilon, a, b, beta, L).
ModelParams validate_params(const std::map<std::string, double>& raw,
                            ParamScope scope = ParamScope::model);

#ifdef FHN_TEST_CONTEXTS
/// Degenerate parameter tuples (b = 0, beta = 0, ...) for limit tests.
/// Only visible to translation units compiled with FHN_TEST_CONTEXTS.
inline ModelParams test_context_params(double epsilon, double a, double b, double beta,
                                       double L) {
    return mark_test_context(ModelParams(epsilon, a, b, beta, L));
}
#endif

struct DerivedConstants {
    double omega = 0.0;   ///< min(a, beta)
    double beta0 = 0.0;   ///< bound on the time integral of the kernel mass
    double sigma0 = 0.0;  ///< sqrt((a + b/beta)/epsilon)
    double bigC = 0.0;    ///< 2 eps zeta(2) / (e L^2)
    std::optional<double> C0;  ///< undefined when a and beta (nearly) coincide
};

/// Relative threshold on |a - beta| below which C0 is left undefined.
inline constexpr double kDegenerateRelTol = 1e-8;

DerivedConstants derive_constants(const ModelParams& p,
                                  double tol_degenerate_rel = kDegenerateRelTol);

namespace detail {

/// Fritsch-Carlson monotone piecewise-cubic Hermite interpolant.
class MonotoneCubic {
public:
    MonotoneCubic() = default;
    MonotoneCubic(std::vector<double> xs, std::vector<double> ys);

    double value(double x) const;
    double derivative(double x) const;
    const std::vector<double>& xs() const noexcept { return xs_; }
    const std::vector<double>& ys() const noexcept { return ys_; }

private:
    std::size_t segment(double x) const;

    std::vector<double> xs_, ys_, slopes_;
};

}  // namespace detail

enum class TableInterp { monotone_cubic, linear };

/// Boundary flux program phi(t), t >= 0.
class TimeFunction {
public:
    enum class Kind { constant, saturating, decaying, ramp, table };

    static TimeFunction constant(double c);
    /// limit * (1 - exp(-rate t))
    static TimeFunction saturating(double limit, double rate);
    /// c * exp(-rate t)
    static TimeFunction decaying(double c, double rate);
    /// Linear from `start` at t = 0 to `end` at t = t_ramp, then held.
    static TimeFunction ramp(double start, double end, double t_ramp);
    /// Samples held at the last value beyond the final time.
    static TimeFunction table(std::vector<double> times, std::vector<double> values,
                              TableInterp interp = TableInterp::monotone_cubic);

    double value(double t) const;
    double derivative(double t) const;

    Kind kind() const noexcept { return kind_; }
    std::optional<double> declared_limit() const noexcept { return limit_; }
    bool derivative_integrable() const noexcept { return deriv_l1_; }
    bool is_identically_zero() const noexcept;

    /// Copy with the t -> infinity metadata removed.
    TimeFunction without_declared_limit() const;

    /// Short human-readable description, e.g. "saturating(limit=2, rate=1)".
    std::string describe() const;

private:
    Kind kind_ = Kind::constant;
    double c0_ = 0.0, c1_ = 0.0, c2_ = 0.0;
    TableInterp interp_ = TableInterp::monotone_cubic;
    detail::MonotoneCubic table_;
    std::optional<double> limit_;
    bool deriv_l1_ = true;
};

double eval_time_fn(const TimeFunction& f, double t);
double eval_time_fn_deriv(const TimeFunction& f, double t);

/// Initial profile on [0, L].
class SpaceFunction {
public:
    enum class Kind { constant, polynomial, cosine, table };

    static SpaceFunction constant(double c, double L);
    /// sum_k coeffs[k] x^k
    static SpaceFunction polynomial(std::vector<double> coeffs, double L);
    /// sum_k coeffs[k] cos(k pi x / L), k from 0
    static SpaceFunction cosine(std::vector<double> coeffs, double L);
    static SpaceFunction table(std::vector<double> xs, std::vector<double> values, double L);

    double value(double x) const;
    Kind kind() const noexcept { return kind_; }
    double length() const noexcept { return L_; }
    const std::vector<double>& coeffs() const noexcept { return coeffs_; }
    bool is_identically_zero() const noexcept;
    std::string describe() const;

private:
    Kind kind_ = Kind::constant;
    double L_ = 1.0;
    std::vector<double> coeffs_;
    detail::MonotoneCubic table_;
};

double eval_space_fn(const SpaceFunction& f, double x);

struct ProblemSpec {
    ModelParams params;
    SpaceFunction u0 = SpaceFunction::constant(0.0, 1.0);
    SpaceFunction v0 = SpaceFunction::constant(0.0, 1.0);
    TimeFunction phi1 = TimeFunction::constant(0.0);
    TimeFunction phi2 = TimeFunction::constant(0.0);
    double T = 1.0;

    bool homogeneous_bc() const noexcept {
        return phi1.is_identically_zero() && phi2.is_identically_zero();
    }
};

/// Checks every component; the profiles must live on [0, params.L].
void validate_spec(const ProblemSpec& spec);

}  // namespace fhn
