#include "fhn/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "fhn/errors.hpp"

namespace fhn {

ModelParams mark_test_context(ModelParams p) {
    p.test_context_ = true;
    return p;
}

namespace {

void require(bool ok, const char* field, const char* constraint) {
    if (!ok) throw ValidationError(field, constraint);
}

bool finite(double v) { return std::isfinite(v); }

}  // namespace

void check_params(const ModelParams& p, ParamScope scope) {
    require(finite(p.epsilon) && p.epsilon > 0.0, "epsilon", "must be > 0");
    require(finite(p.L) && p.L > 0.0, "L", "must be > 0");
    if (p.is_test_context()) {
        require(finite(p.a) && p.a >= 0.0, "a", "must be >= 0");
        require(finite(p.b) && p.b >= 0.0, "b", "must be >= 0");
        require(finite(p.beta) && p.beta >= 0.0, "beta", "must be >= 0");
        return;
    }
    if (scope == ParamScope::model) {
        require(finite(p.a) && p.a > 0.0 && p.a < 1.0, "a", "must satisfy 0 < a < 1");
    } else {
        require(finite(p.a) && p.a > 0.0, "a", "must be > 0");
    }
    require(finite(p.b) && p.b > 0.0, "b", "must be > 0");
    require(finite(p.beta) && p.beta > 0.0, "beta", "must be > 0");
}

ModelParams validate_params(const std::map<std::string, double>& raw, ParamScope scope) {
    auto get = [&](const char* key) {
        auto it = raw.find(key);
        if (it == raw.end()) throw ValidationError(key, "missing");
        return it->second;
    };
    ModelParams p(get("epsilon"), get("a"), get("b"), get("beta"), get("L"));
    check_params(p, scope);
    return p;
}

DerivedConstants derive_constants(const ModelParams& p, double tol_degenerate_rel) {
    using std::numbers::pi;
    constexpr double zeta2 = pi * pi / 6.0;
    constexpr double gamma_3_2 = 0.88622692545275801364;  // sqrt(pi)/2

    DerivedConstants c;
    c.omega = std::min(p.a, p.beta);
    const double ab = p.a * p.beta;
    c.beta0 = 1.0 / p.a + pi * std::sqrt(p.b) * (p.a + p.beta) / (2.0 * ab * std::sqrt(ab));
    c.sigma0 = p.beta > 0.0 ? std::sqrt((p.a + p.b / p.beta) / p.epsilon)
                            : std::numeric_limits<double>::quiet_NaN();
    c.bigC = 2.0 * p.epsilon * zeta2 / (std::numbers::e * p.L * p.L);

    const double gap = std::abs(p.a - p.beta);
    if (gap >= tol_degenerate_rel * std::max(p.a, p.beta) && c.omega > 0.0) {
        const double w = c.omega;
        const double head = 1.0 / (2.0 * std::sqrt(p.epsilon * w));
        const double coef = p.b * gamma_3_2 * std::pow(w, -1.5) /
                            (2.0 * std::sqrt(pi * p.epsilon) * gap);
        c.C0 = head + coef * (1.0 + c.bigC / p.b * gap + 1.5 * c.bigC / w);
    }
    return c;
}

// ---------------------------------------------------------------------------

namespace detail {

MonotoneCubic::MonotoneCubic(std::vector<double> xs, std::vector<double> ys)
    : xs_(std::move(xs)), ys_(std::move(ys)) {
    const std::size_t n = xs_.size();
    if (n < 2 || ys_.size() != n) throw ShapeError("table needs >= 2 samples of equal length");
    for (std::size_t i = 1; i < n; ++i) {
        if (!(xs_[i] > xs_[i - 1])) throw ValidationError("table", "abscissae must increase");
    }
    std::vector<double> delta(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        delta[i] = (ys_[i + 1] - ys_[i]) / (xs_[i + 1] - xs_[i]);
    }
    slopes_.assign(n, 0.0);
    slopes_[0] = delta[0];
    slopes_[n - 1] = delta[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (delta[i - 1] * delta[i] <= 0.0) {
            slopes_[i] = 0.0;
        } else {
            // weighted harmonic mean (Fritsch-Butland)
            const double h0 = xs_[i] - xs_[i - 1], h1 = xs_[i + 1] - xs_[i];
            const double w1 = 2.0 * h1 + h0, w2 = h1 + 2.0 * h0;
            slopes_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (delta[i] == 0.0) {
            slopes_[i] = slopes_[i + 1] = 0.0;
            continue;
        }
        const double al = slopes_[i] / delta[i], be = slopes_[i + 1] / delta[i];
        if (al < 0.0) slopes_[i] = 0.0;
        if (be < 0.0) slopes_[i + 1] = 0.0;
        const double s = al * al + be * be;
        if (s > 9.0) {
            const double tau = 3.0 / std::sqrt(s);
            slopes_[i] = tau * al * delta[i];
            slopes_[i + 1] = tau * be * delta[i];
        }
    }
}

std::size_t MonotoneCubic::segment(double x) const {
    auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    std::size_t i = it == xs_.begin() ? 0 : static_cast<std::size_t>(it - xs_.begin()) - 1;
    return std::min(i, xs_.size() - 2);
}

double MonotoneCubic::value(double x) const {
    if (x <= xs_.front()) return ys_.front();
    if (x >= xs_.back()) return ys_.back();
    const std::size_t i = segment(x);
    const double h = xs_[i + 1] - xs_[i];
    const double s = (x - xs_[i]) / h;
    const double s2 = s * s, s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
    const double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
    return h00 * ys_[i] + h10 * h * slopes_[i] + h01 * ys_[i + 1] + h11 * h * slopes_[i + 1];
}

double MonotoneCubic::derivative(double x) const {
    if (x < xs_.front() || x > xs_.back()) return 0.0;
    const std::size_t i = segment(x);
    const double h = xs_[i + 1] - xs_[i];
    const double s = (x - xs_[i]) / h;
    const double s2 = s * s;
    const double d00 = (6 * s2 - 6 * s) / h, d10 = 3 * s2 - 4 * s + 1;
    const double d01 = (-6 * s2 + 6 * s) / h, d11 = 3 * s2 - 2 * s;
    return d00 * ys_[i] + d10 * slopes_[i] + d01 * ys_[i + 1] + d11 * slopes_[i + 1];
}

}  // namespace detail

// ---------------------------------------------------------------------------

TimeFunction TimeFunction::constant(double c) {
    TimeFunction f;
    f.kind_ = Kind::constant;
    f.c0_ = c;
    f.limit_ = c;
    return f;
}

TimeFunction TimeFunction::saturating(double limit, double rate) {
    if (!(rate > 0.0)) throw ValidationError("rate", "must be > 0");
    TimeFunction f;
    f.kind_ = Kind::saturating;
    f.c0_ = limit;
    f.c1_ = rate;
    f.limit_ = limit;
    return f;
}

TimeFunction TimeFunction::decaying(double c, double rate) {
    if (!(rate > 0.0)) throw ValidationError("rate", "must be > 0");
    TimeFunction f;
    f.kind_ = Kind::decaying;
    f.c0_ = c;
    f.c1_ = rate;
    f.limit_ = 0.0;
    return f;
}

TimeFunction TimeFunction::ramp(double start, double end, double t_ramp) {
    if (!(t_ramp > 0.0)) throw ValidationError("t_ramp", "must be > 0");
    TimeFunction f;
    f.kind_ = Kind::ramp;
    f.c0_ = start;
    f.c1_ = end;
    f.c2_ = t_ramp;
    f.limit_ = end;
    return f;
}

TimeFunction TimeFunction::table(std::vector<double> times, std::vector<double> values,
                                 TableInterp interp) {
    if (times.empty() || times.front() != 0.0) {
        throw ValidationError("times", "table must start at t = 0");
    }
    TimeFunction f;
    f.kind_ = Kind::table;
    f.interp_ = interp;
    f.table_ = detail::MonotoneCubic(std::move(times), std::move(values));
    f.limit_ = f.table_.ys().back();
    return f;
}

double TimeFunction::value(double t) const {
    if (!(t >= 0.0)) throw DomainError("time function evaluated at t < 0");
    switch (kind_) {
        case Kind::constant: return c0_;
        case Kind::saturating: return -c0_ * std::expm1(-c1_ * t);
        case Kind::decaying: return c0_ * std::exp(-c1_ * t);
        case Kind::ramp: return t >= c2_ ? c1_ : c0_ + (c1_ - c0_) * t / c2_;
        case Kind::table: {
            if (interp_ == TableInterp::monotone_cubic) return table_.value(t);
            const auto& xs = table_.xs();
            const auto& ys = table_.ys();
            if (t >= xs.back()) return ys.back();
            auto it = std::upper_bound(xs.begin(), xs.end(), t);
            const std::size_t i = static_cast<std::size_t>(it - xs.begin()) - 1;
            const double s = (t - xs[i]) / (xs[i + 1] - xs[i]);
            return ys[i] + s * (ys[i + 1] - ys[i]);
        }
    }
    return 0.0;
}

double TimeFunction::derivative(double t) const {
    if (!(t >= 0.0)) throw DomainError("time function derivative at t < 0");
    switch (kind_) {
        case Kind::constant: return 0.0;
        case Kind::saturating: return c0_ * c1_ * std::exp(-c1_ * t);
        case Kind::decaying: return -c0_ * c1_ * std::exp(-c1_ * t);
        case Kind::ramp: return t < c2_ ? (c1_ - c0_) / c2_ : 0.0;
        case Kind::table:
            if (interp_ == TableInterp::linear) {
                throw UnsupportedOperation("linear table interpolation has no derivative rule");
            }
            return table_.derivative(t);
    }
    return 0.0;
}

bool TimeFunction::is_identically_zero() const noexcept {
    switch (kind_) {
        case Kind::constant: return c0_ == 0.0;
        case Kind::saturating:
        case Kind::decaying: return c0_ == 0.0;
        case Kind::ramp: return c0_ == 0.0 && c1_ == 0.0;
        case Kind::table:
            return std::all_of(table_.ys().begin(), table_.ys().end(),
                               [](double v) { return v == 0.0; });
    }
    return false;
}

TimeFunction TimeFunction::without_declared_limit() const {
    TimeFunction f = *this;
    f.limit_.reset();
    return f;
}

std::string TimeFunction::describe() const {
    std::ostringstream os;
    switch (kind_) {
        case Kind::constant: os << "constant(c=" << c0_ << ")"; break;
        case Kind::saturating: os << "saturating(limit=" << c0_ << ", rate=" << c1_ << ")"; break;
        case Kind::decaying: os << "decaying(c=" << c0_ << ", rate=" << c1_ << ")"; break;
        case Kind::ramp:
            os << "ramp(start=" << c0_ << ", end=" << c1_ << ", t_ramp=" << c2_ << ")";
            break;
        case Kind::table: os << "table(n=" << table_.xs().size() << ")"; break;
    }
    return os.str();
}

double eval_time_fn(const TimeFunction& f, double t) { return f.value(t); }
double eval_time_fn_deriv(const TimeFunction& f, double t) { return f.derivative(t); }

// ---------------------------------------------------------------------------

namespace {

void require_length(double L) {
    if (!(L > 0.0) || !std::isfinite(L)) throw ValidationError("L", "must be > 0");
}

}  // namespace

SpaceFunction SpaceFunction::constant(double c, double L) {
    require_length(L);
    SpaceFunction f;
    f.kind_ = Kind::constant;
    f.L_ = L;
    f.coeffs_ = {c};
    return f;
}

SpaceFunction SpaceFunction::polynomial(std::vector<double> coeffs, double L) {
    require_length(L);
    if (coeffs.empty()) coeffs.push_back(0.0);
    SpaceFunction f;
    f.kind_ = Kind::polynomial;
    f.L_ = L;
    f.coeffs_ = std::move(coeffs);
    return f;
}

SpaceFunction SpaceFunction::cosine(std::vector<double> coeffs, double L) {
    require_length(L);
    if (coeffs.empty()) coeffs.push_back(0.0);
    SpaceFunction f;
    f.kind_ = Kind::cosine;
    f.L_ = L;
    f.coeffs_ = std::move(coeffs);
    return f;
}

SpaceFunction SpaceFunction::table(std::vector<double> xs, std::vector<double> values,
                                   double L) {
    require_length(L);
    if (xs.empty() || xs.front() > 0.0 || xs.back() < L) {
        throw ValidationError("xs", "table must cover [0, L]");
    }
    SpaceFunction f;
    f.kind_ = Kind::table;
    f.L_ = L;
    f.table_ = detail::MonotoneCubic(std::move(xs), std::move(values));
    return f;
}

double SpaceFunction::value(double x) const {
    const double slack = 1e-12 * L_;
    if (!(x >= -slack && x <= L_ + slack)) {
        throw DomainError("space function evaluated outside [0, L]");
    }
    x = std::clamp(x, 0.0, L_);
    switch (kind_) {
        case Kind::constant: return coeffs_[0];
        case Kind::polynomial: {
            double acc = 0.0;
            for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
            return acc;
        }
        case Kind::cosine: {
            double acc = 0.0;
            for (std::size_t k = 0; k < coeffs_.size(); ++k) {
                if (coeffs_[k] != 0.0) {
                    acc += coeffs_[k] * std::cos(static_cast<double>(k) * std::numbers::pi * x / L_);
                }
            }
            return acc;
        }
        case Kind::table: return table_.value(x);
    }
    return 0.0;
}

bool SpaceFunction::is_identically_zero() const noexcept {
    if (kind_ == Kind::table) {
        return std::all_of(table_.ys().begin(), table_.ys().end(),
                           [](double v) { return v == 0.0; });
    }
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](double v) { return v == 0.0; });
}

std::string SpaceFunction::describe() const {
    std::ostringstream os;
    const char* names[] = {"constant", "polynomial", "cosine", "table"};
    os << names[static_cast<int>(kind_)] << "(";
    if (kind_ == Kind::table) {
        os << "n=" << table_.xs().size();
    } else {
        for (std::size_t k = 0; k < coeffs_.size(); ++k) os << (k ? "," : "") << coeffs_[k];
    }
    os << ")";
    return os.str();
}

double eval_space_fn(const SpaceFunction& f, double x) { return f.value(x); }

void validate_spec(const ProblemSpec& spec) {
    check_params(spec.params, ParamScope::model);
    if (!(spec.T > 0.0) || !std::isfinite(spec.T)) throw ValidationError("T", "must be > 0");
    const double L = spec.params.L;
    auto same_length = [&](const SpaceFunction& f, const char* name) {
        if (std::abs(f.length() - L) > 1e-12 * L) {
            throw ValidationError(name, "profile domain must be [0, L]");
        }
        // finite everywhere on a probe grid
        for (int i = 0; i <= 64; ++i) {
            if (!std::isfinite(f.value(L * i / 64.0))) throw ValidationError(name, "non-finite");
        }
    };
    same_length(spec.u0, "u0");
    same_length(spec.v0, "v0");
}

}  // namespace fhn
