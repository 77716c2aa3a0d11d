#pragma once

#include <stdexcept>
#include <string>

namespace fhn {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A parameter or data field violates its declared domain.
class ValidationError : public Error {
public:
    ValidationError(std::string field, std::string constraint)
        : Error("invalid '" + field + "': " + constraint),
          field_(std::move(field)), constraint_(std::move(constraint)) {}

    const std::string& field() const noexcept { return field_; }
    const std::string& constraint() const noexcept { return constraint_; }

private:
    std::string field_;
    std::string constraint_;
};

/// A configuration or data file could not be read. line is 1-based, 0 if unknown.
class ParseError : public Error {
public:
    ParseError(std::string field, const std::string& detail, int line = 0)
        : Error("parse error" + (line > 0 ? " at line " + std::to_string(line) : std::string()) +
                (field.empty() ? std::string() : " in '" + field + "'") + ": " + detail),
          field_(std::move(field)), detail_(detail), line_(line) {}

    const std::string& field() const noexcept { return field_; }
    const std::string& detail() const noexcept { return detail_; }
    int line() const noexcept { return line_; }

private:
    std::string field_;
    std::string detail_;
    int line_;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

class UnsupportedOperation : public Error {
public:
    using Error::Error;
};

class ShapeError : public Error {
public:
    using Error::Error;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

/// An iterative or adaptive routine ran out of its evaluation budget.
/// Carries the best estimate available at the time of failure.
class BudgetExceeded : public Error {
public:
    BudgetExceeded(const std::string& what, double best_estimate, double err_estimate)
        : Error(what), best_(best_estimate), err_(err_estimate) {}

    double best_estimate() const noexcept { return best_; }
    double err_estimate() const noexcept { return err_; }

private:
    double best_;
    double err_;
};

/// A requested accuracy cannot be certified (e.g. a tail bound stays above tolerance).
class AccuracyUnreachable : public Error {
public:
    AccuracyUnreachable(const std::string& what, double achieved)
        : Error(what), achieved_(achieved) {}

    double achieved() const noexcept { return achieved_; }

private:
    double achieved_;
};

/// Picard iteration hit its iteration cap without meeting the stopping rule.
class NonContraction : public Error {
public:
    NonContraction(const std::string& what, double last_residual)
        : Error(what), last_residual_(last_residual) {}

    double last_residual() const noexcept { return last_residual_; }

private:
    double last_residual_;
};

/// An iterate left the configured invariant rectangle.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& what, double t) : Error(what), t_(t) {}

    double time() const noexcept { return t_; }

private:
    double t_;
};

/// Time stepping produced a non-finite value.
class BlowUpError : public Error {
public:
    BlowUpError(const std::string& what, double last_stable_time)
        : Error(what), last_stable_time_(last_stable_time) {}

    double last_stable_time() const noexcept { return last_stable_time_; }

private:
    double last_stable_time_;
};

}  // namespace fhn
