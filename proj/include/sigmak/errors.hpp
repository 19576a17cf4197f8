#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sigmak {

/// Raised when an argument is outside the documented domain of a routine
/// (bad dimension, index out of range, non-finite input, malformed size).
class DomainError : public std::invalid_argument {
public:
    explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

/// Raised when a matrix or field leaves the admissible cone required by the
/// operation. Carries the offending grid point (npos for pointwise algebra)
/// and the symmetric-function level that failed (0 when not applicable), so
/// step-size controllers can react.
class NotAdmissible : public std::runtime_error {
public:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    explicit NotAdmissible(const std::string& what, std::size_t point = npos, int level = 0)
        : std::runtime_error(what), point_(point), level_(level) {}

    [[nodiscard]] std::size_t point() const noexcept { return point_; }
    [[nodiscard]] int level() const noexcept { return level_; }

private:
    std::size_t point_;
    int level_;
};

/// Raised when the Harnack feasibility condition lambda_max(S) * D^2 < pi^2/2
/// fails; the determinant-equation machinery is undefined outside it.
class HarnackInfeasible : public NotAdmissible {
public:
    HarnackInfeasible(const std::string& what, double lambda_max, double diameter)
        : NotAdmissible(what), lambda_max_(lambda_max), diameter_(diameter) {}

    [[nodiscard]] double lambda_max() const noexcept { return lambda_max_; }
    [[nodiscard]] double diameter() const noexcept { return diameter_; }

private:
    double lambda_max_;
    double diameter_;
};

/// Raised when an iterative process exhausts its budget without meeting its
/// tolerance. Base class for the specific solver failures below.
class ConvergenceFailure : public std::runtime_error {
public:
    explicit ConvergenceFailure(const std::string& what) : std::runtime_error(what) {}
};

/// Newton iteration hit its iteration cap or its line search floor.
class NoConvergence : public ConvergenceFailure {
public:
    NoConvergence(const std::string& what, int iterations, double residual)
        : ConvergenceFailure(what), iterations_(iterations), residual_(residual) {}

    [[nodiscard]] int iterations() const noexcept { return iterations_; }
    [[nodiscard]] double residual() const noexcept { return residual_; }

private:
    int iterations_;
    double residual_;
};

/// Continuation step size underflowed before reaching t = 1.
class ContinuationStalled : public ConvergenceFailure {
public:
    ContinuationStalled(const std::string& what, double t_reached)
        : ConvergenceFailure(what), t_reached_(t_reached) {}

    [[nodiscard]] double t_reached() const noexcept { return t_reached_; }

private:
    double t_reached_;
};

/// Fixed-point outer iteration stopped contracting.
class FixedPointStalled : public ConvergenceFailure {
public:
    FixedPointStalled(const std::string& what, int iterations, double gap)
        : ConvergenceFailure(what), iterations_(iterations), gap_(gap) {}

    [[nodiscard]] int iterations() const noexcept { return iterations_; }
    [[nodiscard]] double gap() const noexcept { return gap_; }

private:
    int iterations_;
    double gap_;
};

/// Raised when a configuration document is malformed or has unknown keys.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace sigmak
