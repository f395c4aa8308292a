#ifndef GSR_ERRORS_HPP
#define GSR_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace gsr {

/// Base class for all library errors.
class Error : public std::runtime_error {
  public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Caller passed inconsistent dimensions, invalid parameters, or asked for
/// something outside the contract (maps to CLI exit code 2).
class InvalidArgument : public Error {
  public:
    using Error::Error;
};

/// File could not be read, written, or parsed.
class IoError : public Error {
  public:
    using Error::Error;
};

/// A design precondition failed; the instance is infeasible as posed
/// (maps to CLI exit code 1).
class FeasibilityError : public Error {
  public:
    using Error::Error;
};

/// The shift operator is defective or numerically too close to it.
class NonDiagonalizable : public FeasibilityError {
  public:
    using FeasibilityError::FeasibilityError;
};

/// An active eigenvalue collides with an inactive one, so no graph filter
/// can annihilate one without the other.
class ConditionViolation : public FeasibilityError {
  public:
    using FeasibilityError::FeasibilityError;
};

/// A design matrix does not reach the rank the scheme requires.
class RankDeficient : public FeasibilityError {
  public:
    using FeasibilityError::FeasibilityError;
};

/// The numerical kernel of the annihilator system has unexpected dimension.
class KernelDimension : public FeasibilityError {
  public:
    using FeasibilityError::FeasibilityError;
};

/// The chosen seeding node has a zero entry at an active frequency (U1 > 0).
class NodeCannotExpress : public FeasibilityError {
  public:
    using FeasibilityError::FeasibilityError;
};

/// Repeated eigenvalues among the active frequencies (D1 > 0).
class DegenerateSpectrum : public FeasibilityError {
  public:
    using FeasibilityError::FeasibilityError;
};

/// A split design system is inconsistent; some frequencies cannot be zeroed.
class Infeasible : public FeasibilityError {
  public:
    using FeasibilityError::FeasibilityError;
};

/// Fewer seeding values than the objective needs (P < K).
class BudgetTooSmall : public FeasibilityError {
  public:
    using FeasibilityError::FeasibilityError;
};

}  // namespace gsr

#endif  // GSR_ERRORS_HPP
