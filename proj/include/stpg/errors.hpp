#ifndef STPG_ERRORS_HPP
#define STPG_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace stpg {

// Error categories; the CLI maps these to distinct exit codes so scripted
// callers can dispatch on the failure kind without parsing messages.
enum class ErrorCategory {
  InvalidArgument,   // bad order/level/flag combinations
  Domain,            // evaluation point outside the space's interval
  Shape,             // incompatible matrix/space dimensions
  IncompleteBundle,  // potential requested but weighted matrices missing
  Factorization,     // singular-to-working-precision matrix
  Definiteness,      // matrix required to be positive definite is not
  Stability,         // discrete problem not solvable (inf-sup breakdown)
  Io,                // file read/write failure
};

inline const char* category_name(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::InvalidArgument: return "invalid-argument";
    case ErrorCategory::Domain: return "domain";
    case ErrorCategory::Shape: return "shape";
    case ErrorCategory::IncompleteBundle: return "incomplete-bundle";
    case ErrorCategory::Factorization: return "factorization";
    case ErrorCategory::Definiteness: return "definiteness";
    case ErrorCategory::Stability: return "stability";
    case ErrorCategory::Io: return "io";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory cat, const std::string& msg)
      : std::runtime_error(std::string(category_name(cat)) + ": " + msg),
        category_(cat) {}

  ErrorCategory category() const { return category_; }

 private:
  ErrorCategory category_;
};

// Inf-sup breakdown carries the measured distance that caused it, so callers
// can report how far the trial/test pair is from solvability.
class StabilityError : public Error {
 public:
  StabilityError(const std::string& msg, double eps)
      : Error(ErrorCategory::Stability, msg), eps_(eps) {}
  double measured_eps() const { return eps_; }

 private:
  double eps_;
};

}  // namespace stpg

#endif  // STPG_ERRORS_HPP
