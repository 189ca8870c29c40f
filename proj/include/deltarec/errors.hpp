#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace deltarec {

/// Input violates a mathematical precondition (bad φ, gap constraint, empty
/// problem). The CLI maps this to exit status 2.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what,
                           std::optional<double> witness = std::nullopt)
      : std::invalid_argument(what), witness_(witness) {}

  /// Location (t, index or atom) at which the premise failed, when known.
  std::optional<double> witness() const noexcept { return witness_; }

 private:
  std::optional<double> witness_;
};

/// The problem P_{c,δ} has no solutions of the requested type.
class EmptyProblemError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Query outside the represented range of a truncated table or grid.
class OutOfRangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

}  // namespace deltarec
