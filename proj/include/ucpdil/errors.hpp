#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ucpdil {

enum class ErrorKind {
  InvalidInput,
  DimensionMismatch,
  NotHermitian,
  NotCompletelyPositive,
  NoPositiveFixedPoint,
  NonFaithfulState,
  NotInvariant,
  NotInAlgebra,
  AlgebraNotInvariant,
  DegenerateGram,
  NotInDomain,
  BudgetExceeded,
  CapacityExceeded,
  AdjointAbsent,
};

std::string_view to_string(ErrorKind kind);

/// Every failure in the library is reported through this type; `kind()`
/// carries the machine-readable category.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace ucpdil
