#pragma once

#include <stdexcept>
#include <string>

namespace arcsine_reset {

/// Argument outside the mathematical domain of an operation.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

/// A truncated series or expansion did not reach its tolerance within the term cap.
struct ConvergenceFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Every start of the multi-start simplex search hit its iteration cap.
struct FitDiverged : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Requested ensemble work exceeds the configured step budget.
struct BudgetExceeded : std::length_error {
  using std::length_error::length_error;
};

namespace detail {

inline void require_domain(bool ok, const char* what) {
  if (!ok) throw DomainError(what);
}

}  // namespace detail
}  // namespace arcsine_reset
