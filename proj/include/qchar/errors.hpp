#pragma once

#include <stdexcept>
#include <string>

namespace qchar {

// Malformed input: bad graph, bad algebra file, mismatched domains.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A computation would exceed the configured resource budget.
struct BudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A result contradicts an identity the engine relies on.
struct ConsistencyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace qchar
