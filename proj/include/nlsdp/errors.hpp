#pragma once

#include <stdexcept>
#include <string>

namespace nlsdp {

/// Thrown when an argument violates a documented precondition.
struct InvalidInput : std::invalid_argument {
  explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

/// Thrown when a computation produces non-finite values.
struct NumericalFailure : std::runtime_error {
  explicit NumericalFailure(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown when an operation requiring a KKT point is handed stale data
/// (point no longer stationary, or a selection built elsewhere).
struct StalePoint : std::runtime_error {
  explicit StalePoint(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace nlsdp
