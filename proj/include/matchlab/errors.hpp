#pragma once

#include <stdexcept>
#include <string>

namespace matchlab {

/// Malformed input: bad file contents, tied utilities, inconsistent
/// dimensions, unresolved names. Maps to CLI exit code 2.
struct SchemaError : std::runtime_error {
  explicit SchemaError(const std::string& what) : std::runtime_error(what) {}
};

/// A generator's self-check failed (an asserted inequality does not hold, or
/// a bundled profile does not reproduce its expected outcome). Maps to CLI
/// exit code 3.
struct ConstructionError : std::runtime_error {
  explicit ConstructionError(const std::string& what) : std::runtime_error(what) {}
};

/// An exhaustive sweep would exceed the configured profile budget. Sweeps
/// never silently sample; they fail instead. Maps to CLI exit code 4.
struct BudgetExceeded : std::runtime_error {
  explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

/// A brute-force oracle was asked to run beyond its size bound.
struct SizeBoundExceeded : std::invalid_argument {
  explicit SizeBoundExceeded(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace matchlab
