#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace bippr {

// Malformed input files or invalid configuration. CLI exit code 2.
struct InputError : std::runtime_error {
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// A reverse push exceeded its operation budget. CLI exit code 3.
struct BudgetError : std::runtime_error {
  BudgetError(const std::string& what, std::uint32_t target_node)
      : std::runtime_error(what), target(target_node) {}
  std::uint32_t target;
};

}  // namespace bippr
