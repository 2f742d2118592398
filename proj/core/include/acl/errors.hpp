#pragma once

#include <stdexcept>
#include <string>

namespace acl {

// Raised when a teacher, challenge or hyperparameter table cannot be built
// from what the caller supplied. Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Raised when a statistic is undefined for the given samples (zero variance,
// too few seeds, mismatched evaluation grids). Maps to CLI exit code 3.
class StatisticsError : public std::runtime_error {
 public:
  explicit StatisticsError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace acl
