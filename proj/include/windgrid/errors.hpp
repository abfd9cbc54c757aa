#pragma once

#include <stdexcept>

namespace windgrid {

/// Bad input configuration: malformed files, out-of-range parameters,
/// degenerate tables. Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller broke an operation's precondition (illegal action, out-of-table
/// index, mismatched traces). Maps to CLI exit code 3.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace windgrid
