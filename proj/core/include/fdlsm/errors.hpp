#pragma once

#include <stdexcept>
#include <string>

namespace fdlsm {

/// Raised for invalid user input: bad parameters, unsupported combinations,
/// out-of-range grid sizes.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a numerical routine cannot produce a meaningful result,
/// e.g. a singular tridiagonal pivot or non-finite values.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fdlsm
