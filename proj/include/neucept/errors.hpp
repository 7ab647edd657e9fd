#pragma once

#include <stdexcept>
#include <string>

namespace neucept {

// Config/usage problems (bad parameters, malformed config). CLI exit code 1.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Data problems (missing files, dimension mismatches, non-finite values). Exit code 2.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numerical failures (non-PSD covariance, degenerate likelihood). Exit code 3.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace neucept
