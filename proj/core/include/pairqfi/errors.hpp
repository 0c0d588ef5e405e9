#pragma once

#include <stdexcept>
#include <string>

namespace pairqfi {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid user-facing configuration (bad quadrature orders, malformed
/// sweeps, out-of-range indices, ...). CLI maps this to exit code 2.
struct ConfigError : Error {
  using Error::Error;
};

/// Scene too close to the single-source limit: 1 - delta^2 below the guard,
/// so expressions dividing by it are refused. CLI exit code 3.
struct DegenerateSceneError : Error {
  double delta;
  explicit DegenerateSceneError(double delta_value)
      : Error("degenerate scene: 1 - delta^2 <= 1e-9 (delta = " +
              std::to_string(delta_value) + "); the pair is indistinguishable "
              "from a single source at this separation"),
        delta(delta_value) {}
};

/// Integrand oscillates faster than the quadrature resolves.
struct OscillationError : Error {
  using Error::Error;
};

/// A QFI/FI block is numerically singular and cannot be inverted.
struct SingularBlockError : Error {
  std::string block;
  double min_eigenvalue;
  SingularBlockError(std::string block_name, double min_eig)
      : Error("singular block " + block_name +
              ": smallest eigenvalue = " + std::to_string(min_eig)),
        block(std::move(block_name)),
        min_eigenvalue(min_eig) {}
};

/// Two independent computation paths disagree beyond tolerance (for example
/// analytic channel derivatives vs. finite differences). CLI exit code 4.
struct InternalConsistencyError : Error {
  double mismatch;
  InternalConsistencyError(const std::string& what_happened, double mismatch_value)
      : Error(what_happened + " (relative mismatch " +
              std::to_string(mismatch_value) + ")"),
        mismatch(mismatch_value) {}
};

}  // namespace pairqfi
