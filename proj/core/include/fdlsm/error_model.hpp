#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace fdlsm {

/// Backward accumulation of local regression errors:
/// eps_k = sqrt(X (eps_{k+1}^2 + Xi)) + Y eps_{k+1}, eps_M = 0.
struct ErrorRecursionParams {
  double xi = 0.0;  ///< squared local error bound
  double x = 0.0;   ///< exercise-flip probability factor, in (0, 1)
  double y = 0.0;   ///< continuation probability, in [0, 1)
  std::size_t steps = 0;
  /// Correlation with the 1D process; rescales xi by (1 - rho^2).
  std::optional<double> rho_tilde;

  double effective_xi() const;
  void validate() const;
};

/// eps indexed by steps back from maturity: result[j] = eps_{M-j}, j = 0..M.
std::vector<double> accumulate_errors(const ErrorRecursionParams& params);

/// sqrt(Xi / ((1 - Y)^2 / X - 1)); throws std::domain_error unless (1-Y)^2/X > 1.
double limiting_error(const ErrorRecursionParams& params);

/// One application of the recursion map.
double recursion_step(const ErrorRecursionParams& params, double eps_next);

}  // namespace fdlsm
