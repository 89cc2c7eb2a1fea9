#include "fdlsm/error_model.hpp"

#include <cmath>
#include <stdexcept>

#include "fdlsm/errors.hpp"

namespace fdlsm {

double ErrorRecursionParams::effective_xi() const {
  return rho_tilde ? xi * (1.0 - *rho_tilde * *rho_tilde) : xi;
}

void ErrorRecursionParams::validate() const {
  if (!std::isfinite(xi) || xi < 0.0) throw ConfigError("error model: xi must be non-negative");
  if (!(x >= 0.0 && x < 1.0)) throw ConfigError("error model: X must lie in [0, 1)");
  if (!(y >= 0.0 && y < 1.0)) throw ConfigError("error model: Y must lie in [0, 1)");
  if (rho_tilde && !(*rho_tilde >= 0.0 && *rho_tilde <= 1.0))
    throw ConfigError("error model: rho_tilde must lie in [0, 1]");
}

double recursion_step(const ErrorRecursionParams& p, double e) {
  return std::sqrt(p.x * (e * e + p.effective_xi())) + p.y * e;
}

std::vector<double> accumulate_errors(const ErrorRecursionParams& p) {
  p.validate();
  std::vector<double> eps(p.steps + 1, 0.0);
  for (std::size_t j = 1; j <= p.steps; ++j) eps[j] = recursion_step(p, eps[j - 1]);
  return eps;
}

double limiting_error(const ErrorRecursionParams& p) {
  p.validate();
  if (p.x <= 0.0) throw std::domain_error("error model: limit requires X > 0");
  const double g = (1.0 - p.y) * (1.0 - p.y) / p.x - 1.0;
  if (!(g > 0.0)) throw std::domain_error("error model: limit requires (1 - Y)^2 / X > 1");
  return std::sqrt(p.effective_xi() / g);
}

}  // namespace fdlsm
