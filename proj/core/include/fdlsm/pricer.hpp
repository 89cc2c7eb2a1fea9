#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fdlsm/ansatz.hpp"
#include "fdlsm/market_models.hpp"
#include "fdlsm/nelder_mead.hpp"
#include "fdlsm/payoffs.hpp"
#include "fdlsm/regression.hpp"

namespace fdlsm {

/// Explanatory variables of a PathSet at t_0..t_M, date-major.
struct ObservedPaths {
  std::size_t n_paths = 0;
  std::size_t dates = 0;       ///< M
  std::vector<double> times;   ///< t_0..t_M
  std::vector<double> x;       ///< [k * n_paths + p]
  std::vector<double> nu;      ///< Heston only
  std::vector<std::uint32_t> argmin;
  std::vector<double> ansatz;  ///< filled by attach_ansatz, dates 1..M

  std::span<const double> x_at(std::size_t k) const { return {x.data() + k * n_paths, n_paths}; }
  std::span<const double> nu_at(std::size_t k) const {
    return nu.empty() ? std::span<const double>{} : std::span<const double>{nu.data() + k * n_paths, n_paths};
  }
  std::span<const double> ansatz_at(std::size_t k) const {
    return ansatz.empty() ? std::span<const double>{}
                          : std::span<const double>{ansatz.data() + k * n_paths, n_paths};
  }
};

ObservedPaths observe(const Product& product, const MarketModel& model, const TimeGrid& grid,
                      const PathSet& paths);
void attach_ansatz(ObservedPaths& obs, const AnsatzSet& ansatz);

struct ExercisePolicy {
  BasisSet basis;
  ExerciseSide side = ExerciseSide::Holder;
  /// fits[k-1] for dates k = 1..M-1.
  std::vector<RegressionFit> fits;
  std::shared_ptr<const AnsatzSet> ansatz;
  double seconds = 0.0;

  Scheme scheme() const { return basis.scheme; }
};

/// Analytic European on the same underlying for the pricing-stage control
/// variate (single asset only).
struct ControlVariate {
  double exact_value = 0.0;
};

struct PricingResult {
  std::string method;
  int cutoff = 0;
  std::size_t n_regression = 0;
  std::size_t n_pricing = 0;
  bool control_variate = false;
  double pv = 0.0;
  double se = 0.0;
  double expected_life = 0.0;
  double regression_seconds = 0.0;
  double pricing_seconds = 0.0;
  double pde_seconds = 0.0;
  /// Without the control variate adjustment.
  double pv_raw = 0.0;
  double se_raw = 0.0;
  /// Opt-EB only.
  std::vector<double> boundary;
  bool converged = true;
  std::size_t evaluations = 0;
};

/// Continuation estimate F_k for one path of an observed set.
double continuation_estimate(const ExercisePolicy& policy, const ObservedPaths& obs, std::size_t k,
                             std::size_t p);

/// Backward induction on regression paths with realized cash-flow targets.
/// FD-LSM requires `obs` to carry ansatz values.
ExercisePolicy regress_policy(const Product& product, double rate, const ObservedPaths& obs,
                              const BasisSet& basis, std::shared_ptr<const AnsatzSet> ansatz = nullptr);

ExercisePolicy regress_policy(const Product& product, const MarketModel& model, const TimeGrid& grid,
                              const BasisSet& basis, const PathSet& regression,
                              std::shared_ptr<const AnsatzSet> ansatz = nullptr);

/// Out-of-sample pricing under a fixed policy.
PricingResult price(const Product& product, double rate, const ObservedPaths& obs, const ExercisePolicy& policy,
                    const std::optional<ControlVariate>& cv = std::nullopt);

PricingResult price(const Product& product, const MarketModel& model, const TimeGrid& grid,
                    const ExercisePolicy& policy, const PathSet& pricing,
                    const std::optional<ControlVariate>& cv = std::nullopt);

ControlVariate make_control_variate(const Product& product, const MarketModel& model, const TimeGrid& grid);

struct OptEbOptions {
  NelderMeadOptions optimizer{0.05, 0, 1e-5, 0};
  /// max_evaluations = evaluations_per_date * M when optimizer.max_evaluations is 0.
  std::size_t evaluations_per_date = 150;
  /// Seed the simplex with backward date-by-date optimal levels; false
  /// starts every level at the strike.
  bool backward_start = true;
};

/// PV under an exercise-boundary rule: put exercises when x < b_k, call when
/// x > b_k, at dates 1..M-1; maturity pays the payoff.
PricingResult boundary_price(const BermudanSpec& spec, double rate, const ObservedPaths& obs,
                             std::span<const double> boundary);

/// Maximises the boundary-rule PV over the M-1 early-exercise levels. With
/// `fit` the levels are optimised there and `obs` only prices them;
/// otherwise both happen on `obs`.
PricingResult opt_eb_price(const BermudanSpec& spec, double rate, const ObservedPaths& obs,
                           const OptEbOptions& options = {}, const ObservedPaths* fit = nullptr);

PricingResult opt_eb_price(const BermudanSpec& spec, const MarketModel& model, const TimeGrid& grid,
                           const PathSet& pricing, const OptEbOptions& options = {},
                           const PathSet* fit = nullptr);

}  // namespace fdlsm
