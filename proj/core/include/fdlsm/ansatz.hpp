#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "fdlsm/market_models.hpp"
#include "fdlsm/payoffs.hpp"
#include "fdlsm/pde1d.hpp"
#include "fdlsm/spline.hpp"

namespace fdlsm {

enum class AnsatzKind { SingleAsset, Basket, WorstOf, HestonReduced };

/// Spline proxies of 1D continuation values, one per exercise date (or d per
/// date for worst-of). Immutable after construction.
class AnsatzSet {
 public:
  AnsatzSet() = default;
  AnsatzSet(AnsatzKind kind, std::vector<PdeSolution> solutions);

  AnsatzKind kind() const { return kind_; }
  /// M, including the maturity slice.
  std::size_t date_count() const { return splines_.empty() ? 0 : splines_.front().size(); }
  std::size_t spline_count() const { return splines_.size(); }
  const CubicSpline& spline(std::size_t k, std::size_t asset = 0) const { return splines_.at(asset).at(k - 1); }
  const std::vector<PdeSolution>& solutions() const { return solutions_; }

  /// Value at date k = 1..M for explanatory x; worst-of uses spline `argmin`.
  double evaluate(std::size_t k, double x, std::size_t argmin = 0) const {
    return splines_[kind_ == AnsatzKind::WorstOf ? argmin : 0][k - 1](x);
  }

 private:
  AnsatzKind kind_ = AnsatzKind::SingleAsset;
  std::vector<PdeSolution> solutions_;
  std::vector<std::vector<CubicSpline>> splines_;  // [asset][k-1]
};

/// Evaluates on a raw path record (spots for BS/LV, (S, nu) for Heston).
double evaluate_ansatz(const AnsatzSet& ansatz, std::size_t k, std::span<const double> state);

/// Moment-matched 1D basket PDE; d = 1 reduces to the single-asset problem.
AnsatzSet build_basket_ansatz(const BlackScholesModel& model, const Product& product, const TimeGrid& grid,
                              const PdeGridOptions& options = {});

/// One PDE per asset with its own dividend and (local) volatility.
AnsatzSet build_worstof_ansatz(const MarketModel& model, const Product& product, const TimeGrid& grid,
                               const PdeGridOptions& options = {});

/// PDE with sigma(t) = sqrt(E[nu_t]); nu is ignored at evaluation.
AnsatzSet build_heston_ansatz(const HestonModel& model, const Product& product, const TimeGrid& grid,
                              const PdeGridOptions& options = {});

/// Picks the reduction matching the model and product.
AnsatzSet build_ansatz(const MarketModel& model, const Product& product, const TimeGrid& grid,
                       const PdeGridOptions& options = {});

/// t, asset, S, value rows for every spline knot.
void write_ansatz_csv(const AnsatzSet& ansatz, std::ostream& out);

}  // namespace fdlsm
