#include "fdlsm/ansatz.hpp"

#include <cmath>
#include <ostream>

#include "fdlsm/analytics.hpp"
#include "fdlsm/errors.hpp"
#include "fdlsm/parallel.hpp"

namespace fdlsm {

AnsatzSet::AnsatzSet(AnsatzKind kind, std::vector<PdeSolution> solutions)
    : kind_(kind), solutions_(std::move(solutions)) {
  splines_.resize(solutions_.size());
  for (std::size_t i = 0; i < solutions_.size(); ++i) {
    const auto s = solutions_[i].grid.spots();
    for (const auto& slice : solutions_[i].slices) splines_[i].emplace_back(s, slice);
  }
}

double evaluate_ansatz(const AnsatzSet& ansatz, std::size_t k, std::span<const double> state) {
  switch (ansatz.kind()) {
    case AnsatzKind::WorstOf: {
      std::size_t i = 0;
      const double w = worst_spot(state, &i);
      return ansatz.evaluate(k, w, i);
    }
    case AnsatzKind::Basket:
      return ansatz.evaluate(k, basket_spot(state));
    case AnsatzKind::SingleAsset:
    case AnsatzKind::HestonReduced:
      break;
  }
  return ansatz.evaluate(k, state[0]);
}

AnsatzSet build_basket_ansatz(const BlackScholesModel& model, const Product& product, const TimeGrid& grid,
                              const PdeGridOptions& options) {
  const EffectiveBasketParams eff = effective_basket_params(model, grid.maturity());
  const double sigma = eff.vol, q = eff.dividend;
  if (!(sigma > 0.0)) throw ConfigError("basket ansatz: effective volatility is zero");
  PdeSpec spec = product_pde_spec(
      product, model.rate, [sigma](double, double) { return sigma; }, [q](double, double) { return q; }, grid);
  std::vector<PdeSolution> sol;
  sol.push_back(solve_backward(spec, PdeGrid::make(spec, options)));
  return AnsatzSet(model.dimension() == 1 ? AnsatzKind::SingleAsset : AnsatzKind::Basket, std::move(sol));
}

AnsatzSet build_worstof_ansatz(const MarketModel& model, const Product& product, const TimeGrid& grid,
                               const PdeGridOptions& options) {
  double rate = 0.0;
  std::vector<double> divs;
  std::vector<LocalVolFunction> vols;
  if (const auto* bs = std::get_if<BlackScholesModel>(&model)) {
    bs->validate();
    rate = bs->rate;
    divs = bs->dividends;
    for (double s : bs->vols) vols.emplace_back([s](double, double) { return s; });
  } else if (const auto* lv = std::get_if<LocalVolModel>(&model)) {
    lv->validate();
    rate = lv->rate;
    divs = lv->dividends;
    vols = lv->vols;
  } else {
    throw ConfigError("worst-of ansatz: requires a Black-Scholes or local-vol model");
  }

  const std::size_t d = vols.size();
  std::vector<PdeSolution> sol(d);
  parallel_chunks(d, 1, [&](std::size_t, std::size_t i, std::size_t) {
    const double q = divs[i];
    PdeSpec spec = product_pde_spec(product, rate, vols[i], [q](double, double) { return q; }, grid);
    sol[i] = solve_backward(spec, PdeGrid::make(spec, options));
  });
  return AnsatzSet(d == 1 ? AnsatzKind::SingleAsset : AnsatzKind::WorstOf, std::move(sol));
}

AnsatzSet build_heston_ansatz(const HestonModel& model, const Product& product, const TimeGrid& grid,
                              const PdeGridOptions& options) {
  model.validate();
  const HestonModel m = model;
  const double q = model.dividend;
  PdeSpec spec = product_pde_spec(
      product, model.rate,
      [m](double, double t) { return std::sqrt(heston_expected_variance(m, t)); },
      [q](double, double) { return q; }, grid);
  std::vector<PdeSolution> sol;
  sol.push_back(solve_backward(spec, PdeGrid::make(spec, options)));
  return AnsatzSet(AnsatzKind::HestonReduced, std::move(sol));
}

AnsatzSet build_ansatz(const MarketModel& model, const Product& product, const TimeGrid& grid,
                       const PdeGridOptions& options) {
  if (const auto* h = std::get_if<HestonModel>(&model)) return build_heston_ansatz(*h, product, grid, options);
  if (std::holds_alternative<WicSpec>(product)) return build_worstof_ansatz(model, product, grid, options);
  if (const auto* bs = std::get_if<BlackScholesModel>(&model)) return build_basket_ansatz(*bs, product, grid, options);
  const auto& lv = std::get<LocalVolModel>(model);
  if (lv.dimension() != 1)
    throw ConfigError("ansatz: unsupported reduction (local-vol basket with more than one asset)");
  return build_worstof_ansatz(model, product, grid, options);
}

void write_ansatz_csv(const AnsatzSet& ansatz, std::ostream& out) {
  out << "t,asset,S,value\n";
  out.precision(12);
  for (std::size_t i = 0; i < ansatz.spline_count(); ++i) {
    const auto& sol = ansatz.solutions()[i];
    const auto s = sol.grid.spots();
    for (std::size_t k = 1; k <= sol.slices.size(); ++k)
      for (std::size_t j = 0; j < s.size(); ++j)
        out << sol.dates[k - 1] << ',' << i << ',' << s[j] << ',' << sol.slices[k - 1][j] << '\n';
  }
}

}  // namespace fdlsm
