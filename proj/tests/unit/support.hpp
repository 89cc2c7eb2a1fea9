#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "fdlsm/ansatz.hpp"
#include "fdlsm/market_models.hpp"
#include "fdlsm/pricer.hpp"

namespace fdlsm::test {

inline BlackScholesModel bs_model(std::size_t d, double vol, double rate, double rho = 0.0, double q = 0.0) {
  BlackScholesModel m;
  m.rate = rate;
  m.vols.assign(d, vol);
  m.dividends.assign(d, q);
  m.correlation = rho;
  return m;
}

inline double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

/// Mean and standard error of the sample.
inline std::pair<double, double> mean_se(std::span<const double> v) {
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  const double n = static_cast<double>(v.size());
  return {m, std::sqrt(ss / (n - 1.0) / n)};
}

/// Regression and pricing path sets with their observations, ansatz attached.
struct Experiment {
  MarketModel model;
  Product product;
  TimeGrid grid;
  PathSet regression, pricing;
  ObservedPaths obs_r, obs_p;
  std::shared_ptr<const AnsatzSet> ansatz;

  Experiment(MarketModel m, Product p, TimeGrid g, std::size_t n_r, std::size_t n_p, std::uint64_t offset = 0,
             bool with_ansatz = true)
      : model(std::move(m)), product(std::move(p)), grid(std::move(g)) {
    const StreamLayout layout{offset, n_p};
    pricing = generate_paths(model, grid, n_p, Stage::Pricing, layout);
    regression = generate_paths(model, grid, n_r, Stage::Regression, layout);
    obs_r = observe(product, model, grid, regression);
    obs_p = observe(product, model, grid, pricing);
    if (with_ansatz) {
      ansatz = std::make_shared<const AnsatzSet>(build_ansatz(model, product, grid));
      attach_ansatz(obs_r, *ansatz);
      attach_ansatz(obs_p, *ansatz);
    }
  }

  double rate() const { return model_rate(model); }
};

}  // namespace fdlsm::test
