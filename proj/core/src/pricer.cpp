#include "fdlsm/pricer.hpp"

#include <chrono>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "fdlsm/analytics.hpp"
#include "fdlsm/errors.hpp"
#include "fdlsm/parallel.hpp"

namespace fdlsm {

namespace {

constexpr std::size_t kChunk = 4096;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double coupon_of(const Product& product, double x) {
  if (const auto* w = std::get_if<WicSpec>(&product)) return wic_coupon(*w, x);
  return 0.0;
}

// Per-chunk moments, reduced in chunk order so results do not depend on the
// thread count.
struct Moments {
  double v = 0, vv = 0, tau = 0, c = 0, cc = 0, vc = 0;
};

Moments reduce(const std::vector<Moments>& parts) {
  Moments m;
  for (const auto& p : parts) {
    m.v += p.v;
    m.vv += p.vv;
    m.tau += p.tau;
    m.c += p.c;
    m.cc += p.cc;
    m.vc += p.vc;
  }
  return m;
}

void fill_statistics(PricingResult& r, const Moments& m, std::size_t n, const std::optional<ControlVariate>& cv) {
  const double nn = static_cast<double>(n);
  const double mean_v = m.v / nn;
  const double var_v = std::max(0.0, (m.vv - nn * mean_v * mean_v) / (nn - 1.0));
  r.pv_raw = mean_v;
  r.se_raw = std::sqrt(var_v / nn);
  r.expected_life = m.tau / nn;
  r.pv = r.pv_raw;
  r.se = r.se_raw;
  if (cv) {
    const double mean_c = m.c / nn;
    const double var_c = std::max(0.0, (m.cc - nn * mean_c * mean_c) / (nn - 1.0));
    const double cov = (m.vc - nn * mean_v * mean_c) / (nn - 1.0);
    const double beta = var_c > 0.0 ? cov / var_c : 0.0;
    r.control_variate = true;
    r.pv = mean_v - beta * (mean_c - cv->exact_value);
    const double var_adj = std::max(0.0, var_v - 2.0 * beta * cov + beta * beta * var_c);
    r.se = std::sqrt(var_adj / nn);
  }
}

}  // namespace

ObservedPaths observe(const Product& product, const MarketModel& model, const TimeGrid& grid,
                      const PathSet& paths) {
  validate_product(product);
  ObservedPaths obs;
  obs.n_paths = paths.path_count();
  obs.dates = grid.exercise_count();
  obs.times = grid.exercise_times();
  const std::size_t n = obs.n_paths, m = obs.dates;
  const bool heston = std::holds_alternative<HestonModel>(model);
  const bool worst = std::holds_alternative<WicSpec>(product) && !heston;
  obs.x.resize((m + 1) * n);
  if (heston) obs.nu.resize((m + 1) * n);
  if (worst) obs.argmin.resize((m + 1) * n);

  std::vector<std::size_t> rec(m + 1);
  for (std::size_t k = 0; k <= m; ++k) rec[k] = paths.record_of_node(grid.exercise_node(k));

  parallel_chunks(n, kChunk, [&](std::size_t, std::size_t b, std::size_t e) {
    for (std::size_t k = 0; k <= m; ++k)
      for (std::size_t p = b; p < e; ++p) {
        const ExplanatoryState s = explanatory_state(product, model, paths.state(rec[k], p));
        obs.x[k * n + p] = s.x;
        if (heston) obs.nu[k * n + p] = s.nu;
        if (worst) obs.argmin[k * n + p] = static_cast<std::uint32_t>(s.argmin);
      }
  });
  return obs;
}

void attach_ansatz(ObservedPaths& obs, const AnsatzSet& ansatz) {
  const std::size_t n = obs.n_paths, m = obs.dates;
  if (ansatz.date_count() != m) throw ConfigError("ansatz: date count does not match the path observations");
  obs.ansatz.assign((m + 1) * n, 0.0);
  parallel_chunks(n, kChunk, [&](std::size_t, std::size_t b, std::size_t e) {
    for (std::size_t k = 1; k <= m; ++k)
      for (std::size_t p = b; p < e; ++p)
        obs.ansatz[k * n + p] =
            ansatz.evaluate(k, obs.x[k * n + p], obs.argmin.empty() ? 0 : obs.argmin[k * n + p]);
  });
}

double continuation_estimate(const ExercisePolicy& policy, const ObservedPaths& obs, std::size_t k,
                             std::size_t p) {
  const std::size_t i = k * obs.n_paths + p;
  return predict(policy.fits[k - 1], policy.basis, obs.x[i], obs.nu.empty() ? 0.0 : obs.nu[i],
                 obs.ansatz.empty() ? 0.0 : obs.ansatz[i]);
}

ExercisePolicy regress_policy(const Product& product, double rate, const ObservedPaths& obs,
                              const BasisSet& basis, std::shared_ptr<const AnsatzSet> ansatz) {
  basis.validate();
  if (basis.scheme == Scheme::FDLSM && obs.ansatz.empty())
    throw ConfigError("regression stage: FD-LSM requires an ansatz");
  if (basis.descriptor == StateDescriptor::HestonPair && obs.nu.empty())
    throw ConfigError("regression stage: Heston basis requires variance observations");

  const auto t0 = std::chrono::steady_clock::now();
  ExercisePolicy policy;
  policy.basis = basis;
  policy.side = exercise_side(product);
  policy.ansatz = std::move(ansatz);

  const std::size_t n = obs.n_paths, m = obs.dates;
  if (!has_early_exercise(product) || m < 2) {
    policy.seconds = seconds_since(t0);
    return policy;
  }
  const bool holder = policy.side == ExerciseSide::Holder;

  std::vector<double> v(n);
  const auto xm = obs.x_at(m);
  for (std::size_t p = 0; p < n; ++p) v[p] = exercise_payoff(product, xm[p], true);

  policy.fits.resize(m - 1);
  for (std::size_t k = m - 1; k >= 1; --k) {
    const double df = std::exp(-rate * (obs.times[k + 1] - obs.times[k]));
    for (double& y : v) y *= df;

    RegressionData data{obs.x_at(k), basis.descriptor == StateDescriptor::HestonPair ? obs.nu_at(k) : std::span<const double>{},
                        basis.scheme == Scheme::FDLSM ? obs.ansatz_at(k) : std::span<const double>{}};
    policy.fits[k - 1] = fit(basis, data, v, k);

    parallel_chunks(n, kChunk, [&](std::size_t, std::size_t b, std::size_t e) {
      for (std::size_t p = b; p < e; ++p) {
        const double x = obs.x[k * n + p];
        const double c = coupon_of(product, x);
        const double z = exercise_payoff(product, x, false) - c;
        const double f = continuation_estimate(policy, obs, k, p);
        const bool exercise = holder ? z - f > 0.0 : z - f < 0.0;
        v[p] = c + (exercise ? z : v[p]);
      }
    });
    if (k == 1) break;
  }
  policy.seconds = seconds_since(t0);
  return policy;
}

ExercisePolicy regress_policy(const Product& product, const MarketModel& model, const TimeGrid& grid,
                              const BasisSet& basis, const PathSet& regression,
                              std::shared_ptr<const AnsatzSet> ansatz) {
  if (regression.stage() != Stage::Regression)
    throw ConfigError("regression stage: path set is not tagged for regression");
  ObservedPaths obs = observe(product, model, grid, regression);
  if (ansatz) attach_ansatz(obs, *ansatz);
  return regress_policy(product, model_rate(model), obs, basis, std::move(ansatz));
}

PricingResult price(const Product& product, double rate, const ObservedPaths& obs, const ExercisePolicy& policy,
                    const std::optional<ControlVariate>& cv) {
  const std::size_t n = obs.n_paths, m = obs.dates;
  const bool early = has_early_exercise(product) && m >= 2;
  if (early && policy.fits.size() != m - 1) throw ConfigError("pricing stage: policy does not cover the exercise dates");
  if (policy.side != exercise_side(product)) throw ConfigError("pricing stage: policy and product exercise sides differ");
  if (early && policy.scheme() == Scheme::FDLSM && obs.ansatz.empty())
    throw ConfigError("pricing stage: FD-LSM policy requires ansatz values on the pricing paths");
  if (cv && std::holds_alternative<WicSpec>(product))
    throw ConfigError("pricing stage: control variate applies to option payoffs only");

  const auto t0 = std::chrono::steady_clock::now();
  const bool holder = policy.side == ExerciseSide::Holder;
  std::vector<double> disc(m + 1);
  for (std::size_t k = 0; k <= m; ++k) disc[k] = std::exp(-rate * obs.times[k]);

  std::vector<Moments> parts(chunk_count(n, kChunk));
  parallel_chunks(n, kChunk, [&](std::size_t chunk, std::size_t b, std::size_t e) {
    Moments& mo = parts[chunk];
    for (std::size_t p = b; p < e; ++p) {
      double val = 0.0;
      std::size_t stop = m;
      if (early) {
        for (std::size_t k = 1; k < m; ++k) {
          const double x = obs.x[k * n + p];
          const double c = coupon_of(product, x);
          const double z = exercise_payoff(product, x, false) - c;
          const double f = continuation_estimate(policy, obs, k, p);
          const bool exercise = holder ? z - f > 0.0 : z - f < 0.0;
          if (exercise) {
            val += disc[k] * (c + z);
            stop = k;
            break;
          }
          val += disc[k] * c;
        }
      }
      const double terminal = exercise_payoff(product, obs.x[m * n + p], true);
      if (stop == m) val += disc[m] * terminal;
      mo.v += val;
      mo.vv += val * val;
      mo.tau += obs.times[stop];
      if (cv) {
        const double cterm = disc[m] * terminal;
        mo.c += cterm;
        mo.cc += cterm * cterm;
        mo.vc += val * cterm;
      }
    }
  });

  PricingResult r;
  r.method = scheme_name(policy.scheme());
  r.cutoff = policy.basis.cutoff;
  r.n_pricing = n;
  r.regression_seconds = policy.seconds;
  fill_statistics(r, reduce(parts), n, cv);
  r.pricing_seconds = seconds_since(t0);
  return r;
}

PricingResult price(const Product& product, const MarketModel& model, const TimeGrid& grid,
                    const ExercisePolicy& policy, const PathSet& pricing, const std::optional<ControlVariate>& cv) {
  if (pricing.stage() != Stage::Pricing) throw ConfigError("pricing stage: path set is not tagged for pricing");
  const auto t0 = std::chrono::steady_clock::now();
  ObservedPaths obs = observe(product, model, grid, pricing);
  if (policy.scheme() == Scheme::FDLSM) {
    if (!policy.ansatz) throw ConfigError("pricing stage: FD-LSM policy carries no ansatz");
    attach_ansatz(obs, *policy.ansatz);
  }
  const double observe_seconds = seconds_since(t0);
  PricingResult r = price(product, model_rate(model), obs, policy, cv);
  r.pricing_seconds += observe_seconds;
  return r;
}

ControlVariate make_control_variate(const Product& product, const MarketModel& model, const TimeGrid& grid) {
  const auto* bs = std::get_if<BlackScholesModel>(&model);
  if (!bs || bs->dimension() != 1) throw ConfigError("control variate: only single-asset Black-Scholes is supported");
  OptionType type;
  double strike;
  if (const auto* b = std::get_if<BermudanSpec>(&product)) {
    type = b->type;
    strike = b->strike;
  } else if (const auto* e = std::get_if<EuropeanSpec>(&product)) {
    type = e->type;
    strike = e->strike;
  } else {
    throw ConfigError("control variate: product has no European counterpart");
  }
  return ControlVariate{bs_european(1.0, strike, bs->vols[0], bs->rate, bs->dividends[0], grid.maturity(), type)};
}

namespace {

// Path-major copies keep the early-exit loop cache friendly.
struct BoundaryData {
  std::size_t n = 0, m = 0;
  std::vector<double> x;    // [p * m + (k-1)]
  std::vector<double> pay;  // discounted payoff, same layout
  std::vector<double> times;

  BoundaryData() = default;
  BoundaryData(const BermudanSpec& spec, double rate, const ObservedPaths& obs)
      : n(obs.n_paths), m(obs.dates), x(n * m), pay(n * m), times(obs.times) {
    const Product prod = spec;
    for (std::size_t k = 1; k <= m; ++k) {
      const double df = std::exp(-rate * obs.times[k]);
      for (std::size_t p = 0; p < n; ++p) {
        const double v = obs.x[k * n + p];
        x[p * m + k - 1] = v;
        pay[p * m + k - 1] = df * exercise_payoff(prod, v, k == m);
      }
    }
  }

  Moments evaluate(bool put, std::span<const double> b) const {
    std::vector<Moments> parts(chunk_count(n, kChunk));
    parallel_chunks(n, kChunk, [&](std::size_t chunk, std::size_t lo, std::size_t hi) {
      Moments& mo = parts[chunk];
      for (std::size_t p = lo; p < hi; ++p) {
        const double* xp = x.data() + p * m;
        std::size_t k = 0;
        for (; k + 1 < m; ++k)
          if (put ? xp[k] < b[k] : xp[k] > b[k]) break;
        const double v = pay[p * m + k];
        mo.v += v;
        mo.vv += v * v;
        mo.tau += times[k + 1];
      }
    });
    return reduce(parts);
  }

  // Backward date-by-date thresholds: at each date, with later levels fixed,
  // the level maximising the sample PV is found exactly by a sorted scan.
  std::vector<double> backward_levels(bool put) const {
    std::vector<double> b(m - 1), v(n), gain(n);
    std::vector<std::size_t> order(n);
    for (std::size_t p = 0; p < n; ++p) v[p] = pay[p * m + m - 1];
    for (std::size_t k = m - 1; k-- > 0;) {
      for (std::size_t p = 0; p < n; ++p) gain[p] = pay[p * m + k] - v[p];
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t c) {
        const double xa = x[a * m + k], xc = x[c * m + k];
        return put ? (xa < xc || (xa == xc && a < c)) : (xa > xc || (xa == xc && a < c));
      });
      // Exercise the first s paths of `order`; ties in x cannot be split.
      double acc = 0.0, best = 0.0;
      std::size_t best_s = 0;
      for (std::size_t s = 1; s <= n; ++s) {
        acc += gain[order[s - 1]];
        if (s < n && x[order[s] * m + k] == x[order[s - 1] * m + k]) continue;
        if (acc > best) {
          best = acc;
          best_s = s;
        }
      }
      const double first = x[order.front() * m + k], last = x[order.back() * m + k];
      if (best_s == 0) {
        b[k] = put ? 0.5 * first : 2.0 * first;
      } else if (best_s == n) {
        b[k] = put ? 2.0 * last : 0.5 * last;
      } else {
        b[k] = 0.5 * (x[order[best_s - 1] * m + k] + x[order[best_s] * m + k]);
      }
      for (std::size_t s = 0; s < best_s; ++s) v[order[s]] = pay[order[s] * m + k];
    }
    return b;
  }
};

}  // namespace

PricingResult boundary_price(const BermudanSpec& spec, double rate, const ObservedPaths& obs,
                             std::span<const double> boundary) {
  if (boundary.size() + 1 != obs.dates) throw ConfigError("boundary price: need one level per early exercise date");
  const BoundaryData data(spec, rate, obs);
  PricingResult r;
  r.method = "Opt-EB";
  r.n_pricing = obs.n_paths;
  fill_statistics(r, data.evaluate(spec.type == OptionType::Put, boundary), obs.n_paths, std::nullopt);
  r.boundary.assign(boundary.begin(), boundary.end());
  return r;
}

PricingResult opt_eb_price(const BermudanSpec& spec, double rate, const ObservedPaths& obs,
                           const OptEbOptions& options, const ObservedPaths* fit_paths) {
  const auto t0 = std::chrono::steady_clock::now();
  if (fit_paths && fit_paths->dates != obs.dates) throw ConfigError("Opt-EB: fit and pricing sets differ in dates");
  const BoundaryData data(spec, rate, obs);
  const BoundaryData fit_data = fit_paths ? BoundaryData(spec, rate, *fit_paths) : BoundaryData{};
  const BoundaryData& fit = fit_paths ? fit_data : data;
  const bool put = spec.type == OptionType::Put;
  const std::size_t dims = obs.dates - 1;
  const double nn = static_cast<double>(fit.n);

  PricingResult r;
  r.method = "Opt-EB";
  r.n_pricing = obs.n_paths;
  r.n_regression = fit_paths ? fit_paths->n_paths : 0;
  std::vector<double> best(dims, spec.strike);
  if (dims > 0 && options.backward_start) best = fit.backward_levels(put);
  if (dims > 0) {
    NelderMeadOptions nm = options.optimizer;
    if (nm.max_evaluations == 0) nm.max_evaluations = options.evaluations_per_date * obs.dates;
    const auto res = nelder_mead([&](std::span<const double> b) { return -fit.evaluate(put, b).v / nn; },
                                 best, nm);
    best = res.x;
    r.converged = res.converged;
    r.evaluations = res.evaluations;
  }
  fill_statistics(r, data.evaluate(put, best), obs.n_paths, std::nullopt);
  r.boundary = best;
  r.pricing_seconds = seconds_since(t0);
  return r;
}

PricingResult opt_eb_price(const BermudanSpec& spec, const MarketModel& model, const TimeGrid& grid,
                           const PathSet& pricing, const OptEbOptions& options, const PathSet* fit) {
  const ObservedPaths obs = observe(spec, model, grid, pricing);
  if (!fit) return opt_eb_price(spec, model_rate(model), obs, options);
  const ObservedPaths fit_obs = observe(spec, model, grid, *fit);
  return opt_eb_price(spec, model_rate(model), obs, options, &fit_obs);
}

}  // namespace fdlsm
