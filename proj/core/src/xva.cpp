#include "fdlsm/xva.hpp"

#include <chrono>
#include <cmath>
#include <ostream>

#include "fdlsm/errors.hpp"
#include "fdlsm/parallel.hpp"

namespace fdlsm {

namespace {

constexpr std::size_t kChunk = 4096;

ObservedPaths observe_with_ansatz(const ExposureProxies& proxies, const MarketModel& model, const TimeGrid& grid,
                                  const PathSet& paths) {
  ObservedPaths obs = observe(proxies.option, model, grid, paths);
  if (proxies.basis.scheme == Scheme::FDLSM) {
    if (!proxies.ansatz) throw ConfigError("xva: FD-LSM proxies carry no ansatz");
    attach_ansatz(obs, *proxies.ansatz);
  }
  return obs;
}

}  // namespace

double WwrParams::hazard(double exposure) const {
  const double z = a + b * exposure;
  // ln(1 + e^z) without overflow.
  return z > 30.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

void WwrParams::validate() const {
  if (!std::isfinite(a) || !std::isfinite(b)) throw ConfigError("wwr: a and b must be finite");
  if (!(recovery >= 0.0 && recovery < 1.0)) throw ConfigError("wwr: recovery must lie in [0, 1)");
}

ExposureProxies fit_exposure_proxies(const EuropeanSpec& option, double rate, const ObservedPaths& obs,
                                     const BasisSet& basis, std::shared_ptr<const AnsatzSet> ansatz) {
  basis.validate();
  if (basis.scheme == Scheme::FDLSM && obs.ansatz.empty()) throw ConfigError("xva: FD-LSM requires an ansatz");
  const auto t0 = std::chrono::steady_clock::now();
  ExposureProxies out;
  out.basis = basis;
  out.option = option;
  out.ansatz = std::move(ansatz);

  const std::size_t n = obs.n_paths, m = obs.dates;
  const Product prod = option;
  std::vector<double> payoff(n);
  const auto xm = obs.x_at(m);
  for (std::size_t p = 0; p < n; ++p) payoff[p] = exercise_payoff(prod, xm[p], true);

  out.fits.resize(m);
  parallel_chunks(m, 1, [&](std::size_t, std::size_t b, std::size_t) {
    const std::size_t k = b + 1;
    const double df = std::exp(-rate * (obs.times[m] - obs.times[k]));
    std::vector<double> y(n);
    for (std::size_t p = 0; p < n; ++p) y[p] = df * payoff[p];
    RegressionData data{obs.x_at(k), basis.descriptor == StateDescriptor::HestonPair ? obs.nu_at(k) : std::span<const double>{},
                        basis.scheme == Scheme::FDLSM ? obs.ansatz_at(k) : std::span<const double>{}};
    out.fits[k - 1] = fit(basis, data, y, k);
  });
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

ExposureProxies fit_exposure_proxies(const MarketModel& model, const TimeGrid& grid, const EuropeanSpec& option,
                                     const BasisSet& basis, const PathSet& regression,
                                     std::shared_ptr<const AnsatzSet> ansatz) {
  ExposureProxies tmp;
  tmp.basis = basis;
  tmp.option = option;
  tmp.ansatz = ansatz;
  const ObservedPaths obs = observe_with_ansatz(tmp, model, grid, regression);
  return fit_exposure_proxies(option, model_rate(model), obs, basis, std::move(ansatz));
}

ExposureMatrix evaluate_proxies(const ExposureProxies& proxies, const ObservedPaths& obs) {
  if (proxies.fits.size() != obs.dates) throw ConfigError("xva: proxies do not cover every bucket");
  if (proxies.basis.scheme == Scheme::FDLSM && obs.ansatz.empty())
    throw ConfigError("xva: FD-LSM proxies need ansatz values on the pricing paths");
  ExposureMatrix e;
  e.n_paths = obs.n_paths;
  e.buckets = obs.dates;
  e.times = obs.times;
  e.values.resize(e.n_paths * e.buckets);
  const std::size_t n = obs.n_paths;
  parallel_chunks(n, kChunk, [&](std::size_t, std::size_t b, std::size_t end) {
    for (std::size_t k = 1; k <= e.buckets; ++k)
      for (std::size_t p = b; p < end; ++p) {
        const std::size_t i = k * n + p;
        e.values[(k - 1) * n + p] =
            predict(proxies.fits[k - 1], proxies.basis, obs.x[i], obs.nu.empty() ? 0.0 : obs.nu[i],
                    obs.ansatz.empty() ? 0.0 : obs.ansatz[i]);
      }
  });
  return e;
}

EpeProfile epe_profile(const ExposureProxies& proxies, const ExposureMatrix& ex, double rate) {
  EpeProfile prof;
  prof.scheme = proxies.basis.scheme;
  prof.cutoff = proxies.basis.cutoff;
  const std::size_t n = ex.n_paths;
  const double nn = static_cast<double>(n);
  for (std::size_t k = 1; k <= ex.buckets; ++k) {
    double s = 0.0, ss = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      const double v = std::max(0.0, ex.at(k, p));
      s += v;
      ss += v * v;
    }
    const double mean = s / nn;
    const double var = std::max(0.0, (ss - nn * mean * mean) / (nn - 1.0));
    const double df = std::exp(-rate * ex.times[k]);
    prof.times.push_back(ex.times[k]);
    prof.epe.push_back(mean);
    prof.epe_star.push_back(df * mean);
    prof.se.push_back(df * std::sqrt(var / nn));
  }
  return prof;
}

CvaResult cva(const ExposureProxies& proxies, const ExposureMatrix& ex, double rate, const WwrParams& wwr) {
  wwr.validate();
  const std::size_t n = ex.n_paths, m = ex.buckets;
  std::vector<double> disc(m + 1), dt(m + 1, 0.0);
  for (std::size_t k = 1; k <= m; ++k) {
    disc[k] = std::exp(-rate * ex.times[k]);
    dt[k] = ex.times[k] - ex.times[k - 1];
  }
  std::vector<std::pair<double, double>> parts(chunk_count(n, kChunk));
  parallel_chunks(n, kChunk, [&](std::size_t chunk, std::size_t b, std::size_t e) {
    double s = 0.0, ss = 0.0;
    for (std::size_t p = b; p < e; ++p) {
      double phi = 0.0, cum = 0.0;
      for (std::size_t k = 1; k <= m; ++k) {
        const double f = ex.at(k, p);
        const double h = wwr.hazard(f);
        cum += h * dt[k];
        phi += disc[k] * std::max(0.0, f) * h * dt[k] * std::exp(-cum);
      }
      phi *= 1.0 - wwr.recovery;
      s += phi;
      ss += phi * phi;
    }
    parts[chunk] = {s, ss};
  });
  double s = 0.0, ss = 0.0;
  for (const auto& [a, b] : parts) {
    s += a;
    ss += b;
  }
  const double nn = static_cast<double>(n);
  CvaResult r;
  r.scheme = proxies.basis.scheme;
  r.cutoff = proxies.basis.cutoff;
  r.cva = s / nn;
  r.se = std::sqrt(std::max(0.0, (ss - nn * r.cva * r.cva) / (nn - 1.0)) / nn);
  return r;
}

EpeProfile epe_profile(const ExposureProxies& proxies, const MarketModel& model, const TimeGrid& grid,
                       const PathSet& pricing) {
  const ObservedPaths obs = observe_with_ansatz(proxies, model, grid, pricing);
  return epe_profile(proxies, evaluate_proxies(proxies, obs), model_rate(model));
}

CvaResult cva(const ExposureProxies& proxies, const MarketModel& model, const TimeGrid& grid,
              const PathSet& pricing, const WwrParams& wwr) {
  const ObservedPaths obs = observe_with_ansatz(proxies, model, grid, pricing);
  return cva(proxies, evaluate_proxies(proxies, obs), model_rate(model), wwr);
}

void write_epe_csv(std::span<const EpeProfile> profiles, std::ostream& out) {
  out << "scheme,R,t,epe,epe_star,se\n";
  out.precision(10);
  for (const auto& p : profiles)
    for (std::size_t k = 0; k < p.times.size(); ++k)
      out << scheme_name(p.scheme) << ',' << p.cutoff << ',' << p.times[k] << ',' << p.epe[k] << ','
          << p.epe_star[k] << ',' << p.se[k] << '\n';
}

}  // namespace fdlsm
