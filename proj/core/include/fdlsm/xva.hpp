#pragma once

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "fdlsm/ansatz.hpp"
#include "fdlsm/pricer.hpp"
#include "fdlsm/regression.hpp"

namespace fdlsm {

/// Counterparty hazard h(F) = ln(1 + e^{a + b F}) with flat a.
struct WwrParams {
  double a = -4.0;
  double b = 0.1;
  double recovery = 0.0;

  double hazard(double exposure) const;
  void validate() const;
};

/// Mark-to-market regressions F_k of e^{-r(T - t_k)} Z(T), one per bucket.
struct ExposureProxies {
  BasisSet basis;
  EuropeanSpec option;
  /// fits[k-1] for buckets k = 1..M.
  std::vector<RegressionFit> fits;
  std::shared_ptr<const AnsatzSet> ansatz;
  double seconds = 0.0;
};

/// Proxy values on a set of paths: values[(k-1) * n + p].
struct ExposureMatrix {
  std::size_t n_paths = 0;
  std::size_t buckets = 0;
  std::vector<double> times;  ///< t_0..t_M
  std::vector<double> values;

  double at(std::size_t k, std::size_t p) const { return values[(k - 1) * n_paths + p]; }
};

struct EpeProfile {
  Scheme scheme = Scheme::LSM;
  int cutoff = 0;
  std::vector<double> times;     ///< t_1..t_M
  std::vector<double> epe;
  std::vector<double> epe_star;  ///< e^{-r t_k} EPE(t_k)
  std::vector<double> se;        ///< standard error of EPE*
};

struct CvaResult {
  Scheme scheme = Scheme::LSM;
  int cutoff = 0;
  double cva = 0.0;
  double se = 0.0;
};

ExposureProxies fit_exposure_proxies(const EuropeanSpec& option, double rate, const ObservedPaths& regression,
                                     const BasisSet& basis, std::shared_ptr<const AnsatzSet> ansatz = nullptr);

ExposureProxies fit_exposure_proxies(const MarketModel& model, const TimeGrid& grid, const EuropeanSpec& option,
                                     const BasisSet& basis, const PathSet& regression,
                                     std::shared_ptr<const AnsatzSet> ansatz = nullptr);

/// `obs` must carry ansatz values when the proxies are FD-LSM.
ExposureMatrix evaluate_proxies(const ExposureProxies& proxies, const ObservedPaths& obs);

EpeProfile epe_profile(const ExposureProxies& proxies, const ExposureMatrix& exposures, double rate);
CvaResult cva(const ExposureProxies& proxies, const ExposureMatrix& exposures, double rate, const WwrParams& wwr);

EpeProfile epe_profile(const ExposureProxies& proxies, const MarketModel& model, const TimeGrid& grid,
                       const PathSet& pricing);
CvaResult cva(const ExposureProxies& proxies, const MarketModel& model, const TimeGrid& grid,
              const PathSet& pricing, const WwrParams& wwr);

void write_epe_csv(std::span<const EpeProfile> profiles, std::ostream& out);

}  // namespace fdlsm
