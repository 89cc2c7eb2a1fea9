#include "runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <ostream>

#include "fdlsm/errors.hpp"

namespace fdlsm::experiment {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

std::string num(double v) { return fmt("%.10f", v); }

/// Path sets for one (model, grid) pair, reused across consecutive cases.
struct PathCache {
  std::string key;
  PathSet regression;
  PathSet pricing;

  double fetch(const std::string& k, const MarketModel& model, const TimeGrid& grid, const Numerics& n) {
    if (k == key) return 0.0;
    const auto t0 = Clock::now();
    StreamLayout layout{n.stream_offset, n.n_pricing};
    pricing = generate_paths(model, grid, n.n_pricing, Stage::Pricing, layout, Recording::ExerciseDates,
                             n.construction);
    regression = generate_paths(model, grid, n.n_regression, Stage::Regression, layout,
                                Recording::ExerciseDates, n.construction);
    key = k;
    return seconds_since(t0);
  }
};

std::string path_key(const CaseConfig& c) {
  return c.model.dump() + "|" + c.product.at("maturity").dump() + "|" + c.product.at("exercise_frequency").dump();
}

BasisSet basis_for(const MethodConfig& m, const MarketModel& model) {
  return BasisSet{m.scheme == "LSM" ? Scheme::LSM : Scheme::FDLSM, m.cutoff,
                  std::holds_alternative<HestonModel>(model) ? StateDescriptor::HestonPair
                                                             : StateDescriptor::Single};
}

bool needs_ansatz(const Numerics& n) {
  for (const auto& m : n.methods)
    if (m.scheme == "FD-LSM") return true;
  return false;
}

void log_price_row(std::ostream* log, const PriceRow& row) {
  if (!log) return;
  const auto& r = row.result;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-10s %-7s R=%-2d%s pv=%9.4f%% se=%.4f%% e_tau=%.3f ct=%.2fs", row.case_label.c_str(),
                r.method.c_str(), r.cutoff, r.control_variate ? " cv" : "   ", 100.0 * r.pv, 100.0 * r.se,
                r.expected_life, row.ct_seconds);
  *log << buf;
  if (row.diff_vs_benchmark) *log << fmt(" diff=%+.4f%%", 100.0 * *row.diff_vs_benchmark);
  if (r.method == "Opt-EB" && !r.converged) *log << " (partial convergence)";
  *log << '\n';
}

template <class Writer>
void write_file(const RunOptions& options, const std::string& name, Writer&& writer) {
  if (options.out_dir.empty()) return;
  std::filesystem::create_directories(options.out_dir);
  const auto path = std::filesystem::path(options.out_dir) / name;
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  writer(out);
  if (!out) throw ConfigError("failed writing '" + path.string() + "'");
}

}  // namespace

PricingRun run_pricing(const ExperimentConfig& config, const RunOptions& options) {
  if (config.kind != Kind::Bermudan && config.kind != Kind::Wic && config.kind != Kind::OptEb)
    throw ConfigError(std::string("experiment '") + kind_name(config.kind) + "' is not a pricing experiment");
  const Numerics& n = config.numerics;
  PricingRun run;
  PathCache cache;
  for (const auto& c : config.cases) {
    const MarketModel model = parse_model(c.model);
    const Product product = parse_product(c.product);
    const TimeGrid grid = make_grid(c.product, n);
    const double rate = model_rate(model);
    run.simulation_seconds += cache.fetch(path_key(c), model, grid, n);

    auto t0 = Clock::now();
    ObservedPaths obs_r = observe(product, model, grid, cache.regression);
    ObservedPaths obs_p = observe(product, model, grid, cache.pricing);
    double observe_seconds = seconds_since(t0);

    std::shared_ptr<const AnsatzSet> ansatz;
    double pde_seconds = 0.0;
    if (needs_ansatz(n) || c.benchmark == BenchmarkKind::Pde1d) {
      t0 = Clock::now();
      ansatz = std::make_shared<const AnsatzSet>(build_ansatz(model, product, grid, n.pde));
      pde_seconds = seconds_since(t0);
      if (needs_ansatz(n)) {
        attach_ansatz(obs_r, *ansatz);
        attach_ansatz(obs_p, *ansatz);
      }
    }

    std::vector<PriceRow> rows;
    if (c.benchmark == BenchmarkKind::Pde1d) {
      PriceRow row;
      row.case_label = c.label;
      row.result.method = "PDE1D";
      row.result.pv = row.result.pv_raw = ansatz->solutions().front().value_at(1.0);
      row.result.pde_seconds = pde_seconds;
      row.ct_seconds = pde_seconds;
      rows.push_back(row);
    }
    for (const auto& m : n.methods) {
      PriceRow row;
      row.case_label = c.label;
      if (m.scheme == "Opt-EB") {
        row.result = opt_eb_price(std::get<BermudanSpec>(product), rate, obs_p, n.opteb, &obs_r);
        row.ct_seconds = row.result.pricing_seconds + observe_seconds;
      } else {
        const BasisSet basis = basis_for(m, model);
        const bool fd = basis.scheme == Scheme::FDLSM;
        const ExercisePolicy policy = regress_policy(product, rate, obs_r, basis, fd ? ansatz : nullptr);
        std::optional<ControlVariate> cv;
        if (m.control_variate) cv = make_control_variate(product, model, grid);
        row.result = price(product, rate, obs_p, policy, cv);
        row.result.n_regression = n.n_regression;
        if (fd) row.result.pde_seconds = pde_seconds;
        row.ct_seconds = row.result.pde_seconds + row.result.regression_seconds + row.result.pricing_seconds +
                         observe_seconds;
      }
      rows.push_back(std::move(row));
    }

    std::optional<double> bench;
    switch (c.benchmark) {
      case BenchmarkKind::None: break;
      case BenchmarkKind::Value: bench = c.benchmark_value; break;
      case BenchmarkKind::Pde1d: bench = rows.front().result.pv; break;
      case BenchmarkKind::OptEb:
        for (const auto& r : rows)
          if (r.result.method == "Opt-EB") bench = r.result.pv;
        break;
      case BenchmarkKind::FirstMethod:
        for (const auto& r : rows)
          if (r.result.method != "PDE1D") {
            bench = r.result.pv;
            break;
          }
        break;
    }
    for (auto& r : rows) {
      if (bench && r.result.method != "PDE1D") r.diff_vs_benchmark = r.result.pv - *bench;
      log_price_row(options.log, r);
      run.rows.push_back(std::move(r));
    }
  }
  write_file(options, config.output, [&](std::ostream& out) { write_pricing_csv(run, out); });
  return run;
}

XvaRun run_xva(const ExperimentConfig& config, const RunOptions& options) {
  if (config.kind != Kind::EpeCva)
    throw ConfigError(std::string("experiment '") + kind_name(config.kind) + "' is not an epe_cva experiment");
  const Numerics& n = config.numerics;
  XvaRun run;
  PathCache cache;
  for (const auto& c : config.cases) {
    const MarketModel model = parse_model(c.model);
    const Product product = parse_product(c.product);
    const EuropeanSpec& option = std::get<EuropeanSpec>(product);
    const TimeGrid grid = make_grid(c.product, n);
    const double rate = model_rate(model);
    run.simulation_seconds += cache.fetch(path_key(c), model, grid, n);

    ObservedPaths obs_r = observe(product, model, grid, cache.regression);
    ObservedPaths obs_p = observe(product, model, grid, cache.pricing);
    std::shared_ptr<const AnsatzSet> ansatz;
    double pde_seconds = 0.0;
    if (needs_ansatz(n)) {
      const auto t0 = Clock::now();
      ansatz = std::make_shared<const AnsatzSet>(build_ansatz(model, product, grid, n.pde));
      pde_seconds = seconds_since(t0);
      attach_ansatz(obs_r, *ansatz);
      attach_ansatz(obs_p, *ansatz);
    }

    {
      const std::size_t m = obs_p.dates, np = obs_p.n_paths;
      const double disc = std::exp(-rate * obs_p.times[m]);
      double s = 0.0, ss = 0.0;
      for (std::size_t p = 0; p < np; ++p) {
        const double v = disc * exercise_payoff(product, obs_p.x[m * np + p], true);
        s += v;
        ss += v * v;
      }
      const double mean = s / static_cast<double>(np);
      const double var = std::max(0.0, ss / static_cast<double>(np) - mean * mean);
      run.v0.emplace_back(mean, std::sqrt(var / static_cast<double>(np)));
      if (options.log)
        *options.log << c.label << " V0=" << fmt("%.4f%%", 100.0 * mean) << " se=" << fmt("%.4f%%", 100.0 * run.v0.back().second)
                     << '\n';
    }

    for (const auto& mc : n.methods) {
      const auto t0 = Clock::now();
      const BasisSet basis = basis_for(mc, model);
      const bool fd = basis.scheme == Scheme::FDLSM;
      const ExposureProxies proxies = fit_exposure_proxies(option, rate, obs_r, basis, fd ? ansatz : nullptr);
      const ExposureMatrix exposures = evaluate_proxies(proxies, obs_p);
      EpeProfile profile = epe_profile(proxies, exposures, rate);
      CvaResult cv = cva(proxies, exposures, rate, config.wwr);
      CvaRow row{c.label, cv, seconds_since(t0) + (fd ? pde_seconds : 0.0)};
      if (options.log) {
        char buf[200];
        double worst = 0.0;
        for (std::size_t k = 0; k < profile.epe_star.size(); ++k)
          if (profile.se[k] > 0.0)
            worst = std::max(worst, std::abs(profile.epe_star[k] - run.v0.back().first) / profile.se[k]);
        std::snprintf(buf, sizeof buf, "%-8s %-7s R=%-2d cva=%.4f%% se=%.4f%% max|EPE*-V0|/se=%.2f ct=%.2fs",
                      c.label.c_str(), scheme_name(cv.scheme), cv.cutoff, 100.0 * cv.cva, 100.0 * cv.se, worst,
                      row.ct_seconds);
        *options.log << buf << '\n';
      }
      run.cva.push_back(row);
      run.epe.push_back({c.label, std::move(profile)});
    }
  }
  write_file(options, config.output, [&](std::ostream& out) { write_cva_csv(run, out); });
  write_file(options, epe_file_name(config.output), [&](std::ostream& out) { write_epe_profile_csv(run, out); });
  return run;
}

ErrorRun run_error_model(const ExperimentConfig& config, const RunOptions& options) {
  if (config.kind != Kind::ErrorRecursion)
    throw ConfigError(std::string("experiment '") + kind_name(config.kind) + "' is not an error_recursion experiment");
  ErrorRecursionParams lsm = config.error_model;
  lsm.rho_tilde.reset();
  ErrorRun run;
  run.lsm = accumulate_errors(lsm);
  run.fdlsm = accumulate_errors(config.error_model);
  const double x = lsm.x, y = lsm.y;
  if ((1.0 - y) * (1.0 - y) / x > 1.0) {
    run.lsm_limit = limiting_error(lsm);
    run.fdlsm_limit = limiting_error(config.error_model);
  }
  if (options.log) {
    *options.log << "eps_0 LSM=" << fmt("%.6f", run.lsm.back()) << " FD-LSM=" << fmt("%.6f", run.fdlsm.back());
    if (run.lsm_limit)
      *options.log << " limit LSM=" << fmt("%.6f", *run.lsm_limit) << " FD-LSM=" << fmt("%.6f", *run.fdlsm_limit);
    else
      *options.log << " (no finite limit)";
    *options.log << '\n';
  }
  write_file(options, config.output, [&](std::ostream& out) { write_error_csv(run, out); });
  return run;
}

void write_pricing_csv(const PricingRun& run, std::ostream& out) {
  out << "case,scheme,R,cv,n_regression,n_pricing,pv,se,e_tau,ct_seconds,diff_vs_benchmark\n";
  for (const auto& row : run.rows) {
    const auto& r = row.result;
    out << row.case_label << ',' << r.method << ',' << r.cutoff << ',' << (r.control_variate ? 1 : 0) << ','
        << r.n_regression << ',' << r.n_pricing << ',' << num(r.pv) << ',' << num(r.se) << ','
        << (r.method == "PDE1D" ? std::string() : num(r.expected_life)) << ',' << fmt("%.4f", row.ct_seconds)
        << ',' << (row.diff_vs_benchmark ? num(*row.diff_vs_benchmark) : std::string()) << '\n';
  }
}

void write_cva_csv(const XvaRun& run, std::ostream& out) {
  out << "case,scheme,R,cva,se,ct_seconds\n";
  for (const auto& row : run.cva)
    out << row.case_label << ',' << scheme_name(row.cva.scheme) << ',' << row.cva.cutoff << ',' << num(row.cva.cva)
        << ',' << num(row.cva.se) << ',' << fmt("%.4f", row.ct_seconds) << '\n';
}

void write_epe_profile_csv(const XvaRun& run, std::ostream& out) {
  out << "case,scheme,R,t,epe,epe_star,se\n";
  for (const auto& row : run.epe) {
    const auto& p = row.profile;
    for (std::size_t k = 0; k < p.times.size(); ++k)
      out << row.case_label << ',' << scheme_name(p.scheme) << ',' << p.cutoff << ',' << num(p.times[k]) << ','
          << num(p.epe[k]) << ',' << num(p.epe_star[k]) << ',' << num(p.se[k]) << '\n';
  }
}

void write_error_csv(const ErrorRun& run, std::ostream& out) {
  out << "steps_back,eps_lsm,eps_fdlsm\n";
  for (std::size_t j = 0; j < run.lsm.size(); ++j)
    out << j << ',' << fmt("%.12f", run.lsm[j]) << ',' << fmt("%.12f", run.fdlsm[j]) << '\n';
}

std::string epe_file_name(const std::string& output) {
  const auto dot = output.rfind('.');
  const std::string stem = dot == std::string::npos ? output : output.substr(0, dot);
  return stem + "_epe.csv";
}

}  // namespace fdlsm::experiment
