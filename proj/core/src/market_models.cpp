#include "fdlsm/market_models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include <boost/random/sobol.hpp>

#include "fdlsm/analytics.hpp"
#include "fdlsm/errors.hpp"
#include "fdlsm/parallel.hpp"

namespace fdlsm {

namespace {

using SobolEngine = boost::random::sobol_engine<std::uint32_t, 32>;

constexpr double kTwoPowMinus32 = 1.0 / 4294967296.0;

bool finite(double v) { return std::isfinite(v); }

void check_correlation(std::size_t d, double rho, const char* what) {
  if (!finite(rho) || rho > 1.0 || rho < -1.0)
    throw ConfigError(std::string(what) + ": correlation must lie in [-1, 1]");
  if (d > 1 && rho < -1.0 / static_cast<double>(d - 1) - 1e-12)
    throw ConfigError(std::string(what) + ": correlation below -1/(d-1) is not positive semidefinite");
}

}  // namespace

double SkewedLocalVol::operator()(double spot, double t) const {
  const double l = std::log(spot / spot0);
  return base_vol * std::exp(-0.05 * std::sqrt(t)) *
         (1.5 - std::exp(-0.1 * t - 5.0 * std::exp(-0.05 * t) * l * l));
}

void BlackScholesModel::validate() const {
  if (vols.empty()) throw ConfigError("black_scholes: at least one asset is required");
  if (dividends.size() != vols.size())
    throw ConfigError("black_scholes: dividends and vols must have the same length");
  if (!finite(rate)) throw ConfigError("black_scholes: rate must be finite");
  for (double q : dividends)
    if (!finite(q)) throw ConfigError("black_scholes: dividends must be finite");
  for (double s : vols)
    if (!finite(s) || s <= 0.0) throw ConfigError("black_scholes: vols must be positive");
  check_correlation(vols.size(), correlation, "black_scholes");
}

void LocalVolModel::validate() const {
  if (vols.empty()) throw ConfigError("local_vol: at least one asset is required");
  if (dividends.size() != vols.size())
    throw ConfigError("local_vol: dividends and vols must have the same length");
  if (!finite(rate)) throw ConfigError("local_vol: rate must be finite");
  for (double q : dividends)
    if (!finite(q)) throw ConfigError("local_vol: dividends must be finite");
  for (const auto& f : vols)
    if (!f) throw ConfigError("local_vol: empty volatility function");
  check_correlation(vols.size(), correlation, "local_vol");
}

void HestonModel::validate() const {
  if (!finite(rate) || !finite(dividend)) throw ConfigError("heston: rate and dividend must be finite");
  if (!finite(v0) || v0 < 0.0) throw ConfigError("heston: v0 must be non-negative");
  if (!finite(kappa) || kappa <= 0.0) throw ConfigError("heston: kappa must be positive");
  if (!finite(theta) || theta <= 0.0) throw ConfigError("heston: theta must be positive");
  if (!finite(xi) || xi < 0.0) throw ConfigError("heston: xi must be non-negative");
  if (!finite(rho) || rho < -1.0 || rho > 1.0) throw ConfigError("heston: rho must lie in [-1, 1]");
}

double model_rate(const MarketModel& model) {
  return std::visit([](const auto& m) { return m.rate; }, model);
}

std::size_t model_asset_count(const MarketModel& model) {
  if (std::holds_alternative<HestonModel>(model)) return 1;
  if (const auto* bs = std::get_if<BlackScholesModel>(&model)) return bs->dimension();
  return std::get<LocalVolModel>(model).dimension();
}

std::size_t model_state_dimension(const MarketModel& model) {
  return std::holds_alternative<HestonModel>(model) ? 2 : model_asset_count(model);
}

std::size_t model_factor_count(const MarketModel& model) { return model_state_dimension(model); }

void validate_model(const MarketModel& model) {
  std::visit([](const auto& m) { m.validate(); }, model);
}

TimeGrid TimeGrid::make(double maturity, double exercise_interval, double sim_step) {
  if (!finite(maturity) || maturity <= 0.0) throw ConfigError("time grid: maturity must be positive");
  if (!finite(exercise_interval) || exercise_interval <= 0.0 || exercise_interval > maturity + 1e-12)
    throw ConfigError("time grid: exercise interval must lie in (0, T]");
  if (!finite(sim_step) || sim_step <= 0.0) throw ConfigError("time grid: simulation step must be positive");
  const double ratio = maturity / exercise_interval;
  const auto m = static_cast<std::size_t>(std::llround(ratio));
  if (m == 0 || std::abs(ratio - static_cast<double>(m)) > 1e-9 * std::max(1.0, ratio))
    throw ConfigError("time grid: maturity must be an integer multiple of the exercise interval");

  constexpr double tol = 1e-9;
  std::vector<double> ex(m + 1);
  for (std::size_t k = 0; k <= m; ++k) ex[k] = static_cast<double>(k) * maturity / static_cast<double>(m);

  std::vector<double> all = ex;
  const auto n_sim = static_cast<std::size_t>(std::ceil(maturity / sim_step - tol));
  for (std::size_t j = 1; j < n_sim; ++j) all.push_back(static_cast<double>(j) * sim_step);
  std::sort(all.begin(), all.end());

  TimeGrid grid;
  grid.maturity_ = maturity;
  grid.exercise_interval_ = maturity / static_cast<double>(m);
  std::size_t next_ex = 0;
  for (double t : all) {
    if (t > maturity + tol) continue;
    // Exercise dates win over nearby simulation nodes.
    const bool is_ex = next_ex <= m && std::abs(t - ex[next_ex]) <= tol;
    if (!grid.nodes_.empty() && t - grid.nodes_.back() <= tol) {
      if (is_ex) {
        grid.nodes_.back() = ex[next_ex];
        if (grid.exercise_nodes_.empty() || grid.exercise_nodes_.back() != grid.nodes_.size() - 1)
          grid.exercise_nodes_.push_back(grid.nodes_.size() - 1);
        ++next_ex;
      }
      continue;
    }
    grid.nodes_.push_back(is_ex ? ex[next_ex] : t);
    if (is_ex) {
      grid.exercise_nodes_.push_back(grid.nodes_.size() - 1);
      ++next_ex;
    }
  }
  if (grid.exercise_nodes_.size() != m + 1) throw NumericalError("time grid: failed to place exercise dates");
  return grid;
}

std::vector<double> TimeGrid::exercise_times() const {
  std::vector<double> out(exercise_nodes_.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = nodes_[exercise_nodes_[k]];
  return out;
}

PathSet::PathSet(Stage stage, std::size_t n_paths, std::size_t state_dim, std::vector<double> times,
                 std::vector<std::size_t> nodes, std::uint64_t first_point)
    : stage_(stage),
      n_paths_(n_paths),
      dim_(state_dim),
      times_(std::move(times)),
      nodes_(std::move(nodes)),
      first_point_(first_point),
      data_(times_.size() * n_paths * state_dim, 0.0) {}

std::size_t PathSet::record_of_node(std::size_t node) const {
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), node);
  if (it == nodes_.end() || *it != node) throw ConfigError("path set: requested node was not recorded");
  return static_cast<std::size_t>(it - nodes_.begin());
}

std::size_t max_sobol_dimension() {
  return boost::random::default_sobol_table::max_dimension;
}

std::vector<double> equicorrelation_cholesky(std::size_t d, double rho) {
  check_correlation(d, rho, "cholesky");
  std::vector<double> l(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = (i == j) ? 1.0 : rho;
      for (std::size_t k = 0; k < j; ++k) s -= l[i * d + k] * l[j * d + k];
      if (i == j) {
        l[i * d + i] = s > 1e-14 ? std::sqrt(s) : 0.0;
      } else {
        const double ljj = l[j * d + j];
        l[i * d + j] = ljj > 0.0 ? s / ljj : 0.0;
      }
    }
  }
  return l;
}

namespace {

struct Stepper {
  virtual ~Stepper() = default;
  // Advances state over [t, t + dt] using z (factor_count normals).
  virtual void step(double* state, double t, double dt, const double* z) const = 0;
};

struct BlackScholesStepper final : Stepper {
  std::size_t d;
  double rate;
  std::vector<double> q, sigma, chol;
  mutable std::vector<double> w;
  explicit BlackScholesStepper(const BlackScholesModel& m)
      : d(m.dimension()), rate(m.rate), q(m.dividends), sigma(m.vols),
        chol(equicorrelation_cholesky(m.dimension(), m.correlation)) {}
  void step(double* s, double, double dt, const double* z) const override {
    const double sq = std::sqrt(dt);
    for (std::size_t i = 0; i < d; ++i) {
      double c = 0.0;
      for (std::size_t j = 0; j <= i; ++j) c += chol[i * d + j] * z[j];
      s[i] *= std::exp((rate - q[i] - 0.5 * sigma[i] * sigma[i]) * dt + sigma[i] * sq * c);
    }
  }
};

struct LocalVolStepper final : Stepper {
  std::size_t d;
  double rate;
  std::vector<double> q, chol;
  const std::vector<LocalVolFunction>* vols;
  explicit LocalVolStepper(const LocalVolModel& m)
      : d(m.dimension()), rate(m.rate), q(m.dividends),
        chol(equicorrelation_cholesky(m.dimension(), m.correlation)), vols(&m.vols) {}
  void step(double* s, double t, double dt, const double* z) const override {
    const double sq = std::sqrt(dt);
    for (std::size_t i = 0; i < d; ++i) {
      double c = 0.0;
      for (std::size_t j = 0; j <= i; ++j) c += chol[i * d + j] * z[j];
      const double v = (*vols)[i](s[i], t);
      s[i] *= std::exp((rate - q[i] - 0.5 * v * v) * dt + v * sq * c);
    }
  }
};

// Full-truncation Euler: nu+ = max(nu, 0) in drift and diffusion, log-Euler
// for the spot.
struct HestonStepper final : Stepper {
  HestonModel m;
  double rho_perp;
  explicit HestonStepper(const HestonModel& model)
      : m(model), rho_perp(std::sqrt(std::max(0.0, 1.0 - model.rho * model.rho))) {}
  void step(double* s, double, double dt, const double* z) const override {
    const double vp = std::max(s[1], 0.0);
    const double sv = std::sqrt(vp * dt);
    s[0] *= std::exp((m.rate - m.dividend - 0.5 * vp) * dt + sv * z[0]);
    s[1] = s[1] + m.kappa * (m.theta - vp) * dt + m.xi * sv * (m.rho * z[0] + rho_perp * z[1]);
  }
};

// Brownian bridge over the step end times; transform() maps standard normals
// (in bridge order) to standard normal per-step increments.
class BrownianBridge {
 public:
  explicit BrownianBridge(const std::vector<double>& t)
      : n_(t.size()), t_(t), left_(n_), right_(n_), bridge_(n_), lw_(n_), rw_(n_), sd_(n_), w_(n_) {
    std::vector<std::size_t> map(n_, 0);
    map[n_ - 1] = 1;
    bridge_[0] = n_ - 1;
    sd_[0] = std::sqrt(t_[n_ - 1]);
    for (std::size_t j = 0, i = 1; i < n_; ++i) {
      while (map[j]) ++j;
      std::size_t k = j;
      while (!map[k]) ++k;
      const std::size_t l = j + ((k - 1 - j) >> 1);
      map[l] = i;
      bridge_[i] = l;
      left_[i] = j;
      right_[i] = k;
      const double tl = j ? t_[j - 1] : 0.0;
      lw_[i] = (t_[k] - t_[l]) / (t_[k] - tl);
      rw_[i] = (t_[l] - tl) / (t_[k] - tl);
      sd_[i] = std::sqrt((t_[l] - tl) * (t_[k] - t_[l]) / (t_[k] - tl));
      j = k + 1;
      if (j >= n_) j = 0;
    }
    for (std::size_t i = 0; i < n_; ++i) inv_sqrt_dt_.push_back(1.0 / std::sqrt(t_[i] - (i ? t_[i - 1] : 0.0)));
  }

  // in[i] drives bridge point i; out[j] is the normalised increment of step j.
  void transform(const double* in, double* out) const {
    w_[n_ - 1] = sd_[0] * in[0];
    for (std::size_t i = 1; i < n_; ++i) {
      const std::size_t j = left_[i], k = right_[i], l = bridge_[i];
      w_[l] = (j ? lw_[i] * w_[j - 1] : 0.0) + rw_[i] * w_[k] + sd_[i] * in[i];
    }
    for (std::size_t i = 0; i < n_; ++i) out[i] = (w_[i] - (i ? w_[i - 1] : 0.0)) * inv_sqrt_dt_[i];
  }

 private:
  std::size_t n_;
  std::vector<double> t_;
  std::vector<std::size_t> left_, right_, bridge_;
  std::vector<double> lw_, rw_, sd_, inv_sqrt_dt_;
  mutable std::vector<double> w_;
};

}  // namespace

PathSet generate_paths(const MarketModel& model, const TimeGrid& grid, std::size_t n_paths, Stage stage,
                       const StreamLayout& layout, Recording recording, PathConstruction construction) {
  validate_model(model);
  if (n_paths == 0 || (n_paths & (n_paths - 1)) != 0)
    throw ConfigError("path generation: path count must be a power of two");
  if (stage == Stage::Regression && layout.pricing_paths == 0)
    throw ConfigError("path generation: regression stage needs the pricing path count for its stream offset");

  const std::size_t factors = model_factor_count(model);
  const std::size_t state_dim = model_state_dimension(model);
  const std::size_t steps = grid.step_count();
  const std::size_t sobol_dim = steps * factors;
  if (sobol_dim > max_sobol_dimension()) {
    std::ostringstream os;
    os << "path generation: " << steps << " steps x " << factors << " factors = " << sobol_dim
       << " Sobol dimensions exceeds the supported maximum of " << max_sobol_dimension();
    throw ConfigError(os.str());
  }

  std::vector<std::size_t> rec_nodes;
  if (recording == Recording::AllNodes) {
    rec_nodes.resize(grid.nodes().size());
    for (std::size_t j = 0; j < rec_nodes.size(); ++j) rec_nodes[j] = j;
  } else {
    for (std::size_t k = 0; k <= grid.exercise_count(); ++k) rec_nodes.push_back(grid.exercise_node(k));
  }
  std::vector<double> rec_times(rec_nodes.size());
  for (std::size_t r = 0; r < rec_nodes.size(); ++r) rec_times[r] = grid.nodes()[rec_nodes[r]];

  // Point 0 of the sequence is the origin; the stream starts at point 1.
  const std::uint64_t first =
      1 + layout.offset + (stage == Stage::Regression ? static_cast<std::uint64_t>(layout.pricing_paths) : 0);
  if (first + n_paths >= (std::uint64_t{1} << 32))
    throw ConfigError("path generation: stream range exceeds the generator period");

  PathSet out(stage, n_paths, state_dim, rec_times, rec_nodes, first);

  std::vector<double> initial(state_dim, 1.0);
  if (const auto* h = std::get_if<HestonModel>(&model)) initial[1] = h->v0;

  const SobolEngine prototype(static_cast<std::size_t>(sobol_dim));
  const auto nodes = grid.nodes();
  const std::vector<double> step_ends(nodes.begin() + 1, nodes.end());

  constexpr std::size_t chunk = 512;
  parallel_chunks(n_paths, chunk, [&](std::size_t, std::size_t begin, std::size_t end) {
    std::unique_ptr<Stepper> stepper;
    if (const auto* bs = std::get_if<BlackScholesModel>(&model)) stepper = std::make_unique<BlackScholesStepper>(*bs);
    else if (const auto* lv = std::get_if<LocalVolModel>(&model)) stepper = std::make_unique<LocalVolStepper>(*lv);
    else stepper = std::make_unique<HestonStepper>(std::get<HestonModel>(model));

    SobolEngine engine(prototype);
    engine.seed(static_cast<std::uint32_t>(first + begin));
    std::optional<BrownianBridge> bridge;
    if (construction == PathConstruction::BrownianBridge) bridge.emplace(step_ends);
    std::vector<double> z(factors), s(state_dim), raw(sobol_dim), normals(sobol_dim), tmp_in(steps), tmp_out(steps);
    for (std::size_t p = begin; p < end; ++p) {
      for (std::size_t i = 0; i < sobol_dim; ++i) {
        const std::uint32_t x = engine();
        const double u = x == 0 ? 0.5 * kTwoPowMinus32 : static_cast<double>(x) * kTwoPowMinus32;
        raw[i] = norm_inv(u);
      }
      // normals[j * factors + c]: step j, factor c.
      if (bridge) {
        for (std::size_t c = 0; c < factors; ++c) {
          for (std::size_t j = 0; j < steps; ++j) tmp_in[j] = raw[j * factors + c];
          bridge->transform(tmp_in.data(), tmp_out.data());
          for (std::size_t j = 0; j < steps; ++j) normals[j * factors + c] = tmp_out[j];
        }
      } else {
        normals = raw;
      }
      s = initial;
      std::size_t rec = 0;
      if (rec_nodes[0] == 0) {
        std::copy(s.begin(), s.end(), out.state(0, p).begin());
        rec = 1;
      }
      for (std::size_t j = 0; j < steps; ++j) {
        for (std::size_t c = 0; c < factors; ++c) z[c] = normals[j * factors + c];
        stepper->step(s.data(), nodes[j], nodes[j + 1] - nodes[j], z.data());
        if (rec < rec_nodes.size() && rec_nodes[rec] == j + 1) {
          auto dst = out.state(rec, p);
          std::copy(s.begin(), s.end(), dst.begin());
          if (state_dim == 2 && std::holds_alternative<HestonModel>(model)) dst[1] = std::max(dst[1], 0.0);
          ++rec;
        }
      }
    }
  });
  return out;
}

void write_paths_csv(const PathSet& paths, std::ostream& out, std::size_t max_paths) {
  const std::size_t n = max_paths == 0 ? paths.path_count() : std::min(max_paths, paths.path_count());
  out << "path,t";
  for (std::size_t c = 0; c < paths.state_dimension(); ++c) out << ",x" << (c + 1);
  out << '\n';
  out.precision(12);
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t r = 0; r < paths.record_count(); ++r) {
      out << p << ',' << paths.record_times()[r];
      for (double v : paths.state(r, p)) out << ',' << v;
      out << '\n';
    }
}

}  // namespace fdlsm
