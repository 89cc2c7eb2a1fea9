#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace fdlsm {

/// Correlated multi-asset Black-Scholes with constant coefficients and a
/// single pairwise correlation.
struct BlackScholesModel {
  double rate = 0.0;
  std::vector<double> dividends;
  std::vector<double> vols;
  double correlation = 0.0;

  std::size_t dimension() const { return vols.size(); }
  void validate() const;
};

/// sigma(S, t) for a single asset.
using LocalVolFunction = std::function<double(double spot, double t)>;

/// Parametric skewed local volatility anchored at a flat level:
/// sigma(S,t) = base * e^{-0.05 sqrt t} * (1.5 - exp(-0.1 t - 5 e^{-0.05 t} ln^2(S/S0))).
struct SkewedLocalVol {
  double base_vol = 0.2;
  double spot0 = 1.0;
  double operator()(double spot, double t) const;
};

/// Correlated multi-asset local-volatility diffusion.
struct LocalVolModel {
  double rate = 0.0;
  std::vector<double> dividends;
  std::vector<LocalVolFunction> vols;
  double correlation = 0.0;

  std::size_t dimension() const { return vols.size(); }
  void validate() const;
};

/// Single-asset Heston stochastic volatility.
struct HestonModel {
  double rate = 0.0;
  double dividend = 0.0;
  double v0 = 0.04;
  double kappa = 1.0;
  double theta = 0.04;
  double xi = 0.5;
  double rho = 0.0;

  void validate() const;
};

using MarketModel = std::variant<BlackScholesModel, LocalVolModel, HestonModel>;

double model_rate(const MarketModel& model);
std::size_t model_asset_count(const MarketModel& model);
/// Dimension of the simulated state: d for BS/LV, 2 for Heston (S, nu).
std::size_t model_state_dimension(const MarketModel& model);
/// Gaussian draws consumed per time step.
std::size_t model_factor_count(const MarketModel& model);
void validate_model(const MarketModel& model);

/// Union of a uniform exercise/monitoring schedule t_k = k dT (k = 1..M) and
/// a uniform simulation step grid.
class TimeGrid {
 public:
  static TimeGrid make(double maturity, double exercise_interval, double sim_step);

  double maturity() const { return maturity_; }
  double exercise_interval() const { return exercise_interval_; }
  /// M, the number of exercise dates including maturity.
  std::size_t exercise_count() const { return exercise_nodes_.size() - 1; }
  /// All simulation nodes, starting at 0 and ending at T.
  std::span<const double> nodes() const { return nodes_; }
  std::size_t step_count() const { return nodes_.size() - 1; }
  /// Node index of exercise date k (k = 0 returns the origin).
  std::size_t exercise_node(std::size_t k) const { return exercise_nodes_.at(k); }
  double exercise_time(std::size_t k) const { return nodes_[exercise_node(k)]; }
  std::vector<double> exercise_times() const;

 private:
  double maturity_ = 0.0;
  double exercise_interval_ = 0.0;
  std::vector<double> nodes_;
  std::vector<std::size_t> exercise_nodes_;
};

enum class Stage { Pricing, Regression };

enum class Recording {
  ExerciseDates,  ///< store t_0 and t_1..t_M only
  AllNodes,       ///< store every simulation node
};

/// Placement of a path set inside the shared low-discrepancy stream. Pricing
/// paths occupy points [offset, offset + pricing_paths); the regression set
/// starts right after them.
struct StreamLayout {
  std::uint64_t offset = 0;
  std::size_t pricing_paths = 0;
};

/// Simulated states stored record-major: data[(record * n_paths + path) * dim + c].
class PathSet {
 public:
  PathSet() = default;
  PathSet(Stage stage, std::size_t n_paths, std::size_t state_dim, std::vector<double> times,
          std::vector<std::size_t> nodes, std::uint64_t first_point);

  Stage stage() const { return stage_; }
  std::size_t path_count() const { return n_paths_; }
  std::size_t state_dimension() const { return dim_; }
  std::size_t record_count() const { return times_.size(); }
  std::span<const double> record_times() const { return times_; }
  /// Grid node index of each record.
  std::span<const std::size_t> record_nodes() const { return nodes_; }
  std::uint64_t first_point() const { return first_point_; }

  std::span<const double> state(std::size_t record, std::size_t path) const {
    return {data_.data() + (record * n_paths_ + path) * dim_, dim_};
  }
  std::span<double> state(std::size_t record, std::size_t path) {
    return {data_.data() + (record * n_paths_ + path) * dim_, dim_};
  }
  double value(std::size_t record, std::size_t path, std::size_t component) const {
    return data_[(record * n_paths_ + path) * dim_ + component];
  }
  /// Record index holding exercise date k, given the grid the set was built on.
  std::size_t record_of_node(std::size_t node) const;

 private:
  Stage stage_ = Stage::Pricing;
  std::size_t n_paths_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> times_;
  std::vector<std::size_t> nodes_;
  std::uint64_t first_point_ = 0;
  std::vector<double> data_;
};

/// How Sobol coordinates become Brownian increments for each factor.
enum class PathConstruction {
  BrownianBridge,  ///< coordinate j of a factor drives the j-th bridge point (terminal first)
  Incremental,     ///< coordinate j drives step j directly
};

/// Largest Sobol dimension supported by the generator.
std::size_t max_sobol_dimension();

/// Simulates n_paths (a power of two) from S_0 = 1 (and nu_0 for Heston).
PathSet generate_paths(const MarketModel& model, const TimeGrid& grid, std::size_t n_paths,
                       Stage stage, const StreamLayout& layout,
                       Recording recording = Recording::ExerciseDates,
                       PathConstruction construction = PathConstruction::BrownianBridge);

/// One line per (path, record): path,t,s_1..s_n.
void write_paths_csv(const PathSet& paths, std::ostream& out, std::size_t max_paths = 0);

/// Lower-triangular L with L L^T equal to the equicorrelation matrix; valid
/// for rho in [-1/(d-1), 1].
std::vector<double> equicorrelation_cholesky(std::size_t d, double rho);

}  // namespace fdlsm
