#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

namespace fdlsm {

enum class ExerciseSide {
  Holder,  ///< value = max(exercise, continuation)
  Issuer,  ///< value = min(exercise, continuation)
};

/// One-dimensional backward pricing problem in the spot S.
struct PdeSpec {
  double rate = 0.0;
  std::function<double(double spot, double t)> vol;
  /// Empty means zero dividend yield.
  std::function<double(double spot, double t)> dividend;
  std::function<double(double spot)> terminal;
  /// Exercise value at date k = 1..M-1. Empty means no early exercise.
  std::function<double(double spot, std::size_t k)> obstacle;
  /// Cash flow paid at date k on both branches (continue and exercise).
  std::function<double(double spot, std::size_t k)> coupon;
  ExerciseSide side = ExerciseSide::Holder;
  /// t_1 < ... < t_M, with t_M the maturity.
  std::vector<double> dates;
  double spot0 = 1.0;

  double maturity() const { return dates.empty() ? 0.0 : dates.back(); }
  void validate() const;
};

struct PdeGridOptions {
  std::size_t nodes = 401;
  double n_sd = 6.0;
  double max_step = 1.0 / 250.0;
  /// Zero derives the reference vol from PdeSpec::vol (max of sigma around S(0)).
  double ref_vol = 0.0;
  /// Level forced onto a node; zero keeps S(0) on the centre node.
  double anchor = 0.0;
  std::size_t rannacher_steps = 2;
};

/// Uniform grid in x = ln S.
class PdeGrid {
 public:
  static PdeGrid make(const PdeSpec& spec, const PdeGridOptions& options = {});

  std::size_t size() const { return n_; }
  double x_min() const { return x_min_; }
  double x_max() const { return x_min_ + dx_ * static_cast<double>(n_ - 1); }
  double dx() const { return dx_; }
  double max_step() const { return max_step_; }
  std::size_t rannacher_steps() const { return rannacher_; }
  double x(std::size_t j) const { return x_min_ + dx_ * static_cast<double>(j); }
  double spot(std::size_t j) const;
  std::vector<double> spots() const;

 private:
  std::size_t n_ = 0;
  double x_min_ = 0.0;
  double dx_ = 0.0;
  double max_step_ = 0.0;
  std::size_t rannacher_ = 2;
};

enum class BoundaryRule {
  Linearity,  ///< d^2 V / dx^2 = 0 at both ends
};

BoundaryRule boundary_conditions(const PdeSpec& spec, const PdeGrid& grid);

struct PdeSolution {
  PdeGrid grid;
  std::vector<double> dates;
  /// slices[k-1] = V(., t_k^+) for k = 1..M; the last one is the terminal payoff.
  std::vector<std::vector<double>> slices;
  /// after[k-1] = V(., t_k^-) for k = 1..M-1, after the exercise/coupon transition.
  std::vector<std::vector<double>> after;
  /// V(., 0).
  std::vector<double> initial;

  std::span<const double> slice(std::size_t k) const { return slices.at(k - 1); }
  /// Interpolated (natural cubic in S) value at t = 0.
  double value_at(double spot) const;
};

PdeSolution solve_backward(const PdeSpec& spec, const PdeGrid& grid);

/// |V_{N-1} - 2 V_{N-2} + V_{N-3}| at the upper end, max with the lower end.
double linearity_residual(std::span<const double> values);

/// Writes t,S,value rows for every recorded slice.
void write_slices_csv(const PdeSolution& solution, std::ostream& out);

}  // namespace fdlsm
