#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "fdlsm/analytics.hpp"
#include "fdlsm/market_models.hpp"
#include "fdlsm/pde1d.hpp"

namespace fdlsm {

/// Bermudan option on the equally weighted basket, holder exercise.
struct BermudanSpec {
  OptionType type = OptionType::Put;
  double strike = 1.0;
};

/// Worst-of issuer callable note with digital coupons and a knock-in short put
/// at maturity; notional 1.
struct WicSpec {
  double coupon_rate = 0.0;
  double coupon_barrier = 0.7;
  double knock_in_barrier = 0.5;
  double put_strike = 1.0;
  double coupon_interval = 0.25;
  /// Width of the call-spread overhedge replacing the digitals. Zero keeps
  /// raw digitals.
  double smoothing_width = 0.0;
};

/// European option on the basket, used for exposure profiles.
struct EuropeanSpec {
  OptionType type = OptionType::Call;
  double strike = 1.0;
};

using Product = std::variant<BermudanSpec, WicSpec, EuropeanSpec>;

void validate_product(const Product& product);
ExerciseSide exercise_side(const Product& product);
bool has_early_exercise(const Product& product);

/// Regression state at one date: x is the basket (Bermudan, European) or
/// worst-of (WIC) spot; nu is the Heston variance (0 otherwise); argmin is the
/// worst performer, lowest index on ties.
struct ExplanatoryState {
  double x = 0.0;
  double nu = 0.0;
  std::size_t argmin = 0;
};

double basket_spot(std::span<const double> spots);
double worst_spot(std::span<const double> spots, std::size_t* argmin = nullptr);

/// `state` is one PathSet record: spots for BS/LV, (S, nu) for Heston.
ExplanatoryState explanatory_state(const Product& product, const MarketModel& model,
                                   std::span<const double> state);

/// c dT Theta(S_W - B_c), Theta(0) = 1.
double wic_coupon(const WicSpec& spec, double worst);
/// -Theta(B_P - S_W) max(K - S_W, 0).
double wic_put_leg(const WicSpec& spec, double worst);

/// Exercise value Z at a date; `at_maturity` adds the WIC put leg. WIC values
/// include the date's coupon.
double exercise_payoff(const Product& product, double x, bool at_maturity);

/// Cash flows realized on one path under a stopping date.
struct CashflowLedger {
  std::vector<std::pair<double, double>> flows;  // (time, amount)
  double stop_time = 0.0;

  double discounted_value(double rate, double valuation_time) const;
};

/// x[k] for k = 0..M and times[k] = t_k; stop in 1..M.
CashflowLedger realized_cashflows(const Product& product, std::span<const double> x,
                                  std::span<const double> times, std::size_t stop);

/// Cash flows discounted to times[valuation]; only flows at dates above the
/// valuation date count, except that the full flow at stop is always included.
double pathwise_value(const Product& product, std::span<const double> x, std::span<const double> times,
                      std::size_t stop, std::size_t valuation, double rate);

/// The 1D pricing problem of a product under given effective coefficients.
PdeSpec product_pde_spec(const Product& product, double rate,
                         std::function<double(double, double)> vol,
                         std::function<double(double, double)> dividend, const TimeGrid& grid);

}  // namespace fdlsm
