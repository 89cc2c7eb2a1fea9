#include "fdlsm/payoffs.hpp"

#include <algorithm>
#include <cmath>

#include "fdlsm/errors.hpp"

namespace fdlsm {

namespace {

// Raw step with Theta(0) = 1, or a linear ramp over [-w, 0] that dominates it.
double step_up(double y, double width) {
  if (width <= 0.0) return y >= 0.0 ? 1.0 : 0.0;
  return std::clamp(y / width + 1.0, 0.0, 1.0);
}

double vanilla(OptionType type, double x, double strike) {
  return type == OptionType::Call ? std::max(x - strike, 0.0) : std::max(strike - x, 0.0);
}

}  // namespace

void validate_product(const Product& product) {
  if (const auto* b = std::get_if<BermudanSpec>(&product)) {
    if (!(b->strike > 0.0) || !std::isfinite(b->strike)) throw ConfigError("bermudan: strike must be positive");
  } else if (const auto* e = std::get_if<EuropeanSpec>(&product)) {
    if (!(e->strike > 0.0) || !std::isfinite(e->strike)) throw ConfigError("european: strike must be positive");
  } else {
    const auto& w = std::get<WicSpec>(product);
    if (!std::isfinite(w.coupon_rate) || w.coupon_rate < 0.0) throw ConfigError("wic: coupon rate must be non-negative");
    if (!(w.coupon_barrier > 0.0)) throw ConfigError("wic: coupon barrier must be positive");
    if (!(w.knock_in_barrier > 0.0)) throw ConfigError("wic: knock-in barrier must be positive");
    if (!(w.put_strike > 0.0)) throw ConfigError("wic: put strike must be positive");
    if (!(w.coupon_interval > 0.0)) throw ConfigError("wic: coupon interval must be positive");
    if (w.smoothing_width < 0.0) throw ConfigError("wic: smoothing width must be non-negative");
  }
}

ExerciseSide exercise_side(const Product& product) {
  return std::holds_alternative<WicSpec>(product) ? ExerciseSide::Issuer : ExerciseSide::Holder;
}

bool has_early_exercise(const Product& product) { return !std::holds_alternative<EuropeanSpec>(product); }

double basket_spot(std::span<const double> spots) {
  double s = 0.0;
  for (double v : spots) s += v;
  return s / static_cast<double>(spots.size());
}

double worst_spot(std::span<const double> spots, std::size_t* argmin) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < spots.size(); ++i)
    if (spots[i] < spots[best]) best = i;
  if (argmin) *argmin = best;
  return spots[best];
}

ExplanatoryState explanatory_state(const Product& product, const MarketModel& model,
                                   std::span<const double> state) {
  ExplanatoryState out;
  if (std::holds_alternative<HestonModel>(model)) {
    out.x = state[0];
    out.nu = state[1];
    return out;
  }
  if (std::holds_alternative<WicSpec>(product)) out.x = worst_spot(state, &out.argmin);
  else out.x = basket_spot(state);
  return out;
}

double wic_coupon(const WicSpec& spec, double worst) {
  return spec.coupon_rate * spec.coupon_interval * step_up(worst - spec.coupon_barrier, spec.smoothing_width);
}

double wic_put_leg(const WicSpec& spec, double worst) {
  double knocked;
  if (spec.smoothing_width <= 0.0) knocked = spec.knock_in_barrier - worst >= 0.0 ? 1.0 : 0.0;
  else knocked = std::clamp((spec.knock_in_barrier - worst) / spec.smoothing_width, 0.0, 1.0);
  return -knocked * std::max(spec.put_strike - worst, 0.0);
}

double exercise_payoff(const Product& product, double x, bool at_maturity) {
  if (const auto* b = std::get_if<BermudanSpec>(&product)) return vanilla(b->type, x, b->strike);
  if (const auto* e = std::get_if<EuropeanSpec>(&product)) return vanilla(e->type, x, e->strike);
  const auto& w = std::get<WicSpec>(product);
  return wic_coupon(w, x) + 1.0 + (at_maturity ? wic_put_leg(w, x) : 0.0);
}

double CashflowLedger::discounted_value(double rate, double valuation_time) const {
  double v = 0.0;
  for (const auto& [t, a] : flows) v += std::exp(-rate * (t - valuation_time)) * a;
  return v;
}

CashflowLedger realized_cashflows(const Product& product, std::span<const double> x,
                                  std::span<const double> times, std::size_t stop) {
  const std::size_t m = times.size() - 1;
  if (stop == 0 || stop > m) throw ConfigError("cash flows: stop date out of range");
  CashflowLedger ledger;
  ledger.stop_time = times[stop];
  if (const auto* w = std::get_if<WicSpec>(&product)) {
    for (std::size_t k = 1; k <= stop; ++k) {
      const double c = wic_coupon(*w, x[k]);
      if (c != 0.0) ledger.flows.emplace_back(times[k], c);
    }
    ledger.flows.emplace_back(times[stop], 1.0 + (stop == m ? wic_put_leg(*w, x[stop]) : 0.0));
  } else {
    if (std::holds_alternative<EuropeanSpec>(product) && stop != m)
      throw ConfigError("cash flows: a European product can only stop at maturity");
    ledger.flows.emplace_back(times[stop], exercise_payoff(product, x[stop], stop == m));
  }
  return ledger;
}

double pathwise_value(const Product& product, std::span<const double> x, std::span<const double> times,
                      std::size_t stop, std::size_t valuation, double rate) {
  if (valuation > stop) throw ConfigError("pathwise value: valuation date after the stop date");
  const CashflowLedger ledger = realized_cashflows(product, x, times, stop);
  double v = 0.0;
  for (const auto& [t, a] : ledger.flows)
    if (t > times[valuation] || t == ledger.stop_time) v += std::exp(-rate * (t - times[valuation])) * a;
  return v;
}

PdeSpec product_pde_spec(const Product& product, double rate, std::function<double(double, double)> vol,
                         std::function<double(double, double)> dividend, const TimeGrid& grid) {
  validate_product(product);
  PdeSpec spec;
  spec.rate = rate;
  spec.vol = std::move(vol);
  spec.dividend = std::move(dividend);
  spec.side = exercise_side(product);
  spec.dates = grid.exercise_times();
  spec.dates.erase(spec.dates.begin());

  const Product p = product;
  spec.terminal = [p](double s) { return exercise_payoff(p, s, true); };
  if (has_early_exercise(product))
    spec.obstacle = [p](double s, std::size_t) { return exercise_payoff(p, s, false); };
  if (const auto* w = std::get_if<WicSpec>(&product)) {
    const WicSpec ws = *w;
    spec.coupon = [ws](double s, std::size_t) { return wic_coupon(ws, s); };
  }
  return spec;
}

}  // namespace fdlsm
