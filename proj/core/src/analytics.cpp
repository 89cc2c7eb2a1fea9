#include "fdlsm/analytics.hpp"

#include <cmath>
#include <limits>

#include "fdlsm/errors.hpp"

namespace fdlsm {

double norm_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

double norm_inv(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    throw ConfigError("norm_inv: probability must lie in [0, 1]");
  }
  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((r * 2509.0809287301226727 + 33430.575583588128105) * r + 67265.770927008700853) * r +
                45921.953931549871457) * r + 13731.693765509461125) * r + 1971.5909503065514427) * r +
             133.14166789178437745) * r + 3.387132872796366608) /
           (((((((r * 5226.495278852545925 + 28729.085735721942674) * r + 39307.89580009271061) * r +
                21213.794301586595867) * r + 5394.1960214247511077) * r + 687.1870074920579083) * r +
             42.313330701600911252) * r + 1.0);
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double v;
  if (r <= 5.0) {
    r -= 1.6;
    v = (((((((r * 7.7454501427834140764e-4 + 0.0227238449892691845833) * r + 0.24178072517745061177) * r +
             1.27045825245236838258) * r + 3.64784832476320460504) * r + 5.7694972214606914055) * r +
          4.6303378461565452959) * r + 1.42343711074968357734) /
        (((((((r * 1.05075007164441684324e-9 + 5.475938084995344946e-4) * r + 0.0151986665636164571966) * r +
             0.14810397642748007459) * r + 0.68976733498510000455) * r + 1.6763848301838038494) * r +
          2.05319162663775882187) * r + 1.0);
  } else {
    r -= 5.0;
    v = (((((((r * 2.01033439929228813265e-7 + 2.71155556874348757815e-5) * r + 0.0012426609473880784386) * r +
             0.026532189526576123093) * r + 0.29656057182850489123) * r + 1.7848265399172913358) * r +
          5.4637849111641143699) * r + 6.6579046435011037772) /
        (((((((r * 2.04426310338993978564e-15 + 1.4215117583164458887e-7) * r + 1.8463183175100546818e-5) * r +
             7.868691311456132591e-4) * r + 0.0148753612908506148525) * r + 0.13692988092273580531) * r +
          0.59983220655588793769) * r + 1.0);
  }
  return q < 0.0 ? -v : v;
}

double bs_european(double spot, double strike, double vol, double rate, double dividend, double tenor,
                   OptionType type) {
  for (double v : {spot, strike, vol, rate, dividend, tenor})
    if (!std::isfinite(v)) throw ConfigError("bs_european: non-finite input");
  if (spot <= 0.0 || strike <= 0.0) throw ConfigError("bs_european: spot and strike must be positive");
  if (vol < 0.0 || tenor < 0.0) throw ConfigError("bs_european: vol and tenor must be non-negative");

  const double df_q = std::exp(-dividend * tenor);
  const double df_r = std::exp(-rate * tenor);
  const double sign = type == OptionType::Call ? 1.0 : -1.0;
  const double stdev = vol * std::sqrt(tenor);
  if (stdev < 1e-14) return std::max(0.0, sign * (spot * df_q - strike * df_r));

  const double d1 = (std::log(spot / strike) + (rate - dividend) * tenor) / stdev + 0.5 * stdev;
  const double d2 = d1 - stdev;
  return sign * (spot * df_q * norm_cdf(sign * d1) - strike * df_r * norm_cdf(sign * d2));
}

EffectiveBasketParams effective_basket_params(const BlackScholesModel& model, double horizon) {
  model.validate();
  if (!std::isfinite(horizon) || horizon <= 0.0)
    throw ConfigError("effective_basket_params: horizon must be positive");
  const std::size_t d = model.dimension();
  const double dd = static_cast<double>(d);

  double first = 0.0;
  for (double q : model.dividends) first += std::exp(-q * horizon);
  first /= dd;

  double second = 0.0;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      const double rho = i == j ? 1.0 : model.correlation;
      second += std::exp((-model.dividends[i] - model.dividends[j] + rho * model.vols[i] * model.vols[j]) * horizon);
    }
  second /= dd * dd;

  EffectiveBasketParams p;
  p.horizon = horizon;
  p.dividend = -std::log(first) / horizon;
  const double total_var = std::log(second / (first * first));
  p.vol = std::sqrt(std::max(0.0, total_var) / horizon);
  return p;
}

double heston_expected_variance(const HestonModel& model, double t) {
  const double e = std::exp(-model.kappa * t);
  return model.v0 * e + model.theta * (1.0 - e);
}

}  // namespace fdlsm
