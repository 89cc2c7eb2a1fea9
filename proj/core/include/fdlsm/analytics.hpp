#pragma once

#include "fdlsm/market_models.hpp"

namespace fdlsm {

enum class OptionType { Call, Put };

/// Standard normal distribution function.
double norm_cdf(double x);
/// Inverse standard normal distribution function (Wichura's AS241, about
/// 1e-16 relative accuracy). Requires p in (0, 1).
double norm_inv(double p);

/// Black-Scholes-Merton price of a European call or put with continuous
/// dividend yield. Zero vol or zero tenor return the discounted forward
/// intrinsic value.
double bs_european(double spot, double strike, double vol, double rate, double dividend, double tenor,
                   OptionType type);

/// Single-asset proxy for the equally weighted arithmetic basket, matching the
/// first two moments of the basket at the horizon.
struct EffectiveBasketParams {
  double dividend = 0.0;
  double vol = 0.0;
  double horizon = 0.0;
};

EffectiveBasketParams effective_basket_params(const BlackScholesModel& model, double horizon);

/// E[nu_t] = nu_0 e^{-kappa t} + theta (1 - e^{-kappa t}).
double heston_expected_variance(const HestonModel& model, double t);

}  // namespace fdlsm
