#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "fdlsm/errors.hpp"
#include "fdlsm/payoffs.hpp"

using namespace fdlsm;

TEST(Explanatory, BasketAndWorstOf) {
  const std::vector<double> s{1.1, 0.9, 1.0, 1.2};
  EXPECT_NEAR(basket_spot(s), 1.05, 1e-15);
  std::size_t i = 9;
  EXPECT_EQ(worst_spot(s, &i), 0.9);
  EXPECT_EQ(i, 1u);
  const std::vector<double> perm{1.2, 1.0, 0.9, 1.1};
  EXPECT_NEAR(basket_spot(perm), 1.05, 1e-15);
  EXPECT_EQ(worst_spot(perm), 0.9);
  const std::vector<double> one{0.77};
  EXPECT_EQ(basket_spot(one), 0.77);
  EXPECT_EQ(worst_spot(one), 0.77);
}

TEST(Explanatory, TiesPickLowestIndex) {
  const std::vector<double> s{1.0, 0.8, 0.8};
  std::size_t i = 9;
  worst_spot(s, &i);
  EXPECT_EQ(i, 1u);
}

TEST(Exercise, WicInteriorCoupon) {
  WicSpec w;
  w.coupon_rate = 0.2;
  w.coupon_interval = 0.25;
  w.coupon_barrier = 0.7;
  EXPECT_NEAR(exercise_payoff(w, 0.71, false), 1.05, 1e-15);
  EXPECT_NEAR(exercise_payoff(w, 0.69, false), 1.0, 1e-15);
  EXPECT_NEAR(exercise_payoff(w, 0.7, false), 1.05, 1e-15);
}

TEST(Exercise, WicKnockedInAtMaturity) {
  WicSpec w;
  w.coupon_rate = 0.2;
  w.coupon_interval = 0.25;
  w.knock_in_barrier = 0.5;
  w.put_strike = 1.0;
  EXPECT_NEAR(exercise_payoff(w, 0.45, true), 0.45, 1e-15);
  EXPECT_NEAR(exercise_payoff(w, 0.55, true), 1.0, 1e-15);
  EXPECT_NEAR(wic_put_leg(w, 0.45), -0.55, 1e-15);
}

TEST(Exercise, SmoothedDigitalsInterpolate) {
  WicSpec w;
  w.coupon_rate = 0.2;
  w.coupon_interval = 0.25;
  w.smoothing_width = 0.02;
  EXPECT_GE(wic_coupon(w, 0.69), 0.0);
  EXPECT_LE(wic_coupon(w, 0.69), 0.05);
  EXPECT_NEAR(wic_coupon(w, 0.75), 0.05, 1e-15);
  EXPECT_NEAR(wic_coupon(w, 0.6), 0.0, 1e-15);
}

TEST(Exercise, VanillaIntrinsic) {
  EXPECT_NEAR(exercise_payoff(BermudanSpec{OptionType::Put, 1.0}, 0.8, false), 0.2, 1e-15);
  EXPECT_EQ(exercise_payoff(BermudanSpec{OptionType::Put, 1.0}, 1.3, false), 0.0);
  EXPECT_NEAR(exercise_payoff(EuropeanSpec{OptionType::Call, 1.0}, 1.3, true), 0.3, 1e-15);
}

TEST(Cashflows, BermudanAtMaturityUndiscounted) {
  const std::vector<double> t{0.0, 0.5, 1.0}, x{1.0, 0.9, 0.7};
  const Product p = BermudanSpec{OptionType::Put, 1.0};
  const auto l = realized_cashflows(p, x, t, 2);
  ASSERT_EQ(l.flows.size(), 1u);
  EXPECT_NEAR(l.discounted_value(0.0, 0.0), 0.3, 1e-15);
  EXPECT_NEAR(pathwise_value(p, x, t, 1, 0, 0.05), std::exp(-0.025) * 0.1, 1e-15);
}

TEST(Cashflows, WicCalledAtFirstDate) {
  WicSpec w;
  w.coupon_rate = 0.2;
  w.coupon_interval = 0.25;
  const std::vector<double> t{0.0, 0.25, 0.5, 0.75, 1.0}, x{1.0, 0.9, 0.95, 0.8, 0.85};
  const double r = 0.01;
  EXPECT_NEAR(pathwise_value(w, x, t, 1, 0, r), std::exp(-r * 0.25) * (0.05 + 1.0), 1e-15);
}

TEST(Cashflows, WicZeroCouponHeldToMaturity) {
  WicSpec w;
  w.coupon_rate = 0.0;
  w.coupon_interval = 0.25;
  const std::vector<double> t{0.0, 0.25, 0.5, 0.75, 1.0}, x{1.0, 0.9, 0.6, 0.8, 0.85};
  const double r = 0.03;
  for (std::size_t v = 0; v <= 3; ++v)
    EXPECT_NEAR(pathwise_value(w, x, t, 4, v, r), std::exp(-r * (1.0 - t[v])), 1e-15);
}

TEST(Cashflows, WicCouponsAccrueUntilCall) {
  WicSpec w;
  w.coupon_rate = 0.2;
  w.coupon_interval = 0.25;
  const std::vector<double> t{0.0, 0.25, 0.5, 0.75, 1.0}, x{1.0, 0.9, 0.6, 0.8, 0.85};
  const auto l = realized_cashflows(w, x, t, 3);
  // Coupons at dates 1 and 3, principal at 3.
  ASSERT_EQ(l.flows.size(), 3u);
  EXPECT_NEAR(l.discounted_value(0.0, 0.0), 1.1, 1e-15);
  // From date 1 onwards only the date-3 flows remain.
  EXPECT_NEAR(pathwise_value(w, x, t, 3, 1, 0.0), 1.05, 1e-15);
}

TEST(Cashflows, RejectsInvalidStops) {
  const std::vector<double> t{0.0, 0.5, 1.0}, x{1.0, 0.9, 0.7};
  EXPECT_THROW(realized_cashflows(BermudanSpec{}, x, t, 0), ConfigError);
  EXPECT_THROW(realized_cashflows(EuropeanSpec{}, x, t, 1), ConfigError);
  EXPECT_THROW(pathwise_value(BermudanSpec{}, x, t, 1, 2, 0.0), ConfigError);
}

TEST(Products, ExerciseSides) {
  EXPECT_EQ(exercise_side(WicSpec{}), ExerciseSide::Issuer);
  EXPECT_EQ(exercise_side(BermudanSpec{}), ExerciseSide::Holder);
  EXPECT_FALSE(has_early_exercise(EuropeanSpec{}));
  WicSpec bad;
  bad.coupon_rate = -0.1;
  EXPECT_THROW(validate_product(bad), ConfigError);
}
