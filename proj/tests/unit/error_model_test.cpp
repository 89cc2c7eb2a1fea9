#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "fdlsm/errors.hpp"
#include "fdlsm/error_model.hpp"

using namespace fdlsm;

namespace {

ErrorRecursionParams fig_params() {
  ErrorRecursionParams p;
  p.xi = 0.05 * 0.05;
  p.x = 0.01;
  p.y = 0.8;
  p.steps = 60;
  return p;
}

}  // namespace

TEST(ErrorModel, NoLocalErrorNoAccumulation) {
  auto p = fig_params();
  p.xi = 0.0;
  for (double e : accumulate_errors(p)) EXPECT_EQ(e, 0.0);
}

TEST(ErrorModel, LimitOfLsm) {
  const auto p = fig_params();
  EXPECT_NEAR(limiting_error(p), 0.05 / std::sqrt(3.0), 1e-9 * 0.05 / std::sqrt(3.0));
  EXPECT_NEAR(limiting_error(p), 0.028868, 1e-6);
}

TEST(ErrorModel, AnsatzRescalesLimit) {
  auto lsm = fig_params();
  auto fd = lsm;
  fd.rho_tilde = 0.9;
  EXPECT_NEAR(fd.effective_xi(), lsm.xi * (1.0 - 0.81), 1e-18);
  EXPECT_NEAR(limiting_error(fd) / limiting_error(lsm), std::sqrt(1.0 - 0.81), 1e-12);
  EXPECT_NEAR(limiting_error(fd), 0.012583, 1e-6);
}

TEST(ErrorModel, CurveMonotoneAndSaturated) {
  const auto p = fig_params();
  const auto e = accumulate_errors(p);
  ASSERT_EQ(e.size(), 61u);
  EXPECT_EQ(e[0], 0.0);
  for (std::size_t j = 1; j < e.size(); ++j) EXPECT_GT(e[j], e[j - 1]);
  EXPECT_NEAR(e.back(), limiting_error(p), 0.01 * limiting_error(p));
  EXPECT_NEAR(recursion_step(p, limiting_error(p)), limiting_error(p), 1e-15);
}

TEST(ErrorModel, RejectsDivergentParameters) {
  auto p = fig_params();
  p.x = 0.5;
  EXPECT_THROW(limiting_error(p), std::domain_error);
  p.y = 1.5;
  EXPECT_THROW(p.validate(), ConfigError);
}
