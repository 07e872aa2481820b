#include <gtest/gtest.h>

#include <curlkit/timeint.hpp>
#include <curlkit/vonneumann.hpp>

#include <cmath>
#include <complex>

using namespace curlkit;

namespace {

const RKMethod kAll[] = {RKMethod::RK1, RKMethod::SSPRK2, RKMethod::SSPRK3, RKMethod::SSPRK54};

double global_error(RKMethod m, int steps) {
  // y' = -y², y(0) = 1, y(1) = 1/2
  double y = 1.0;
  const double h = 1.0 / steps;
  for (int k = 0; k < steps; ++k) y = rk_step(y, [](double u) { return -u * u; }, h, m);
  return std::abs(y - 0.5);
}

}  // namespace

TEST(RungeKutta, ConsistentTableaus) {
  for (auto m : kAll) {
    const auto& t = tableau(m);
    for (int i = 1; i <= t.stages; ++i) {
      double s = 0.0;
      for (double a : t.alpha[i]) s += a;
      EXPECT_NEAR(s, 1.0, 1e-14) << to_string(m) << " stage " << i;
      for (double a : t.alpha[i]) EXPECT_GE(a, 0.0);
      for (double b : t.beta[i]) EXPECT_GE(b, 0.0);
    }
  }
}

TEST(RungeKutta, ObservedOrderOnNonlinearOde) {
  for (auto m : kAll) {
    const double e1 = global_error(m, 20), e2 = global_error(m, 40);
    const double order = std::log2(e1 / e2);
    EXPECT_NEAR(order, rk_order(m), 0.15) << to_string(m);
  }
}

TEST(RungeKutta, StabilityFunctionMatchesExponentialToOrder) {
  for (auto m : kAll) {
    const int p = rk_order(m);
    const std::complex<double> z1(0.01, 0.02), z2 = 0.5 * z1;
    const double e1 = std::abs(stability_function(z1, m) - std::exp(z1));
    const double e2 = std::abs(stability_function(z2, m) - std::exp(z2));
    EXPECT_NEAR(std::log2(e1 / e2), p + 1, 0.1) << to_string(m);
  }
}

TEST(RungeKutta, LinearSystemStepEqualsPolynomialInDtA) {
  Eigen::Matrix2d A;
  A << -1.0, 2.0, -0.5, -0.3;
  const double dt = 0.1;
  Eigen::Vector2d u0(1.0, -2.0);
  const Eigen::Vector2d got =
      rk_step(u0, [&](const Eigen::Vector2d& u) -> Eigen::Vector2d { return A * u; }, dt, RKMethod::SSPRK3);
  const Eigen::Matrix2d Z = dt * A;
  const Eigen::Vector2d ref = (Eigen::Matrix2d::Identity() + Z + Z * Z / 2.0 + Z * Z * Z / 6.0) * u0;
  EXPECT_NEAR((got - ref).norm(), 0.0, 1e-15);
}

TEST(RungeKutta, ParseAndNames) {
  for (auto m : kAll) EXPECT_EQ(parse_rk(to_string(m)), m);
  EXPECT_THROW(parse_rk("rk7"), ValidationError);
}

TEST(TimeStep, FollowsCflDefinition) {
  const auto mesh = square_mesh(10, 0.0, 1.0);
  const double dt = compute_dt(0.5, {1.0, 1.0}, mesh, 0.95);
  EXPECT_NEAR(dt, 0.95 * 0.5 / std::hypot(10.0, 10.0), 1e-15);
  EXPECT_THROW(compute_dt(0.5, {0.0, 0.0}, mesh, 0.95), ValidationError);
  EXPECT_THROW(compute_dt(0.0, {1.0, 0.0}, mesh, 0.95), ValidationError);
}
