#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pmc/product_quadrature.hpp"

using namespace pmc;

TEST(MonomialVolterra, ExactOnPiecewiseLinear) {
  // f(eta) = 1 + 2 eta is linear, so the product rule must be exact
  for (int k = 0; k <= 6; ++k) {
    const double Y = 0.3;
    const int N = 17;
    const auto u = uniform_grid(Y, N);
    std::vector<double> f(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) f[i] = 1.0 + 2.0 * u[i];
    const auto g = MonomialVolterra(k, N).apply(f);
    EXPECT_EQ(g[0], 0.0);
    for (int i = 1; i <= N; ++i) {
      // y^{-(k+1)} int_0^y (1 + 2 eta) eta^k = y^{-(k+1)} (y^{k+1}/(k+1) + 2 y^{k+2}/(k+2))
      const double y = u[i];
      const double want = 1.0 / (k + 1) + 2.0 * y / (k + 2);
      EXPECT_NEAR(g[i], want, 1e-14) << "k=" << k << " i=" << i;
    }
  }
}

TEST(MonomialVolterra, SecondOrderOnSmoothIntegrand) {
  const int k = 2;
  const double Y = 0.5;
  double prev = 0.0;
  for (int N : {16, 32, 64, 128}) {
    const auto u = uniform_grid(Y, N);
    std::vector<double> f(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) f[i] = std::exp(u[i]);
    const auto g = MonomialVolterra(k, N).apply(f);
    const double want =
        oracle::integrate([](double t) { return std::exp(t) * t * t; }, 0.0, Y) / std::pow(Y, 3);
    const double err = std::abs(g[N] - want);
    if (prev > 0.0) EXPECT_NEAR(prev / err, 4.0, 0.2);
    prev = err;
  }
}

TEST(MonomialVolterra, RejectsBadInput) {
  EXPECT_THROW(MonomialVolterra(-1, 4), Error);
  EXPECT_THROW(MonomialVolterra(0, 0), Error);
  EXPECT_THROW((void)MonomialVolterra(0, 4).apply({1.0, 2.0}), Error);
}

TEST(CumulativeTrapezoid, ExactOnLinear) {
  const auto u = uniform_grid(2.0, 8);
  std::vector<double> f(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) f[i] = 3.0 - u[i];
  const auto F = cumulative_trapezoid(u, f);
  for (std::size_t i = 0; i < u.size(); ++i)
    EXPECT_NEAR(F[i], 3.0 * u[i] - 0.5 * u[i] * u[i], 1e-14);
}

TEST(UniformGrid, EndpointsExact) {
  const auto u = uniform_grid(0.05, 256);
  ASSERT_EQ(u.size(), 257u);
  EXPECT_EQ(u.front(), 0.0);
  EXPECT_EQ(u.back(), 0.05);
}
