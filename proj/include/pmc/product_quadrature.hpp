#pragma once

// Product quadrature for weakly singular Volterra operators of the form
//   g(y) = y^{-(k+1)} \int_0^y f(eta) eta^k d eta
// on a uniform grid u_i = i*Y/N, exact when f is piecewise linear.

#include <cmath>
#include <cstddef>
#include <vector>

#include "pmc/error.hpp"

namespace pmc {

class MonomialVolterra {
 public:
  MonomialVolterra(int k, int nodes) : k_(k), nodes_(nodes) {
    PMC_REQUIRE(k >= 0 && k <= 60, ErrorCode::InvalidInput, "monomial exponent must lie in [0, 60]");
    PMC_REQUIRE(nodes >= 1, ErrorCode::InvalidInput, "need at least one panel");
    // binomial row of k
    std::vector<double> binom(static_cast<std::size_t>(k) + 1, 1.0);
    for (int p = 1; p <= k; ++p) binom[p] = binom[p - 1] * (k - p + 1) / p;
    a_.resize(nodes);
    b_.resize(nodes);
    // panel [j, j+1] in grid units: int_0^1 {(1-t), t} (j+t)^k dt
    for (int j = 0; j < nodes; ++j) {
      double a = 0.0;
      double b = 0.0;
      for (int p = 0; p <= k; ++p) {
        const double jp = std::pow(static_cast<double>(j), k - p);
        a += binom[p] * jp / ((p + 1.0) * (p + 2.0));
        b += binom[p] * jp / (p + 2.0);
      }
      a_[j] = a;
      b_[j] = b;
    }
  }

  [[nodiscard]] int exponent() const { return k_; }
  [[nodiscard]] int nodes() const { return nodes_; }

  /// f sampled at u_0..u_N; returns g at the same nodes with g_0 = 0.
  [[nodiscard]] std::vector<double> apply(const std::vector<double>& f) const {
    PMC_REQUIRE(f.size() == static_cast<std::size_t>(nodes_) + 1, ErrorCode::InvalidInput,
                "integrand size does not match the grid");
    std::vector<double> g(f.size(), 0.0);
    double acc = 0.0;
    for (int i = 1; i <= nodes_; ++i) {
      acc += f[i - 1] * a_[i - 1] + f[i] * b_[i - 1];
      g[i] = acc / std::pow(static_cast<double>(i), k_ + 1);
    }
    return g;
  }

 private:
  int k_;
  int nodes_;
  std::vector<double> a_;
  std::vector<double> b_;
};

/// Running trapezoid integral \int_{u_0}^{u_i} f, same length as the inputs.
[[nodiscard]] inline std::vector<double> cumulative_trapezoid(const std::vector<double>& u,
                                                              const std::vector<double>& f) {
  PMC_REQUIRE(u.size() == f.size(), ErrorCode::InvalidInput, "grid and values differ in size");
  std::vector<double> out(u.size(), 0.0);
  for (std::size_t i = 1; i < u.size(); ++i)
    out[i] = out[i - 1] + 0.5 * (u[i] - u[i - 1]) * (f[i] + f[i - 1]);
  return out;
}

[[nodiscard]] inline std::vector<double> uniform_grid(double Y, int nodes) {
  std::vector<double> u(static_cast<std::size_t>(nodes) + 1);
  for (int i = 0; i <= nodes; ++i) u[i] = Y * i / nodes;
  return u;
}

}  // namespace pmc
