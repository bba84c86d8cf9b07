#pragma once

// Singular charts of O(l+1) x O(m+1)-type curves.
//
// Axis contact with x(0) = x0 > 0: q = dx/dy is the fixed point of
//   Psi(q)(y) = y^{-m} \int_0^y { -m q^3 + (n-1) H~ eta (1+q^2)^{3/2}
//                                 + l eta (1+q^2) / (x0 + \int_0^eta q) } eta^{m-1} d eta.
// Origin contact: q = sqrt(l/m) + r with r the fixed point of
//   Theta(r)(y) = y^{-(l+m)} \int_0^y { F1 + F2 + F3 } eta^{l+m-1} d eta.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "pmc/chart.hpp"
#include "pmc/error.hpp"
#include "pmc/hfield.hpp"
#include "pmc/product_quadrature.hpp"
#include "pmc/types.hpp"

namespace pmc {

struct SingularChartLM : SingularChart {
  enum class Case { AxisA, OriginB };
  Case kind = Case::AxisA;
  int l = 1;
  int m = 1;
  /// Contact abscissa for AxisA (equals x_b).
  double x0 = 0.0;
  /// r = q - sqrt(l/m); filled for OriginB only.
  std::vector<double> r;
};

/// Outgoing x' at an origin passage; the incoming value is its negative.
[[nodiscard]] inline double origin_slope(int l, int m) {
  PMC_REQUIRE(l >= 1 && m >= 1, ErrorCode::InvalidInput, "origin_slope requires l, m >= 1");
  return std::sqrt(static_cast<double>(l) / (l + m));
}

namespace detail {

inline std::vector<double> psi_integrand(const std::vector<double>& q,
                                         const std::vector<double>& h_tilde, int l, int m,
                                         double x0, const std::vector<double>& u) {
  const int n = l + m + 2;
  std::vector<double> f(u.size());
  std::vector<double> running;
  if (l > 0) running = cumulative_trapezoid(u, q);
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double q2 = q[i] * q[i];
    // same expression as the O(n-1) integrand, so l = 0 reproduces it exactly
    f[i] = -m * q2 * q[i] + (n - 1) * h_tilde[i] * u[i] * std::pow(1.0 + q2, 1.5);
    if (l > 0) {
      const double denom = x0 + running[i];
      PMC_REQUIRE(denom > 0.0, ErrorCode::DenominatorVanished,
                  "x0 + int q vanished at y = " + std::to_string(u[i]));
      f[i] += l * u[i] * (1.0 + q2) / denom;
    }
  }
  return f;
}

inline std::vector<double> theta_integrand(const std::vector<double>& r,
                                           const std::vector<double>& h_tilde, int l, int m,
                                           const std::vector<double>& u) {
  const int n = l + m + 2;
  const double sl = std::sqrt(static_cast<double>(l));
  const double sm = std::sqrt(static_cast<double>(m));
  const double slm = std::sqrt(static_cast<double>(l) * m);
  const double cone = std::sqrt(static_cast<double>(l) / m);
  const auto R = cumulative_trapezoid(u, r);
  std::vector<double> f(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double mean = i == 0 ? 0.0 : sm * R[i] / u[i];
    PMC_REQUIRE(mean + sl > 0.0, ErrorCode::DenominatorVanished,
                "running mean denominator vanished at y = " + std::to_string(u[i]));
    const double w = 1.0 + (r[i] + cone) * (r[i] + cone);
    const double f1 = -r[i] * r[i] * (m * r[i] + 2.0 * slm);
    const double f2 = -slm * w * mean / (mean + sl);
    const double f3 = (n - 1) * h_tilde[i] * std::pow(w, 1.5) * u[i];
    f[i] = f1 + f2 + f3;
  }
  return f;
}

}  // namespace detail

[[nodiscard]] inline std::vector<double> psi_apply(const std::vector<double>& q,
                                                   const std::vector<double>& h_tilde, int l,
                                                   int m, double x0,
                                                   const std::vector<double>& grid) {
  PMC_REQUIRE(l >= 0 && m >= 1, ErrorCode::InvalidInput, "psi_apply requires l >= 0, m >= 1");
  PMC_REQUIRE(l == 0 || x0 > 0.0, ErrorCode::InvalidInput, "psi_apply requires x0 > 0");
  PMC_REQUIRE(q.size() == grid.size() && h_tilde.size() == grid.size(), ErrorCode::InvalidInput,
              "psi_apply: size mismatch");
  detail::check_grid(grid);
  const MonomialVolterra op(m - 1, static_cast<int>(grid.size()) - 1);
  return op.apply(detail::psi_integrand(q, h_tilde, l, m, x0, grid));
}

[[nodiscard]] inline std::vector<double> theta_apply(const std::vector<double>& r,
                                                     const std::vector<double>& h_tilde, int l,
                                                     int m, const std::vector<double>& grid) {
  PMC_REQUIRE(l >= 1 && m >= 1, ErrorCode::InvalidInput, "theta_apply requires l, m >= 1");
  PMC_REQUIRE(r.size() == grid.size() && h_tilde.size() == grid.size(), ErrorCode::InvalidInput,
              "theta_apply: size mismatch");
  detail::check_grid(grid);
  const MonomialVolterra op(l + m - 1, static_cast<int>(grid.size()) - 1);
  return op.apply(detail::theta_integrand(r, h_tilde, l, m, grid));
}

/// Axis contact at (event.contact_x, 0) with contact_x > 0. l = 0 is accepted
/// and reduces to the O(m+1) rotational chart.
[[nodiscard]] inline SingularChartLM solve_case_a(const HField& h, int l, int m,
                                                  const SingularEvent& event, int orientation,
                                                  const SolverConfig& cfg, int h_sign = 1) {
  cfg.validate();
  PMC_REQUIRE(l >= 0 && m >= 1, ErrorCode::InvalidInput, "solve_case_a requires l >= 0, m >= 1");
  PMC_REQUIRE(event.kind == EventKind::AxisContact, ErrorCode::InvalidInput,
              "solve_case_a needs an axis contact");
  PMC_REQUIRE(l == 0 || event.contact_x > 0.0, ErrorCode::InvalidInput,
              "solve_case_a needs contact_x > 0");
  PMC_REQUIRE(orientation == 1 || orientation == -1, ErrorCode::InvalidInput,
              "orientation must be +1 or -1");
  const int N = cfg.chart_nodes;
  const double x0 = event.contact_x;
  const double M = cfg.norm_bound_M;
  double Y0 = cfg.chart_Y_init;
  // keeps x0 - (M/2) Y^2 > 0 for every admissible iterate
  if (l > 0) Y0 = std::min(Y0, 0.9 * std::sqrt(2.0 * x0 / M));
  const MonomialVolterra op(m - 1, N);
  auto chart = detail::adapt_width(
      Y0, detail::width_floor(cfg.axis_eps), cfg,
      [&](double Y, std::string& reason) -> std::optional<SingularChart> {
        const auto u = uniform_grid(Y, N);
        auto res = detail::picard(u, 0.0, event.s_event, orientation, h_sign, h, cfg,
                                  [&](const std::vector<double>& q, const std::vector<double>& ht) {
                                    return op.apply(detail::psi_integrand(q, ht, l, m, x0, u));
                                  });
        return detail::chart_from_outcome(std::move(res), Y, u, 0.0, orientation, h_sign,
                                          event.s_event, x0, reason);
      });
  SingularChartLM out;
  static_cast<SingularChart&>(out) = std::move(chart);
  out.kind = SingularChartLM::Case::AxisA;
  out.l = l;
  out.m = m;
  out.x0 = x0;
  return out;
}

/// Origin contact; the chart starts at the origin with slope sqrt(l/m).
[[nodiscard]] inline SingularChartLM solve_case_b(const HField& h, int l, int m,
                                                  const SingularEvent& event, int orientation,
                                                  const SolverConfig& cfg, int h_sign = 1) {
  cfg.validate();
  PMC_REQUIRE(l >= 1 && m >= 1, ErrorCode::InvalidInput, "solve_case_b requires l, m >= 1");
  PMC_REQUIRE(event.kind == EventKind::OriginContact, ErrorCode::InvalidInput,
              "solve_case_b needs an origin contact");
  PMC_REQUIRE(orientation == 1 || orientation == -1, ErrorCode::InvalidInput,
              "orientation must be +1 or -1");
  const int N = cfg.chart_nodes;
  const double cone = std::sqrt(static_cast<double>(l) / m);
  // M Y < sqrt(l/m) keeps the running-mean denominator positive
  const double Y0 = std::min(cfg.chart_Y_init, 0.9 * cone / cfg.norm_bound_M);
  const MonomialVolterra op(l + m - 1, N);
  auto chart = detail::adapt_width(
      Y0, detail::width_floor(cfg.origin_eps), cfg,
      [&](double Y, std::string& reason) -> std::optional<SingularChart> {
        const auto u = uniform_grid(Y, N);
        auto res = detail::picard(u, cone, event.s_event, orientation, h_sign, h, cfg,
                                  [&](const std::vector<double>& r, const std::vector<double>& ht) {
                                    return op.apply(detail::theta_integrand(r, ht, l, m, u));
                                  });
        return detail::chart_from_outcome(std::move(res), Y, u, cone, orientation, h_sign,
                                          event.s_event, 0.0, reason);
      });
  SingularChartLM out;
  static_cast<SingularChart&>(out) = std::move(chart);
  out.kind = SingularChartLM::Case::OriginB;
  out.l = l;
  out.m = m;
  out.r.resize(out.q.size());
  for (std::size_t i = 0; i < out.q.size(); ++i) out.r[i] = out.q[i] - cone;
  return out;
}

/// Far-side chart. Axis contacts flip the frame sign (reflection in the
/// axis); the origin passage is a point reflection and keeps it.
[[nodiscard]] inline SingularChartLM solve_outgoing_lm(const SingularChartLM& incoming,
                                                       const HField& h, const SolverConfig& cfg) {
  SingularEvent ev;
  ev.s_event = incoming.b;
  if (incoming.kind == SingularChartLM::Case::AxisA) {
    ev.kind = EventKind::AxisContact;
    ev.contact_x = incoming.x0;
    return solve_case_a(h, incoming.l, incoming.m, ev, -incoming.orientation, cfg,
                        -incoming.h_sign);
  }
  ev.kind = EventKind::OriginContact;
  return solve_case_b(h, incoming.l, incoming.m, ev, -incoming.orientation, cfg, incoming.h_sign);
}

/// Stitched arc-length state at u = Y/2 past the origin.
[[nodiscard]] inline CurveState continue_through_origin(const SingularChartLM& incoming,
                                                        const HField& h, int l, int m,
                                                        const SolverConfig& cfg) {
  PMC_REQUIRE(incoming.kind == SingularChartLM::Case::OriginB, ErrorCode::InvalidInput,
              "continue_through_origin needs an origin chart");
  PMC_REQUIRE(l == incoming.l && m == incoming.m, ErrorCode::InvalidInput,
              "(l, m) differ from the chart's");
  const auto out = solve_outgoing_lm(incoming, h, cfg);
  return out.state_at(out.nodes() / 2);
}

/// Stitched arc-length state at u = Y/2 past an axis contact.
[[nodiscard]] inline CurveState continue_through_axis(const SingularChartLM& incoming,
                                                      const HField& h, const SolverConfig& cfg) {
  PMC_REQUIRE(incoming.kind == SingularChartLM::Case::AxisA, ErrorCode::InvalidInput,
              "continue_through_axis needs an axis chart");
  const auto out = solve_outgoing_lm(incoming, h, cfg);
  return out.state_at(out.nodes() / 2);
}

}  // namespace pmc
