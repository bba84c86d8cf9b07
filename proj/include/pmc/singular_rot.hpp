#pragma once

// Axis contact of O(n-1)-type curves: the slope q = dx/dy solves
//   q(y) = y^{2-n} \int_0^y { -(n-2) q^3 + (n-1) H~ eta (1+q^2)^{3/2} } eta^{n-3} d eta
// and the chart is continued through the axis by reflection.

#include <cmath>
#include <vector>

#include "pmc/chart.hpp"
#include "pmc/error.hpp"
#include "pmc/hfield.hpp"
#include "pmc/product_quadrature.hpp"
#include "pmc/types.hpp"

namespace pmc {

struct SingularChartRot : SingularChart {
  int n = 3;
};

namespace detail {

inline std::vector<double> phi_integrand(const std::vector<double>& q,
                                         const std::vector<double>& h_tilde, int n,
                                         const std::vector<double>& u) {
  std::vector<double> f(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double q2 = q[i] * q[i];
    f[i] = -(n - 2) * q2 * q[i] + (n - 1) * h_tilde[i] * u[i] * std::pow(1.0 + q2, 1.5);
  }
  return f;
}

}  // namespace detail

/// Phi(q) at the grid nodes (grid[0] = 0, uniform).
[[nodiscard]] inline std::vector<double> phi_apply(const std::vector<double>& q,
                                                   const std::vector<double>& h_tilde, int n,
                                                   const std::vector<double>& grid) {
  PMC_REQUIRE(n >= 3, ErrorCode::InvalidInput, "phi_apply requires n >= 3");
  PMC_REQUIRE(q.size() == grid.size() && h_tilde.size() == grid.size(), ErrorCode::InvalidInput,
              "phi_apply: size mismatch");
  detail::check_grid(grid);
  const MonomialVolterra op(n - 3, static_cast<int>(grid.size()) - 1);
  return op.apply(detail::phi_integrand(q, h_tilde, n, grid));
}

/// Solves the chart on one side of an axis contact at (event.s_event, event.contact_x).
[[nodiscard]] inline SingularChartRot solve_singular_rot(const HField& h, int n,
                                                         const SingularEvent& event,
                                                         int orientation, const SolverConfig& cfg,
                                                         int h_sign = 1) {
  cfg.validate();
  PMC_REQUIRE(n >= 3, ErrorCode::InvalidInput, "solve_singular_rot requires n >= 3");
  PMC_REQUIRE(event.kind == EventKind::AxisContact, ErrorCode::InvalidInput,
              "solve_singular_rot needs an axis contact");
  PMC_REQUIRE(orientation == 1 || orientation == -1, ErrorCode::InvalidInput,
              "orientation must be +1 or -1");
  const int N = cfg.chart_nodes;
  const MonomialVolterra op(n - 3, N);
  auto chart = detail::adapt_width(
      cfg.chart_Y_init, detail::width_floor(cfg.axis_eps), cfg,
      [&](double Y, std::string& reason) -> std::optional<SingularChart> {
        const auto u = uniform_grid(Y, N);
        auto res = detail::picard(u, 0.0, event.s_event, orientation, h_sign, h, cfg,
                                  [&](const std::vector<double>& q, const std::vector<double>& ht) {
                                    return op.apply(detail::phi_integrand(q, ht, n, u));
                                  });
        return detail::chart_from_outcome(std::move(res), Y, u, 0.0, orientation, h_sign,
                                          event.s_event, event.contact_x, reason);
      });
  SingularChartRot out;
  static_cast<SingularChart&>(out) = std::move(chart);
  out.n = n;
  return out;
}

/// Chart on the far side of the contact, in the reflected frame.
[[nodiscard]] inline SingularChartRot solve_outgoing_rot(const SingularChartRot& incoming,
                                                         const HField& h,
                                                         const SolverConfig& cfg) {
  SingularEvent ev;
  ev.kind = EventKind::AxisContact;
  ev.s_event = incoming.b;
  ev.contact_x = incoming.x_b;
  return solve_singular_rot(h, incoming.n, ev, -incoming.orientation, cfg, -incoming.h_sign);
}

/// Stitched arc-length state at u = Y/2 on the outgoing side.
[[nodiscard]] inline CurveState continue_through_axis(const SingularChartRot& incoming,
                                                      const HField& h, int n,
                                                      const SolverConfig& cfg) {
  PMC_REQUIRE(n == incoming.n, ErrorCode::InvalidInput, "dimension differs from the chart's");
  const auto out = solve_outgoing_rot(incoming, h, cfg);
  return out.state_at(out.nodes() / 2);
}

}  // namespace pmc
