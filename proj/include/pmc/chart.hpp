#pragma once

// y-parametrized local solutions near a singular contact and the Picard
// machinery shared by the rotational and product-type solvers.
//
// A chart is parametrized by the distance u in (0, Y] to the contact (u = y
// for axis and origin contacts). The slope q = dx/du and the arc length s(u)
// are solved together: each sweep pulls H back through the current s(u).

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "pmc/error.hpp"
#include "pmc/hfield.hpp"
#include "pmc/product_quadrature.hpp"
#include "pmc/types.hpp"

namespace pmc {

struct SingularChart {
  double Y = 0.0;
  /// Uniform nodes u_i = i Y / N; grid[0] = 0 is the contact itself.
  std::vector<double> grid;
  std::vector<double> q;
  std::vector<double> s_of_y;
  std::vector<double> x_of_y;
  /// sgn(du/ds) on this side of the contact.
  int orientation = -1;
  /// Frame sign multiplying H, so that H~(u) = orientation * h_sign * H(s(u)).
  int h_sign = 1;
  double b = 0.0;
  double x_b = 0.0;

  int iterations = 0;
  /// Largest ratio of successive Picard increments above the noise floor.
  double contraction = 0.0;
  /// sup |q - Op(q)| / u at the returned iterate.
  double fixed_point_residual = 0.0;
  /// sup |v / u| where v is the solved unknown (q, or r at an origin contact).
  double weighted_norm = 0.0;
  int y_shrinks = 0;
  std::vector<double> increments;

  [[nodiscard]] int nodes() const { return static_cast<int>(grid.size()) - 1; }

  /// Cubic Hermite interpolation of x(u) with dx/du = q.
  [[nodiscard]] double x_at(double u) const {
    PMC_REQUIRE(u >= 0.0 && u <= Y * (1.0 + 1e-12), ErrorCode::InvalidInput,
                "chart evaluation outside (0, Y]");
    const double du = Y / nodes();
    int j = std::min(static_cast<int>(u / du), nodes() - 1);
    const double t = (u - grid[j]) / du;
    const double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
    const double h10 = t * (1 - t) * (1 - t);
    const double h01 = t * t * (3 - 2 * t);
    const double h11 = t * t * (t - 1);
    return h00 * x_of_y[j] + h10 * du * q[j] + h01 * x_of_y[j + 1] + h11 * du * q[j + 1];
  }

  /// Arc-length state at node i, tangent oriented by increasing s.
  [[nodiscard]] CurveState state_at(int i) const {
    const double w = 1.0 / std::sqrt(1.0 + q[i] * q[i]);
    return {s_of_y[i], x_of_y[i], grid[i], q[i] * orientation * w, orientation * w};
  }
};

namespace detail {

enum class PicardStatus { Converged, NormExceeded, NotContracting, NotConverged };

inline const char* to_string(PicardStatus st) {
  switch (st) {
    case PicardStatus::Converged: return "converged";
    case PicardStatus::NormExceeded: return "norm bound exceeded";
    case PicardStatus::NotContracting: return "contraction factor too large";
    case PicardStatus::NotConverged: return "iteration limit reached";
  }
  return "unknown";
}

struct PicardOutcome {
  PicardStatus status = PicardStatus::NotConverged;
  std::vector<double> v;
  std::vector<double> s;
  int iterations = 0;
  double contraction = 0.0;
  double residual = 0.0;
  double norm = 0.0;
  std::vector<double> increments;
};

inline double weighted_sup(const std::vector<double>& a, const std::vector<double>& b,
                           const std::vector<double>& u) {
  double out = 0.0;
  for (std::size_t i = 1; i < u.size(); ++i) out = std::max(out, std::abs(a[i] - b[i]) / u[i]);
  return out;
}

inline std::vector<double> arc_length_of(const std::vector<double>& u, const std::vector<double>& v,
                                         double q_shift, double b, int orientation) {
  std::vector<double> speed(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double q = q_shift + v[i];
    speed[i] = std::sqrt(1.0 + q * q);
  }
  auto s = cumulative_trapezoid(u, speed);
  for (double& si : s) si = b + orientation * si;
  return s;
}

inline std::vector<double> pull_back_h(const std::vector<double>& s, const HField& h,
                                       int orientation, int h_sign) {
  std::vector<double> out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = orientation * h_sign * eval_H(h, s[i]);
  return out;
}

/// Self-consistent Picard iteration v <- Op(v; H~(s(v))) from v = 0, where the
/// chart slope is q = q_shift + v.
inline PicardOutcome picard(const std::vector<double>& u, double q_shift, double b,
                            int orientation, int h_sign, const HField& h, const SolverConfig& cfg,
                            const std::function<std::vector<double>(const std::vector<double>&,
                                                                    const std::vector<double>&)>&
                                apply) {
  PicardOutcome out;
  const double noise_floor = 1e3 * cfg.picard_tol;
  std::vector<double> v(u.size(), 0.0);
  double prev = std::numeric_limits<double>::quiet_NaN();
  for (int it = 1; it <= cfg.picard_max_iter; ++it) {
    const auto s = arc_length_of(u, v, q_shift, b, orientation);
    auto next = apply(v, pull_back_h(s, h, orientation, h_sign));
    const double incr = weighted_sup(next, v, u);
    out.increments.push_back(incr);
    out.iterations = it;
    double norm = 0.0;
    for (std::size_t i = 1; i < u.size(); ++i) norm = std::max(norm, std::abs(next[i]) / u[i]);
    out.norm = norm;
    v = std::move(next);
    if (!(norm <= cfg.norm_bound_M)) {
      out.status = PicardStatus::NormExceeded;
      return out;
    }
    if (std::isfinite(prev) && prev > noise_floor)
      out.contraction = std::max(out.contraction, incr / prev);
    prev = incr;
    if (incr < cfg.picard_tol) {
      out.status = PicardStatus::Converged;
      break;
    }
  }
  out.v = v;
  out.s = arc_length_of(u, v, q_shift, b, orientation);
  out.residual = weighted_sup(v, apply(v, pull_back_h(out.s, h, orientation, h_sign)), u);
  if (out.status == PicardStatus::Converged && out.contraction > cfg.max_contraction)
    out.status = PicardStatus::NotContracting;
  return out;
}

/// Tries chart widths Y0, Y0*shrink, ... until `attempt` succeeds; `attempt`
/// returns nullopt plus a reason to request a smaller width.
inline SingularChart adapt_width(double Y0, double y_floor, const SolverConfig& cfg,
                                 const std::function<std::optional<SingularChart>(double, std::string&)>&
                                     attempt) {
  std::string reason = "initial width below floor";
  int shrinks = 0;
  for (double Y = Y0; Y >= y_floor; Y *= cfg.chart_Y_shrink, ++shrinks) {
    std::optional<SingularChart> chart;
    try {
      chart = attempt(Y, reason);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DenominatorVanished) throw;
      reason = e.what();
    }
    if (chart) {
      chart->y_shrinks = shrinks;
      return *std::move(chart);
    }
  }
  throw Error(ErrorCode::ChartWidthUnderflow,
              "chart width fell below " + std::to_string(y_floor) + " (last failure: " + reason + ")");
}

inline std::optional<SingularChart> chart_from_outcome(PicardOutcome&& res, double Y,
                                                       const std::vector<double>& u,
                                                       double q_shift, int orientation, int h_sign,
                                                       double b, double x_b, std::string& reason) {
  if (res.status != PicardStatus::Converged) {
    reason = to_string(res.status);
    return std::nullopt;
  }
  SingularChart c;
  c.Y = Y;
  c.grid = u;
  c.q.resize(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) c.q[i] = q_shift + res.v[i];
  c.s_of_y = std::move(res.s);
  c.x_of_y = cumulative_trapezoid(u, c.q);
  for (double& x : c.x_of_y) x += x_b;
  c.orientation = orientation;
  c.h_sign = h_sign;
  c.b = b;
  c.x_b = x_b;
  c.iterations = res.iterations;
  c.contraction = res.contraction;
  c.fixed_point_residual = res.residual;
  c.weighted_norm = res.norm;
  c.increments = std::move(res.increments);
  return c;
}

inline double width_floor(double guard) {
  return std::max(4.0 * guard * (1.0 + 1e-9), 1e3 * std::numeric_limits<double>::epsilon());
}

inline void check_grid(const std::vector<double>& u) {
  PMC_REQUIRE(u.size() >= 2 && u.front() == 0.0, ErrorCode::InvalidInput,
              "chart grid must start at the contact u = 0");
  const double du = u.back() / (u.size() - 1);
  for (std::size_t i = 1; i < u.size(); ++i)
    PMC_REQUIRE(std::abs(u[i] - du * i) <= 1e-12 * u.back(), ErrorCode::InvalidInput,
                "chart grid must be uniform");
}

}  // namespace detail
}  // namespace pmc
