#pragma once

// Arc-length integration of the generating-curve ODE away from the singular
// set, with detection and refinement of axis / origin approaches.
//
// The second-order system is carried through the planar curvature kappa:
// (x'', y'') = kappa (-y', x'), so the unit-speed constraint is structural and
// only rounding drift remains, which is projected away after every step.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "pmc/error.hpp"
#include "pmc/hfield.hpp"
#include "pmc/types.hpp"

namespace pmc {

struct Derivative {
  double dx = 0.0;
  double dy = 0.0;
  double dxp = 0.0;
  double dyp = 0.0;
};

/// Curvature kappa solved from the governing equation at a state.
[[nodiscard]] inline double curvature(const CurveState& st, const Geometry& g, double h_val) {
  if (const auto* rot = std::get_if<Rot>(&g)) {
    return (rot->n - 2) * st.xp / st.y - (rot->n - 1) * h_val;
  }
  const auto& p = std::get<Product>(g);
  return p.m * st.xp / st.y - p.l * st.yp / st.x - (p.n() - 1) * h_val;
}

namespace detail {

[[nodiscard]] inline bool admissible(const CurveState& st, const Geometry& g, double guard) {
  if (!(std::isfinite(st.x) && std::isfinite(st.y) && std::isfinite(st.xp) &&
        std::isfinite(st.yp)))
    return false;
  if (std::holds_alternative<Rot>(g)) return st.y > guard;
  return st.x > guard && st.y > guard;
}

[[nodiscard]] inline Derivative field_unchecked(const CurveState& st, const Geometry& g,
                                                const HField& h, int h_sign) {
  const double kappa = curvature(st, g, h_sign * eval_H(h, st.s));
  return {st.xp, st.yp, -kappa * st.yp, kappa * st.xp};
}

}  // namespace detail

/// First-order field d/ds (x, y, x', y'). `h_sign` multiplies H (frame sign
/// after reflections); `guard` is the minimum admissible distance to the axes.
[[nodiscard]] inline Derivative derivative_field(const CurveState& st, const Geometry& g,
                                                 const HField& h, int h_sign = 1,
                                                 double guard = 0.0) {
  if (std::holds_alternative<Rot>(g)) {
    PMC_REQUIRE(std::abs(st.y) > guard, ErrorCode::DivisionByAxis,
                "derivative_field: y inside the axis guard");
  } else {
    PMC_REQUIRE(std::abs(st.x) > guard && std::abs(st.y) > guard, ErrorCode::DivisionByAxis,
                "derivative_field: x or y inside the axis guard");
  }
  return detail::field_unchecked(st, g, h, h_sign);
}

struct EventDetection {
  bool triggered = false;
  EventKind kind = EventKind::AxisContact;
  /// Bracket in the order of travel: monitor above threshold at `left`, below at `right`.
  CurveState left;
  CurveState right;
  [[nodiscard]] std::array<double, 2> s_bracket() const { return {left.s, right.s}; }
};

struct IntegrationResult {
  std::vector<CurveState> samples;
  EventDetection detection;
};

namespace detail {

// Dormand-Prince 5(4) tableau
struct DormandPrince {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  // b - b*, where b* is the embedded 4th-order row
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
};

using Vec4 = std::array<double, 4>;

inline Vec4 to_vec(const Derivative& d) { return {d.dx, d.dy, d.dxp, d.dyp}; }
inline Vec4 to_vec(const CurveState& st) { return {st.x, st.y, st.xp, st.yp}; }
inline CurveState from_vec(double s, const Vec4& v) { return {s, v[0], v[1], v[2], v[3]}; }

inline Vec4 axpy(const Vec4& base, double h, std::initializer_list<std::pair<double, Vec4>> terms) {
  Vec4 out = base;
  for (const auto& [coef, k] : terms)
    for (int i = 0; i < 4; ++i) out[i] += h * coef * k[i];
  return out;
}

struct StepResult {
  bool ok = false;
  CurveState next;
  double err = std::numeric_limits<double>::infinity();
};

/// One Dormand-Prince step; `ok` is false when a stage leaves the admissible region.
inline StepResult dp_step(const CurveState& st, double h, const Geometry& g, const HField& hf,
                          int h_sign, double tol) {
  using T = DormandPrince;
  auto eval = [&](double s, const Vec4& v, Vec4& out) {
    const CurveState trial = from_vec(s, v);
    if (!admissible(trial, g, 0.0)) return false;
    out = to_vec(field_unchecked(trial, g, hf, h_sign));
    for (double c : out)
      if (!std::isfinite(c)) return false;
    return true;
  };
  const Vec4 y0 = to_vec(st);
  Vec4 k1, k2, k3, k4, k5, k6, k7;
  StepResult res;
  if (!eval(st.s, y0, k1)) return res;
  if (!eval(st.s + T::c2 * h, axpy(y0, h, {{T::a21, k1}}), k2)) return res;
  if (!eval(st.s + T::c3 * h, axpy(y0, h, {{T::a31, k1}, {T::a32, k2}}), k3)) return res;
  if (!eval(st.s + T::c4 * h, axpy(y0, h, {{T::a41, k1}, {T::a42, k2}, {T::a43, k3}}), k4))
    return res;
  if (!eval(st.s + T::c5 * h,
            axpy(y0, h, {{T::a51, k1}, {T::a52, k2}, {T::a53, k3}, {T::a54, k4}}), k5))
    return res;
  if (!eval(st.s + h,
            axpy(y0, h, {{T::a61, k1}, {T::a62, k2}, {T::a63, k3}, {T::a64, k4}, {T::a65, k5}}),
            k6))
    return res;
  const Vec4 y1 =
      axpy(y0, h, {{T::b1, k1}, {T::b3, k3}, {T::b4, k4}, {T::b5, k5}, {T::b6, k6}});
  if (!eval(st.s + h, y1, k7)) return res;
  double acc = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double e = h * (T::e1 * k1[i] + T::e3 * k3[i] + T::e4 * k4[i] + T::e5 * k5[i] +
                          T::e6 * k6[i] + T::e7 * k7[i]);
    const double scale = tol * (1.0 + std::max(std::abs(y0[i]), std::abs(y1[i])));
    acc += (e / scale) * (e / scale);
  }
  res.err = std::sqrt(acc / 4.0);
  CurveState next = from_vec(st.s + h, y1);
  // project the tangent back onto the unit circle
  const double norm = std::hypot(next.xp, next.yp);
  next.xp /= norm;
  next.yp /= norm;
  res.next = next;
  res.ok = std::isfinite(res.err) && admissible(next, g, 0.0);
  return res;
}

inline std::optional<EventKind> monitor(const CurveState& st, const Geometry& g,
                                        const SolverConfig& cfg) {
  if (std::holds_alternative<Rot>(g)) {
    if (st.y < cfg.axis_eps) return EventKind::AxisContact;
    return std::nullopt;
  }
  if (st.x * st.x + st.y * st.y < cfg.origin_eps * cfg.origin_eps) return EventKind::OriginContact;
  if (st.y < cfg.axis_eps) return EventKind::AxisContact;
  if (st.x < cfg.axis_eps) return EventKind::YAxisContact;
  return std::nullopt;
}

}  // namespace detail

/// Adaptive Dormand-Prince integration from `start` towards `s_limit` (either
/// direction) until the limit or until the curve enters an axis / origin
/// neighbourhood. Every accepted step is returned.
[[nodiscard]] inline IntegrationResult integrate_until_event(const CurveState& start,
                                                             const Geometry& g, const HField& h,
                                                             double s_limit,
                                                             const SolverConfig& cfg,
                                                             int h_sign = 1) {
  PMC_REQUIRE(std::abs(start.speed_defect()) <= 1e-9, ErrorCode::InvalidInput,
              "start state violates x'^2 + y'^2 = 1");
  PMC_REQUIRE(detail::admissible(start, g, 0.0) && !detail::monitor(start, g, cfg),
              ErrorCode::InvalidInput, "start state is not strictly inside the admissible region");

  IntegrationResult out;
  out.samples.push_back(start);
  const double dir = s_limit >= start.s ? 1.0 : -1.0;
  double step = std::min(cfg.rk_max_step, 1e-3);
  double err_prev = 1.0;
  CurveState cur = start;

  while (dir * (s_limit - cur.s) > 0.0) {
    const double remaining = std::abs(s_limit - cur.s);
    const bool last = step >= remaining;
    const double hs = dir * (last ? remaining : step);
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() *
                         std::max(1.0, std::abs(cur.s));
    if (std::abs(hs) < floor) {
      if (remaining < floor) break;
      throw Error(ErrorCode::StepSizeUnderflow,
                  "step size underflow at s = " + std::to_string(cur.s) +
                      " (likely an unhandled singularity)");
    }
    const auto res = detail::dp_step(cur, hs, g, h, h_sign, cfg.rk_tol);
    if (!res.ok) {
      step = std::abs(hs) * 0.25;
      continue;
    }
    if (res.err > 1.0) {
      step = std::abs(hs) * std::clamp(0.9 * std::pow(res.err, -0.2), 0.1, 0.9);
      continue;
    }
    // PI step-size control
    const double err = std::max(res.err, 1e-10);
    const double factor = std::clamp(0.9 * std::pow(err, -0.7 / 5.0) * std::pow(err_prev, 0.4 / 5.0),
                                     0.2, 5.0);
    err_prev = err;
    CurveState next = res.next;
    if (last) next.s = s_limit;
    out.samples.push_back(next);
    if (auto kind = detail::monitor(next, g, cfg)) {
      out.detection = {true, *kind, cur, next};
      return out;
    }
    cur = next;
    step = std::min(cfg.rk_max_step, std::abs(hs) * factor);
  }
  return out;
}

namespace detail {

struct RefinedEvent {
  SingularEvent event;
  /// Integrated state where the monitored coordinate equals its threshold.
  CurveState crossing;
};

/// Locates the threshold crossing inside the detection bracket and
/// extrapolates to the contact with the local chart q = x'/y' = a u + b u^2 in
/// the distance u to the axis, fitted to q and dq/du = -kappa / y'^3 at the
/// crossing, so x_b = x* - (a u*^2/2 + b u*^3/3) and
/// s_b = s* + u* + a^2 u*^3/6 + a b u*^4/4 up to O(u*^4).
inline RefinedEvent refine(const EventDetection& det, const Geometry& g, const HField& h,
                           const SolverConfig& cfg, int h_sign) {
  PMC_REQUIRE(det.triggered, ErrorCode::InvalidInput, "refine_event called without a detection");
  const double threshold = det.kind == EventKind::OriginContact ? cfg.origin_eps : cfg.axis_eps;
  auto measure = [&](const CurveState& st) {
    switch (det.kind) {
      case EventKind::AxisContact: return st.y;
      case EventKind::YAxisContact: return st.x;
      case EventKind::OriginContact: return std::hypot(st.x, st.y);
    }
    return st.y;
  };
  const double full = det.right.s - det.left.s;
  const double dir = full >= 0 ? 1.0 : -1.0;

  // bisection on the length of a single step from the left bracket end
  double lo = 0.0;
  double hi = std::abs(full);
  CurveState crossing = det.right;
  for (int it = 0; it < 200 && hi - lo > 0.1 * cfg.rk_tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const auto res = detail::dp_step(det.left, dir * mid, g, h, h_sign, cfg.rk_tol);
    if (res.ok && measure(res.next) >= threshold) {
      lo = mid;
    } else {
      hi = mid;
      if (res.ok) crossing = res.next;
    }
  }
  {
    const auto res = detail::dp_step(det.left, dir * lo, g, h, h_sign, cfg.rk_tol);
    if (res.ok && lo > 0.0) crossing = res.next;
    if (lo == 0.0) crossing = det.left;
  }

  // coefficients (a, b) of q(u) = a u + b u^2 from q and dq/du at u
  auto fit = [](double u, double q, double dq) {
    return std::pair{(2.0 * q - dq * u) / u, (dq * u - q) / (u * u)};
  };
  const double kappa = curvature(crossing, g, h_sign * eval_H(h, crossing.s));

  SingularEvent ev;
  ev.kind = det.kind;
  ev.direction = dir > 0 ? 1 : -1;
  switch (det.kind) {
    case EventKind::AxisContact: {
      const double u = crossing.y;
      const double q = crossing.xp / crossing.yp;
      const auto [a, b] = fit(u, q, -kappa / std::pow(crossing.yp, 3));
      ev.s_event = crossing.s + dir * (u + a * a * u * u * u / 6.0 + a * b * u * u * u * u / 4.0);
      ev.contact_x = crossing.x - (a * u * u / 2.0 + b * u * u * u / 3.0);
      ev.contact_y = 0.0;
      ev.incoming_slope_sq = crossing.xp * crossing.xp;
      PMC_REQUIRE(ev.incoming_slope_sq <= cfg.limit_tol, ErrorCode::LimitMismatch,
                  "axis approach with x'^2 = " + std::to_string(ev.incoming_slope_sq) +
                      " (expected -> 0)");
      break;
    }
    case EventKind::YAxisContact: {
      const double u = crossing.x;
      const double q = crossing.yp / crossing.xp;
      const auto [a, b] = fit(u, q, kappa / std::pow(crossing.xp, 3));
      ev.s_event = crossing.s + dir * (u + a * a * u * u * u / 6.0 + a * b * u * u * u * u / 4.0);
      ev.contact_x = 0.0;
      ev.contact_y = crossing.y - (a * u * u / 2.0 + b * u * u * u / 3.0);
      ev.incoming_slope_sq = crossing.yp * crossing.yp;
      PMC_REQUIRE(ev.incoming_slope_sq <= cfg.limit_tol, ErrorCode::LimitMismatch,
                  "y-axis approach with y'^2 = " + std::to_string(ev.incoming_slope_sq) +
                      " (expected -> 0)");
      break;
    }
    case EventKind::OriginContact: {
      const auto& p = std::get<Product>(g);
      const double r = std::hypot(crossing.x, crossing.y);
      ev.s_event = crossing.s + dir * r;
      ev.contact_x = 0.0;
      ev.contact_y = 0.0;
      ev.incoming_slope_sq = crossing.xp * crossing.xp;
      const double target = static_cast<double>(p.l) / (p.l + p.m);
      PMC_REQUIRE(std::abs(ev.incoming_slope_sq - target) <= cfg.limit_tol,
                  ErrorCode::LimitMismatch,
                  "origin approach with x'^2 = " + std::to_string(ev.incoming_slope_sq) +
                      ", expected l/(l+m) = " + std::to_string(target));
      break;
    }
  }
  return {ev, crossing};
}

}  // namespace detail

[[nodiscard]] inline SingularEvent refine_event(const EventDetection& det, const Geometry& g,
                                                const HField& h, const SolverConfig& cfg,
                                                int h_sign = 1) {
  return detail::refine(det, g, h, cfg, h_sign).event;
}

}  // namespace pmc
