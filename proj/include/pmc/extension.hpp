#pragma once

// Global extension of a generating curve across axis and origin contacts.
//
// The engine works in the reflected frame: the integrated curve always stays
// in the admissible region (y > 0, resp. x, y > 0) and each segment carries
// the sign multiplying H there. Crossing an axis reflects the frame and flips
// the sign; passing the origin is a point reflection and keeps it. Exported y
// is therefore |y| of the smooth signed continuation.

#include <algorithm>
#include <cmath>
#include <future>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "pmc/chart.hpp"
#include "pmc/error.hpp"
#include "pmc/hfield.hpp"
#include "pmc/integrator.hpp"
#include "pmc/singular_lm.hpp"
#include "pmc/singular_rot.hpp"
#include "pmc/types.hpp"

namespace pmc {

struct RunSpec {
  Geometry geometry = Rot{3};
  HField h = ConstantH{0.0};
  CurveState initial{0.0, 0.0, 1.0, 1.0, 0.0};
  double s_lo = 0.0;
  double s_hi = 1.0;
  SolverConfig cfg;
  /// Output spacing; 0 keeps the raw integrator steps and chart nodes.
  double sample_ds = 0.0;

  void validate() const {
    pmc::validate(geometry);
    cfg.validate();
    PMC_REQUIRE(s_lo <= initial.s && initial.s <= s_hi, ErrorCode::InvalidInput,
                "initial s must lie inside the window");
    PMC_REQUIRE(std::abs(initial.speed_defect()) <= 1e-9, ErrorCode::InvalidInput,
                "initial tangent must have unit length");
    PMC_REQUIRE(sample_ds >= 0.0, ErrorCode::InvalidInput, "sample_ds must be >= 0");
    if (std::holds_alternative<Rot>(geometry)) {
      PMC_REQUIRE(initial.y > 0.0, ErrorCode::InvalidInput, "Rot runs need y0 > 0");
    } else {
      PMC_REQUIRE(initial.x > 0.0 && initial.y > 0.0, ErrorCode::InvalidInput,
                  "Product runs need x0 > 0 and y0 > 0");
    }
  }
};

/// Position and tangent of a curve interpolated at one s.
[[nodiscard]] inline CurveState interpolate_segment(const Segment& seg, const Geometry& g,
                                                    const HField& h, double s) {
  const auto& pts = seg.samples;
  PMC_REQUIRE(!pts.empty(), ErrorCode::InvalidInput, "empty segment");
  if (pts.size() == 1 || s <= pts.front().s) return pts.front();
  if (s >= pts.back().s) return pts.back();
  auto it = std::upper_bound(pts.begin(), pts.end(), s,
                             [](double v, const CurveState& st) { return v < st.s; });
  const CurveState& a = *(it - 1);
  const CurveState& b = *it;
  const double dh = b.s - a.s;
  const double t = (s - a.s) / dh;
  const double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
  const double h10 = t * (1 - t) * (1 - t);
  const double h01 = t * t * (3 - 2 * t);
  const double h11 = t * t * (t - 1);
  CurveState out;
  out.s = s;
  out.x = h00 * a.x + h10 * dh * a.xp + h01 * b.x + h11 * dh * b.xp;
  out.y = h00 * a.y + h10 * dh * a.yp + h01 * b.y + h11 * dh * b.yp;
  bool smooth = seg.chart == ChartKind::ArcLength;
  double ka = 0.0;
  double kb = 0.0;
  if (smooth) {
    ka = curvature(a, g, seg.h_sign * eval_H(h, a.s));
    kb = curvature(b, g, seg.h_sign * eval_H(h, b.s));
    smooth = std::isfinite(ka) && std::isfinite(kb);
  }
  if (smooth) {
    out.xp = h00 * a.xp - h10 * dh * ka * a.yp + h01 * b.xp - h11 * dh * kb * b.yp;
    out.yp = h00 * a.yp + h10 * dh * ka * a.xp + h01 * b.yp + h11 * dh * kb * b.xp;
  } else {
    out.xp = (1 - t) * a.xp + t * b.xp;
    out.yp = (1 - t) * a.yp + t * b.yp;
  }
  const double norm = std::hypot(out.xp, out.yp);
  out.xp /= norm;
  out.yp /= norm;
  return out;
}

/// Segment and state at arc length s (the first segment containing s wins).
[[nodiscard]] inline std::pair<std::size_t, CurveState> locate(const ProfileCurve& curve,
                                                               double s) {
  PMC_REQUIRE(!curve.segments.empty(), ErrorCode::InvalidInput, "empty curve");
  PMC_REQUIRE(s >= curve.s_min() - 1e-12 && s <= curve.s_max() + 1e-12, ErrorCode::InvalidInput,
              "s = " + std::to_string(s) + " lies outside the computed curve");
  for (std::size_t i = 0; i < curve.segments.size(); ++i) {
    const auto& seg = curve.segments[i];
    if (s <= seg.samples.back().s || i + 1 == curve.segments.size())
      return {i, interpolate_segment(seg, curve.geometry, curve.h, s)};
  }
  return {0, curve.initial};
}

[[nodiscard]] inline CurveState interpolate(const ProfileCurve& curve, double s) {
  return locate(curve, s).second;
}

/// Samples every segment on the global lattice s_lo + k ds, keeping segment
/// end points so that contacts and junctions stay in the output.
[[nodiscard]] inline ProfileCurve resample(const ProfileCurve& curve, double ds, double s_origin) {
  PMC_REQUIRE(ds > 0.0, ErrorCode::InvalidInput, "sample spacing must be positive");
  ProfileCurve out = curve;
  for (auto& seg : out.segments) {
    const auto& src = seg.samples;
    std::vector<CurveState> pts;
    pts.push_back(src.front());
    const double a = src.front().s;
    const double b = src.back().s;
    auto k = static_cast<long long>(std::floor((a - s_origin) / ds)) + 1;
    for (;; ++k) {
      const double s = s_origin + static_cast<double>(k) * ds;
      if (s >= b) break;
      if (s <= a) continue;
      Segment tmp{src, seg.chart, seg.h_sign};
      pts.push_back(interpolate_segment(tmp, curve.geometry, curve.h, s));
    }
    if (src.size() > 1) pts.push_back(src.back());
    seg.samples = std::move(pts);
  }
  return out;
}

namespace detail {

struct Walk {
  std::vector<Segment> segments;
  std::vector<SingularEvent> events;
  std::vector<double> stitch_defects;
};

inline CurveState swap_xy(const CurveState& st) { return {st.s, st.y, st.x, st.yp, st.xp}; }

/// Chart nodes 0..last as arc-length states in travel order. `swapped`
/// undoes the x <-> y exchange used for y-axis contacts.
inline std::vector<CurveState> chart_states(const SingularChart& c, int last, bool reverse,
                                            bool swapped) {
  std::vector<CurveState> out;
  for (int i = 0; i <= last; ++i) {
    const auto st = c.state_at(i);
    out.push_back(swapped ? swap_xy(st) : st);
  }
  if (reverse) std::reverse(out.begin(), out.end());
  return out;
}

/// Largest |x_sample - x_chart(u)| over the final approach inside the chart.
inline double overlap_defect(const std::vector<CurveState>& incoming, const SingularChart& c,
                             EventKind kind, double guard) {
  double worst = 0.0;
  for (auto it = incoming.rbegin(); it != incoming.rend(); ++it) {
    const double u = kind == EventKind::YAxisContact ? it->x : it->y;
    const double w = kind == EventKind::YAxisContact ? it->y : it->x;
    if (u > c.Y) break;
    if (u < guard) continue;
    worst = std::max(worst, std::abs(w - c.x_at(u)));
  }
  return worst;
}

/// Arc length from the contact to u on a chart, sign-free.
inline double chart_arc_to(const SingularChart& c, double u) {
  const double du = c.Y / c.nodes();
  const int j = std::min(static_cast<int>(u / du), c.nodes() - 1);
  const double t = (u - c.grid[j]) / du;
  const double sj = std::abs(c.s_of_y[j] - c.b);
  const double sk = std::abs(c.s_of_y[j + 1] - c.b);
  return (1 - t) * sj + t * sk;
}

inline Walk walk(const RunSpec& spec, int dir) {
  Walk w;
  const auto& g = spec.geometry;
  const auto& h = spec.h;
  const auto& cfg = spec.cfg;
  const double s_end = dir > 0 ? spec.s_hi : spec.s_lo;
  CurveState cur = spec.initial;
  int h_sign = 1;
  const int half = cfg.chart_nodes / 2;
  const bool backward = dir < 0;

  while (dir * (s_end - cur.s) > 0.0) {
    try {
      auto res = integrate_until_event(cur, g, h, s_end, cfg, h_sign);
      const auto incoming = res.samples;
      w.segments.push_back({std::move(res.samples), ChartKind::ArcLength, h_sign});
      if (!res.detection.triggered) break;

      const auto refined = refine(res.detection, g, h, cfg, h_sign);
      SingularEvent ev = refined.event;
      if (!w.events.empty())
        PMC_REQUIRE(std::abs(ev.s_event - w.events.back().s_event) >= 10.0 * cfg.axis_eps,
                    ErrorCode::EventAccumulation,
                    "two contacts within 10 axis_eps of arc length");
      const int o_in = -dir;
      const bool swapped = ev.kind == EventKind::YAxisContact;
      SingularChart in_chart;
      SingularChart out_chart;
      int out_sign = h_sign;

      if (const auto* rot = std::get_if<Rot>(&g)) {
        auto a = solve_singular_rot(h, rot->n, ev, o_in, cfg, h_sign);
        auto b = solve_outgoing_rot(a, h, cfg);
        out_sign = b.h_sign;
        in_chart = std::move(a);
        out_chart = std::move(b);
      } else {
        const auto& p = std::get<Product>(g);
        if (ev.kind == EventKind::OriginContact) {
          auto a = solve_case_b(h, p.l, p.m, ev, o_in, cfg, h_sign);
          // re-anchor the contact with the chart's own arc length
          const double b_chart = refined.crossing.s + dir * chart_arc_to(a, refined.crossing.y);
          if (is_constant(h)) {
            for (double& s : a.s_of_y) s += b_chart - a.b;
            a.b = b_chart;
            ev.s_event = b_chart;
          } else {
            ev.s_event = b_chart;
            a = solve_case_b(h, p.l, p.m, ev, o_in, cfg, h_sign);
          }
          auto b = solve_outgoing_lm(a, h, cfg);
          out_sign = b.h_sign;
          in_chart = std::move(a);
          out_chart = std::move(b);
        } else if (ev.kind == EventKind::AxisContact) {
          auto a = solve_case_a(h, p.l, p.m, ev, o_in, cfg, h_sign);
          auto b = solve_outgoing_lm(a, h, cfg);
          out_sign = b.h_sign;
          in_chart = std::move(a);
          out_chart = std::move(b);
        } else {
          // y-axis contact: exchange the coordinates, which maps (l, m, H) to (m, l, -H)
          SingularEvent sw = ev;
          sw.kind = EventKind::AxisContact;
          sw.contact_x = ev.contact_y;
          auto a = solve_case_a(h, p.m, p.l, sw, o_in, cfg, -h_sign);
          auto b = solve_outgoing_lm(a, h, cfg);
          out_sign = -b.h_sign;
          in_chart = std::move(a);
          out_chart = std::move(b);
        }
      }
      const double guard = ev.kind == EventKind::OriginContact ? 0.0 : cfg.axis_eps;
      w.stitch_defects.push_back(overlap_defect(incoming, in_chart, ev.kind, guard));

      if (dir * (ev.s_event - s_end) >= 0.0) {
        w.events.push_back(ev);
        break;
      }
      // incoming piece: last regular sample down to the contact
      Segment in_seg{{incoming.back()}, ChartKind::YParametrized, h_sign};
      in_seg.samples.push_back(swapped ? swap_xy(in_chart.state_at(0)) : in_chart.state_at(0));
      auto out_pts = chart_states(out_chart, half, false, swapped);
      // the outgoing piece is cut at the window edge
      std::vector<CurveState> kept;
      for (const auto& st : out_pts) {
        if (dir * (st.s - s_end) > 0.0) break;
        kept.push_back(st);
      }
      w.events.push_back(ev);
      w.segments.push_back(std::move(in_seg));
      const bool reached_end = kept.size() < out_pts.size();
      w.segments.push_back({std::move(kept), ChartKind::YParametrized, out_sign});
      if (reached_end) break;
      cur = out_pts.back();
      h_sign = out_sign;
    } catch (const Error& e) {
      throw Error(e.code(), std::string(e.what()) + " [near s = " + std::to_string(cur.s) + "]");
    }
  }
  if (backward) {
    std::reverse(w.segments.begin(), w.segments.end());
    for (auto& seg : w.segments) std::reverse(seg.samples.begin(), seg.samples.end());
    std::reverse(w.events.begin(), w.events.end());
    std::reverse(w.stitch_defects.begin(), w.stitch_defects.end());
  }
  return w;
}

}  // namespace detail

/// Extends the curve over [s_lo, s_hi], alternating regular integration and
/// singular charts. Largest chart/arc-length overlap mismatch per event is
/// reported in `stitch_defects` (aligned with `events`).
struct ExtensionResult {
  ProfileCurve curve;
  std::vector<double> stitch_defects;
};

[[nodiscard]] inline ExtensionResult extend_with_diagnostics(const RunSpec& spec) {
  spec.validate();
  ExtensionResult out;
  auto& curve = out.curve;
  curve.geometry = spec.geometry;
  curve.h = spec.h;
  curve.initial = spec.initial;
  auto back = detail::walk(spec, -1);
  auto fwd = detail::walk(spec, +1);
  for (auto& seg : back.segments)
    if (seg.samples.size() > 1) curve.segments.push_back(std::move(seg));
  for (auto& seg : fwd.segments)
    if (seg.samples.size() > 1) curve.segments.push_back(std::move(seg));
  if (curve.segments.empty()) curve.segments.push_back({{spec.initial}, ChartKind::ArcLength, 1});
  curve.events = std::move(back.events);
  curve.events.insert(curve.events.end(), fwd.events.begin(), fwd.events.end());
  out.stitch_defects = std::move(back.stitch_defects);
  out.stitch_defects.insert(out.stitch_defects.end(), fwd.stitch_defects.begin(),
                            fwd.stitch_defects.end());
  if (spec.sample_ds > 0.0) curve = resample(curve, spec.sample_ds, spec.s_lo);
  return out;
}

[[nodiscard]] inline ProfileCurve extend(const RunSpec& spec) {
  return extend_with_diagnostics(spec).curve;
}

/// Family Gamma_c: one extension per c from (0, c) with horizontal tangent.
[[nodiscard]] inline std::map<double, ProfileCurve> sweep(const RunSpec& spec_template,
                                                          const std::vector<double>& c_values) {
  PMC_REQUIRE(std::holds_alternative<Rot>(spec_template.geometry), ErrorCode::InvalidInput,
              "sweep is defined for Rot geometries");
  std::vector<std::future<ProfileCurve>> jobs;
  jobs.reserve(c_values.size());
  for (double c : c_values) {
    RunSpec spec = spec_template;
    spec.initial = {0.0, 0.0, c, 1.0, 0.0};
    jobs.push_back(std::async(std::launch::async, [spec] { return extend(spec); }));
  }
  std::map<double, ProfileCurve> out;
  for (std::size_t i = 0; i < c_values.size(); ++i) out.emplace(c_values[i], jobs[i].get());
  return out;
}

}  // namespace pmc
