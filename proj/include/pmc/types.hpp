#pragma once

#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include "pmc/error.hpp"
#include "pmc/hfield.hpp"

namespace pmc {

/// O(n-1)-type rotational hypersurface in R^n.
struct Rot {
  int n = 3;
};

/// O(l+1) x O(m+1)-type hypersurface in R^n, n = l + m + 2.
struct Product {
  int l = 1;
  int m = 1;
  [[nodiscard]] int n() const { return l + m + 2; }
};

using Geometry = std::variant<Rot, Product>;

inline void validate(const Geometry& g) {
  if (const auto* rot = std::get_if<Rot>(&g)) {
    PMC_REQUIRE(rot->n >= 3, ErrorCode::InvalidInput, "Rot geometry requires n >= 3");
  } else {
    const auto& p = std::get<Product>(g);
    PMC_REQUIRE(p.l >= 1 && p.m >= 1, ErrorCode::InvalidInput,
                "Product geometry requires l >= 1 and m >= 1");
  }
}

[[nodiscard]] inline int ambient_dimension(const Geometry& g) {
  if (const auto* rot = std::get_if<Rot>(&g)) return rot->n;
  return std::get<Product>(g).n();
}

/// One point of the arc-length parametrized generating curve.
struct CurveState {
  double s = 0.0;
  double x = 0.0;
  double y = 0.0;
  double xp = 1.0;
  double yp = 0.0;

  [[nodiscard]] double speed_defect() const { return xp * xp + yp * yp - 1.0; }
};

struct SecondDerivatives {
  double xpp = 0.0;
  double ypp = 0.0;
};

enum class EventKind { AxisContact, YAxisContact, OriginContact };

[[nodiscard]] inline const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::AxisContact: return "axis";
    case EventKind::YAxisContact: return "y_axis";
    case EventKind::OriginContact: return "origin";
  }
  return "unknown";
}

struct SingularEvent {
  EventKind kind = EventKind::AxisContact;
  double s_event = 0.0;
  double contact_x = 0.0;
  double contact_y = 0.0;
  /// x'^2 (y'^2 for y-axis contact) on the incoming side, measured where the
  /// monitored coordinate crossed its threshold.
  double incoming_slope_sq = 0.0;
  /// Integration direction in s when the event was met (+1 forward, -1 backward).
  int direction = 1;
};

struct SolverConfig {
  double rk_tol = 1e-11;
  double rk_max_step = 0.05;
  double axis_eps = 1e-5;
  double origin_eps = 1e-3;
  double picard_tol = 1e-12;
  int picard_max_iter = 200;
  double chart_Y_init = 0.05;
  double chart_Y_shrink = 0.5;
  double norm_bound_M = 20.0;
  double stitch_tol = 1e-7;
  int chart_nodes = 256;
  double max_contraction = 0.9;
  double limit_tol = 0.05;

  void validate() const {
    PMC_REQUIRE(rk_tol > 0 && rk_max_step > 0 && axis_eps > 0 && origin_eps > 0 &&
                    picard_tol > 0 && chart_Y_init > 0 && norm_bound_M > 0 && stitch_tol > 0 &&
                    limit_tol > 0,
                ErrorCode::InvalidInput, "solver tolerances must be positive");
    PMC_REQUIRE(chart_Y_shrink > 0 && chart_Y_shrink < 1, ErrorCode::InvalidInput,
                "chart_Y_shrink must lie in (0, 1)");
    PMC_REQUIRE(picard_max_iter >= 1, ErrorCode::InvalidInput, "picard_max_iter must be >= 1");
    PMC_REQUIRE(chart_nodes >= 8 && chart_nodes % 2 == 0, ErrorCode::InvalidInput,
                "chart_nodes must be even and >= 8");
    PMC_REQUIRE(max_contraction > 0 && max_contraction < 1, ErrorCode::InvalidInput,
                "max_contraction must lie in (0, 1)");
  }
};

enum class ChartKind { ArcLength, YParametrized };

struct Segment {
  std::vector<CurveState> samples;
  ChartKind chart = ChartKind::ArcLength;
  /// Sign multiplying H in this segment's frame. It flips at every axis
  /// reflection, so -1 marks the intervals where the signed solution has y < 0
  /// (or x < 0 after a y-axis contact).
  int h_sign = 1;
};

struct ProfileCurve {
  std::vector<Segment> segments;
  std::vector<SingularEvent> events;
  Geometry geometry = Rot{3};
  HField h = ConstantH{0.0};
  CurveState initial;

  /// All samples in increasing s; shared junction samples appear once.
  [[nodiscard]] std::vector<CurveState> concatenated() const {
    std::vector<CurveState> out;
    for (const auto& seg : segments) {
      for (const auto& st : seg.samples) {
        if (!out.empty() && st.s <= out.back().s) continue;
        out.push_back(st);
      }
    }
    return out;
  }

  [[nodiscard]] double s_min() const { return segments.front().samples.front().s; }
  [[nodiscard]] double s_max() const { return segments.back().samples.back().s; }
};

}  // namespace pmc
