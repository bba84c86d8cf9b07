#pragma once

// Text formats: sample CSV, event JSON, run specs/manifests, SVG profile plots.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pmc/error.hpp"
#include "pmc/extension.hpp"
#include "pmc/hfield.hpp"
#include "pmc/types.hpp"

namespace pmc {

inline constexpr const char* kCsvHeader = "s,x,y,xp,yp,segment,chart";
inline constexpr const char* kVersion = "0.1.0";

/// Shortest-safe decimal form with 17 significant digits.
inline std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 17);
  return {buf.data(), res.ptr};
}

inline void write_csv(std::ostream& os, const ProfileCurve& curve) {
  os << kCsvHeader << '\n';
  double last = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < curve.segments.size(); ++i) {
    const auto& seg = curve.segments[i];
    const char* chart = seg.chart == ChartKind::ArcLength ? "arc" : "chart";
    for (const auto& st : seg.samples) {
      if (st.s <= last) continue;
      last = st.s;
      os << format_double(st.s) << ',' << format_double(st.x) << ',' << format_double(st.y) << ','
         << format_double(st.xp) << ',' << format_double(st.yp) << ',' << i << ',' << chart
         << '\n';
    }
  }
}

struct CsvRow {
  CurveState state;
  int segment = 0;
  std::string chart;
};

inline std::vector<CsvRow> read_csv(std::istream& is) {
  std::string line;
  PMC_REQUIRE(static_cast<bool>(std::getline(is, line)), ErrorCode::InvalidInput, "empty CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  PMC_REQUIRE(line == kCsvHeader, ErrorCode::InvalidInput,
              std::string("unexpected CSV header, expected '") + kCsvHeader + "'");
  std::vector<CsvRow> rows;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cols.push_back(cell);
    PMC_REQUIRE(cols.size() == 7, ErrorCode::InvalidInput, "CSV row needs 7 columns: " + line);
    CsvRow row;
    try {
      row.state = {std::stod(cols[0]), std::stod(cols[1]), std::stod(cols[2]), std::stod(cols[3]),
                   std::stod(cols[4])};
      row.segment = std::stoi(cols[5]);
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidInput, "malformed CSV row: " + line);
    }
    row.chart = cols[6];
    rows.push_back(std::move(row));
  }
  PMC_REQUIRE(!rows.empty(), ErrorCode::InvalidInput, "CSV contains no samples");
  return rows;
}

inline nlohmann::json events_to_json(const std::vector<SingularEvent>& events) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& e : events)
    out.push_back({{"kind", to_string(e.kind)},
                   {"s", e.s_event},
                   {"x", e.contact_x},
                   {"y", e.contact_y},
                   {"slope_sq", e.incoming_slope_sq}});
  return out;
}

struct EventMarker {
  std::string kind;
  double s = 0.0;
  double x = 0.0;
  double y = 0.0;
};

inline std::vector<EventMarker> events_from_json(const nlohmann::json& j) {
  std::vector<EventMarker> out;
  try {
    for (const auto& e : j)
      out.push_back({e.at("kind").get<std::string>(), e.at("s").get<double>(),
                     e.at("x").get<double>(), e.at("y").get<double>()});
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::InvalidInput, std::string("malformed events json: ") + ex.what());
  }
  return out;
}

// ---------------------------------------------------------------------------
// RunSpec <-> JSON

inline nlohmann::json to_json(const Geometry& g) {
  if (const auto* r = std::get_if<Rot>(&g)) return {{"type", "rot"}, {"n", r->n}};
  const auto& p = std::get<Product>(g);
  return {{"type", "lm"}, {"l", p.l}, {"m", p.m}};
}

inline Geometry geometry_from_json(const nlohmann::json& j) {
  const auto type = j.at("type").get<std::string>();
  if (type == "rot") return Rot{j.at("n").get<int>()};
  if (type == "lm") return Product{j.at("l").get<int>(), j.at("m").get<int>()};
  throw Error(ErrorCode::InvalidInput, "geometry type must be rot or lm");
}

inline nlohmann::json to_json(const SolverConfig& c) {
  return {{"rk_tol", c.rk_tol},
          {"rk_max_step", c.rk_max_step},
          {"axis_eps", c.axis_eps},
          {"origin_eps", c.origin_eps},
          {"picard_tol", c.picard_tol},
          {"picard_max_iter", c.picard_max_iter},
          {"chart_Y_init", c.chart_Y_init},
          {"chart_Y_shrink", c.chart_Y_shrink},
          {"norm_bound_M", c.norm_bound_M},
          {"stitch_tol", c.stitch_tol},
          {"chart_nodes", c.chart_nodes},
          {"max_contraction", c.max_contraction},
          {"limit_tol", c.limit_tol}};
}

inline SolverConfig config_from_json(const nlohmann::json& j) {
  SolverConfig c;
  c.rk_tol = j.value("rk_tol", c.rk_tol);
  c.rk_max_step = j.value("rk_max_step", c.rk_max_step);
  c.axis_eps = j.value("axis_eps", c.axis_eps);
  c.origin_eps = j.value("origin_eps", c.origin_eps);
  c.picard_tol = j.value("picard_tol", c.picard_tol);
  c.picard_max_iter = j.value("picard_max_iter", c.picard_max_iter);
  c.chart_Y_init = j.value("chart_Y_init", c.chart_Y_init);
  c.chart_Y_shrink = j.value("chart_Y_shrink", c.chart_Y_shrink);
  c.norm_bound_M = j.value("norm_bound_M", c.norm_bound_M);
  c.stitch_tol = j.value("stitch_tol", c.stitch_tol);
  c.chart_nodes = j.value("chart_nodes", c.chart_nodes);
  c.max_contraction = j.value("max_contraction", c.max_contraction);
  c.limit_tol = j.value("limit_tol", c.limit_tol);
  return c;
}

inline nlohmann::json to_json(const RunSpec& spec) {
  const auto& i = spec.initial;
  return {{"geometry", to_json(spec.geometry)},
          {"H", to_json(spec.h)},
          {"initial", {i.s, i.x, i.y, i.xp, i.yp}},
          {"window", {spec.s_lo, spec.s_hi}},
          {"cfg", to_json(spec.cfg)},
          {"sample_ds", spec.sample_ds}};
}

inline RunSpec runspec_from_json(const nlohmann::json& j) {
  try {
    RunSpec spec;
    spec.geometry = geometry_from_json(j.at("geometry"));
    spec.h = hfield_from_json(j.at("H"));
    const auto init = j.at("initial").get<std::vector<double>>();
    PMC_REQUIRE(init.size() == 5, ErrorCode::InvalidInput, "initial must be [s0, x0, y0, xp0, yp0]");
    spec.initial = {init[0], init[1], init[2], init[3], init[4]};
    const auto win = j.at("window").get<std::vector<double>>();
    PMC_REQUIRE(win.size() == 2, ErrorCode::InvalidInput, "window must be [s_lo, s_hi]");
    spec.s_lo = win[0];
    spec.s_hi = win[1];
    spec.cfg = config_from_json(j.value("cfg", nlohmann::json::object()));
    spec.sample_ds = j.value("sample_ds", 0.0);
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidInput, std::string("malformed run spec: ") + e.what());
  }
}

inline nlohmann::json make_manifest(const RunSpec& spec, const std::string& csv_path,
                                    const std::string& events_path) {
  return {{"tool", "pmc"},
          {"version", kVersion},
          {"deterministic", true},
          {"spec", to_json(spec)},
          {"outputs", {{"csv", csv_path}, {"events", events_path}}}};
}

// ---------------------------------------------------------------------------
// SVG

struct Polyline {
  std::vector<std::array<double, 2>> points;
  std::string stroke = "#1f4e9c";
  double width = 1.5;
  bool dashed = false;
};

inline std::string render_svg(const std::vector<Polyline>& lines,
                              const std::vector<EventMarker>& markers, int width = 800,
                              int height = 600) {
  double xmin = std::numeric_limits<double>::infinity();
  double xmax = -xmin;
  double ymin = xmin;
  double ymax = -xmin;
  auto grow = [&](double x, double y) {
    xmin = std::min(xmin, x);
    xmax = std::max(xmax, x);
    ymin = std::min(ymin, y);
    ymax = std::max(ymax, y);
  };
  for (const auto& l : lines)
    for (const auto& p : l.points) grow(p[0], p[1]);
  for (const auto& m : markers) grow(m.x, m.y);
  grow(xmin, 0.0);  // keep the axis in view
  if (!(xmax > xmin)) xmax = xmin + 1.0;
  if (!(ymax > ymin)) ymax = ymin + 1.0;
  const double margin = 40.0;
  const double scale =
      std::min((width - 2 * margin) / (xmax - xmin), (height - 2 * margin) / (ymax - ymin));
  auto px = [&](double x) { return margin + (x - xmin) * scale; };
  auto py = [&](double y) { return height - margin - (y - ymin) * scale; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<line x1=\"" << px(xmin) << "\" y1=\"" << py(0) << "\" x2=\"" << px(xmax) << "\" y2=\""
     << py(0) << "\" stroke=\"#999\" stroke-width=\"1\"/>\n";
  for (const auto& l : lines) {
    if (l.points.empty()) continue;
    os << "<polyline fill=\"none\" stroke=\"" << l.stroke << "\" stroke-width=\"" << l.width
       << "\"" << (l.dashed ? " stroke-dasharray=\"6 4\"" : "") << " points=\"";
    for (const auto& p : l.points) os << px(p[0]) << ',' << py(p[1]) << ' ';
    os << "\"/>\n";
  }
  for (const auto& m : markers) {
    const char* color = m.kind == "origin" ? "#c0392b" : (m.kind == "y_axis" ? "#8e44ad" : "#e67e22");
    os << "<circle class=\"event " << m.kind << "\" cx=\"" << px(m.x) << "\" cy=\"" << py(m.y)
       << "\" r=\"5\" fill=\"" << color << "\"><title>" << m.kind << " s=" << m.s
       << "</title></circle>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace pmc
