// pmc: extend generating curves, run the verification suites, plot profiles.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "pmc/pmc.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitSolver = 3;

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw pmc::Error(pmc::ErrorCode::InvalidInput, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw pmc::Error(pmc::ErrorCode::InvalidInput, "cannot write " + path);
  out << text;
}

/// --H takes inline JSON or @file.
pmc::HField parse_h(const std::string& arg) {
  if (!arg.empty() && arg.front() == '@') return pmc::hfield_from_string(read_text(arg.substr(1)));
  return pmc::hfield_from_string(arg);
}

std::vector<double> parse_list(const std::string& text, std::size_t min_count,
                               std::size_t max_count, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(cell, &used));
      if (used != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw pmc::Error(pmc::ErrorCode::InvalidInput, what + ": '" + cell + "' is not a number");
    }
  }
  if (out.size() < min_count || out.size() > max_count)
    throw pmc::Error(pmc::ErrorCode::InvalidInput, what + ": wrong number of values");
  return out;
}

void emit_report(const json& report, const std::string& path) {
  const auto text = report.dump(2) + "\n";
  if (path.empty()) {
    std::cout << text;
  } else {
    write_text(path, text);
  }
}

/// Sibling path: dir/stem + suffix.
std::string sibling(const std::string& path, const std::string& suffix) {
  fs::path p(path);
  return (p.parent_path() / (p.stem().string() + suffix)).string();
}

struct ExtendArgs {
  std::string geometry = "rot";
  int n = 3;
  int l = 1;
  int m = 1;
  std::string h;
  std::string init;
  std::string window;
  std::string out;
  std::string manifest;
  double sample_ds = 0.01;
  std::string cfg_json;
};

int run_extend(const ExtendArgs& a) {
  pmc::RunSpec spec;
  std::string out = a.out;
  if (!a.manifest.empty()) {
    const auto manifest = json::parse(read_text(a.manifest));
    spec = pmc::runspec_from_json(manifest.at("spec"));
    if (out.empty()) out = manifest.at("outputs").at("csv").get<std::string>();
  } else {
    if (a.h.empty() || a.init.empty() || a.window.empty() || out.empty())
      throw pmc::Error(pmc::ErrorCode::InvalidInput,
                       "extend needs --H, --init, --window and --out (or --manifest)");
    if (a.geometry == "rot") {
      spec.geometry = pmc::Rot{a.n};
    } else if (a.geometry == "lm") {
      spec.geometry = pmc::Product{a.l, a.m};
    } else {
      throw pmc::Error(pmc::ErrorCode::InvalidInput, "--geometry must be rot or lm");
    }
    spec.h = parse_h(a.h);
    auto init = parse_list(a.init, 4, 5, "--init");
    if (init.size() == 4) init.insert(init.begin(), 0.0);
    const double speed = std::hypot(init[3], init[4]);
    if (std::abs(speed - 1.0) > 1e-6)
      throw pmc::Error(pmc::ErrorCode::InvalidInput, "--init tangent must have unit length");
    spec.initial = {init[0], init[1], init[2], init[3] / speed, init[4] / speed};
    const auto win = parse_list(a.window, 2, 2, "--window");
    spec.s_lo = win[0];
    spec.s_hi = win[1];
    spec.sample_ds = a.sample_ds;
    if (!a.cfg_json.empty()) spec.cfg = pmc::config_from_json(json::parse(a.cfg_json));
  }
  const auto curve = pmc::extend(spec);
  std::ostringstream csv;
  pmc::write_csv(csv, curve);
  const auto events_path = sibling(out, ".events.json");
  write_text(out, csv.str());
  write_text(events_path, pmc::events_to_json(curve.events).dump(2) + "\n");
  if (a.manifest.empty())
    write_text(sibling(out, ".manifest.json"),
               pmc::make_manifest(spec, out, events_path).dump(2) + "\n");
  std::cerr << "wrote " << out << " (" << curve.concatenated().size() << " samples, "
            << curve.events.size() << " events)\n";
  return kExitPass;
}

struct VerifyArgs {
  int n = 3;
  int l = 1;
  int m = 1;
  int K = 1;
  std::string h;
  std::string c;
  std::string s_range = "-2,2";
  std::string s_span = "-4,4";
  double ds = 0.05;
  double L = 0.0;
  std::string report;
};

int finish(const pmc::CheckReport& rep, const std::string& path) {
  emit_report(pmc::to_json(rep), path);
  return rep.pass ? kExitPass : kExitCheckFailed;
}

std::map<double, pmc::ProfileCurve> family(const VerifyArgs& a, const pmc::HField& h,
                                           const std::vector<double>& cs) {
  pmc::RunSpec t;
  t.geometry = pmc::Rot{a.n};
  t.h = h;
  const auto range = parse_list(a.s_range, 2, 2, "--s-range");
  t.s_lo = std::min(range[0], 0.0);
  t.s_hi = std::max(range[1], 0.0);
  return pmc::sweep(t, cs);
}

int run_verify(const std::string& which, const VerifyArgs& a) {
  const auto range = parse_list(a.s_range, 2, 2, "--s-range");
  if (which == "thm31") {
    const auto h = parse_h(a.h.empty() ? R"({"kind":"constant","value":1.0})" : a.h);
    const auto c = parse_list(a.c.empty() ? "2" : a.c, 1, 1, "--c");
    const auto span = parse_list(a.s_span, 2, 2, "--s-span");
    return finish(pmc::check_positivity(h, c[0], a.n, span[0], span[1], pmc::SolverConfig{}),
                  a.report);
  }
  if (which == "thm32") {
    const auto h = parse_h(a.h.empty() ? R"({"kind":"constant","value":1.0})" : a.h);
    const auto cs = parse_list(a.c.empty() ? "4,8,16" : a.c, 1, 64, "--c");
    const pmc::EtaAccumulator acc(h, a.n);
    return finish(pmc::check_convergence_bound(family(a, h, cs), acc, range[0], range[1], a.ds),
                  a.report);
  }
  if (which == "thm33") {
    const auto h = parse_h(a.h.empty() ? R"({"kind":"constant","value":1.0})" : a.h);
    const auto cs = parse_list(a.c.empty() ? "8,16,32,64" : a.c, 2, 64, "--c");
    const pmc::EtaAccumulator acc(h, a.n);
    return finish(
        pmc::check_expansion_scaling(family(a, h, cs), acc, a.K, range[0], range[1], a.ds),
        a.report);
  }
  if (which == "prop43") {
    // inbound ray of the minimal cone through the origin
    const double xs = pmc::origin_slope(a.l, a.m);
    const double ys = std::sqrt(1.0 - xs * xs);
    pmc::RunSpec spec;
    spec.geometry = pmc::Product{a.l, a.m};
    spec.h = parse_h(a.h.empty() ? R"({"kind":"constant","value":0.0})" : a.h);
    spec.initial = {0.0, xs, ys, -xs, -ys};
    spec.s_lo = 0.0;
    spec.s_hi = 2.0;
    const auto curve = pmc::extend(spec);
    pmc::CheckReport rep;
    rep.check = "origin_slope";
    rep.params = {{"l", a.l}, {"m", a.m}, {"H", pmc::to_json(spec.h)}};
    const double target = static_cast<double>(a.l) / (a.l + a.m);
    rep.bound_or_expected = {{"slope_sq", target}, {"tolerance", spec.cfg.limit_tol}};
    json observed = {{"events", pmc::events_to_json(curve.events)}};
    bool ok = false;
    for (const auto& e : curve.events) {
      if (e.kind != pmc::EventKind::OriginContact) continue;
      observed["slope_sq"] = e.incoming_slope_sq;
      ok = std::abs(e.incoming_slope_sq - target) <= spec.cfg.limit_tol;
    }
    observed["outgoing_xp"] = curve.concatenated().back().xp;
    rep.observed = observed;
    rep.pass = ok;
    return finish(rep, a.report);
  }
  if (which == "periods") {
    const auto h = parse_h(a.h.empty() ? R"({"kind":"constant","value":1.0})" : a.h);
    if (!(a.L > 0.0)) throw pmc::Error(pmc::ErrorCode::InvalidInput, "periods needs --L > 0");
    const pmc::EtaAccumulator acc(h, a.n);
    const auto d = pmc::period_diagnostics(acc, a.L);
    pmc::CheckReport rep;
    rep.check = "period_diagnostics";
    rep.params = {{"n", a.n}, {"H", pmc::to_json(h)}, {"L", a.L}};
    rep.observed = {{"int_cos", d.int_cos},
                    {"int_sin", d.int_sin},
                    {"double_int", d.double_int},
                    {"signed_area", d.signed_area},
                    {"H_periodicity_defect", pmc::periodicity_defect(h, a.L, -a.L, a.L)}};
    rep.bound_or_expected = {{"finite", true}};
    rep.pass = std::isfinite(d.int_cos) && std::isfinite(d.int_sin) &&
               std::isfinite(d.double_int) && std::isfinite(d.signed_area);
    return finish(rep, a.report);
  }
  throw pmc::Error(pmc::ErrorCode::InvalidInput, "unknown verify target " + which);
}

struct PlotArgs {
  std::string csv;
  std::string out;
  std::string events;
  bool overlay = false;
  std::string h;
  int n = 3;
  double c = 0.0;
};

int run_plot(const PlotArgs& a) {
  std::ifstream in(a.csv);
  if (!in) throw pmc::Error(pmc::ErrorCode::InvalidInput, "cannot read " + a.csv);
  const auto rows = pmc::read_csv(in);
  std::vector<pmc::Polyline> lines;
  int current = -1;
  for (const auto& r : rows) {
    if (r.segment != current) {
      // consecutive segments share their junction point
      pmc::Polyline next;
      if (!lines.empty()) next.points.push_back(lines.back().points.back());
      next.stroke = r.chart == "arc" ? "#1f4e9c" : "#27ae60";
      lines.push_back(std::move(next));
      current = r.segment;
    }
    lines.back().points.push_back({r.state.x, r.state.y});
  }
  std::vector<pmc::EventMarker> markers;
  std::string events_path = a.events;
  if (events_path.empty() && fs::exists(sibling(a.csv, ".events.json")))
    events_path = sibling(a.csv, ".events.json");
  if (!events_path.empty()) markers = pmc::events_from_json(json::parse(read_text(events_path)));
  if (a.overlay) {
    if (a.h.empty() || !(a.c > 0.0))
      throw pmc::Error(pmc::ErrorCode::InvalidInput, "--overlay-gamma-inf needs --H and --c > 0");
    const pmc::EtaAccumulator acc(parse_h(a.h), a.n);
    pmc::Polyline gl;
    gl.stroke = "#c0392b";
    gl.dashed = true;
    const double lo = rows.front().state.s;
    const double hi = rows.back().state.s;
    const int count = 400;
    for (int i = 0; i <= count; ++i) {
      const double s = lo + (hi - lo) * i / count;
      const auto g = pmc::gamma_infinity(acc, s);
      gl.points.push_back({g[0], g[1] + a.c});
    }
    lines.push_back(std::move(gl));
  }
  write_text(a.out.empty() ? sibling(a.csv, ".svg") : a.out, pmc::render_svg(lines, markers));
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pmc: generating curves with prescribed mean curvature"};
  app.set_version_flag("--version", pmc::kVersion);
  app.require_subcommand(1);

  ExtendArgs ea;
  auto* ext = app.add_subcommand("extend", "extend a generating curve over a window");
  ext->add_option("--geometry", ea.geometry, "rot or lm")->check(CLI::IsMember({"rot", "lm"}));
  ext->add_option("--n", ea.n, "ambient dimension (rot)");
  ext->add_option("--l", ea.l, "l (lm)");
  ext->add_option("--m", ea.m, "m (lm)");
  ext->add_option("--H", ea.h, "H as JSON, or @file");
  ext->add_option("--init", ea.init, "[s0,]x0,y0,xp0,yp0");
  ext->add_option("--window", ea.window, "s_lo,s_hi");
  ext->add_option("--out", ea.out, "output CSV path");
  ext->add_option("--sample-ds", ea.sample_ds, "output sample spacing (0 = raw steps)");
  ext->add_option("--cfg", ea.cfg_json, "solver configuration as JSON");
  ext->add_option("--manifest", ea.manifest, "re-run from a manifest");

  VerifyArgs va;
  std::string target;
  auto* ver = app.add_subcommand("verify", "run a verification check and write a JSON report");
  ver->add_option("target", target, "thm31 | thm32 | thm33 | prop43 | periods")
      ->required()
      ->check(CLI::IsMember({"thm31", "thm32", "thm33", "prop43", "periods"}));
  ver->add_option("--n", va.n, "ambient dimension");
  ver->add_option("--l", va.l, "l");
  ver->add_option("--m", va.m, "m");
  ver->add_option("--K", va.K, "expansion order (1 or 2)");
  ver->add_option("--H", va.h, "H as JSON, or @file");
  ver->add_option("--c", va.c, "comma separated values of c");
  ver->add_option("--s-range", va.s_range, "s_lo,s_hi for family checks");
  ver->add_option("--s-span", va.s_span, "s_lo,s_hi for the positivity run");
  ver->add_option("--ds", va.ds, "sampling step in s");
  ver->add_option("--L", va.L, "period length");
  ver->add_option("--report", va.report, "report path (default stdout)");

  PlotArgs pa;
  auto* plot = app.add_subcommand("plot", "render a curve CSV as SVG");
  plot->add_option("csv", pa.csv, "curve CSV")->required();
  plot->add_option("--out", pa.out, "SVG path");
  plot->add_option("--events", pa.events, "events JSON (default: sibling of the CSV)");
  plot->add_flag("--overlay-gamma-inf", pa.overlay, "overlay the limit curve shifted by (0, c)");
  plot->add_option("--H", pa.h, "H for the overlay");
  plot->add_option("--n", pa.n, "dimension for the overlay");
  plot->add_option("--c", pa.c, "shift c for the overlay");

  // values such as "-2,2" would otherwise be taken for flags
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    if (i + 1 < argc && a.rfind("--", 0) == 0 && a.find('=') == std::string::npos) {
      const std::string next = argv[i + 1];
      if (next.size() > 1 && next[0] == '-' && (std::isdigit(next[1]) || next[1] == '.')) {
        args.push_back(a + "=" + next);
        ++i;
        continue;
      }
    }
    args.push_back(a);
  }
  std::reverse(args.begin(), args.end());

  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    if (*ext) return run_extend(ea);
    if (*ver) return run_verify(target, va);
    if (*plot) return run_plot(pa);
  } catch (const pmc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == pmc::ErrorCode::InvalidInput ? kExitUsage : kExitSolver;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
