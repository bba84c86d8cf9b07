// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>

#include "pmc/pmc.hpp"

using namespace pmc;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

HField bump_table() {
  std::vector<std::pair<double, double>> samples;
  for (int i = 0; i <= 40; ++i) {
    const double s = -1.0 + 0.05 * i;
    samples.emplace_back(s, 1.0 + 0.5 * std::exp(-s * s / 0.1));
  }
  return TableH(samples, Interpolation::Cubic, Extrapolation::Clamp);
}

SingularEvent event_at(EventKind kind, double s, double x) {
  SingularEvent ev;
  ev.kind = kind;
  ev.s_event = s;
  ev.contact_x = x;
  return ev;
}

Outcome sphere_chain() {
  RunSpec spec;
  spec.geometry = Rot{3};
  spec.h = ConstantH{1.0};
  spec.initial = {0.0, 0.0, 1.0, 1.0, 0.0};
  spec.s_lo = 0.0;
  spec.s_hi = 2 * kPi;
  const auto curve = extend(spec);
  double worst = 0.0;
  for (const auto& st : curve.concatenated()) {
    worst = std::max(worst, std::abs(st.x - std::sin(st.s)));
    worst = std::max(worst, std::abs(st.y - std::abs(std::cos(st.s))));
  }
  bool ok = curve.events.size() == 2;
  for (std::size_t i = 0; ok && i < 2; ++i)
    ok = curve.events[i].kind == EventKind::AxisContact &&
         std::abs(curve.events[i].s_event - (i + 0.5) * kPi) <= 1e-4;
  ok = ok && worst <= 1e-6;
  return {ok, "events=" + std::to_string(curve.events.size()) + fmt(" max_dev=%.2e", worst)};
}

Outcome cylinder() {
  bool ok = true;
  double worst = 0.0;
  std::size_t events = 0;
  for (int n = 3; n <= 5; ++n) {
    RunSpec spec;
    spec.geometry = Rot{n};
    spec.h = ConstantH{(n - 2) / ((n - 1) * 2.0)};
    spec.initial = {0.0, 0.0, 2.0, 1.0, 0.0};
    spec.s_lo = 0.0;
    spec.s_hi = 10.0;
    const auto curve = extend(spec);
    events += curve.events.size();
    for (const auto& st : curve.concatenated()) worst = std::max(worst, std::abs(st.y - 2.0));
  }
  ok = events == 0 && worst <= 1e-8;
  return {ok, "events=" + std::to_string(events) + fmt(" max|y-2|=%.2e", worst)};
}

Outcome cone_passage() {
  bool ok = true;
  std::ostringstream detail;
  for (const auto& [l, m] : {std::pair{1, 1}, std::pair{1, 2}, std::pair{2, 1}}) {
    const double xs = origin_slope(l, m);
    const double ys = std::sqrt(1.0 - xs * xs);
    RunSpec spec;
    spec.geometry = Product{l, m};
    spec.h = ConstantH{0.0};
    spec.initial = {0.0, xs, ys, -xs, -ys};
    spec.s_lo = 0.0;
    spec.s_hi = 2.0;
    const auto curve = extend(spec);
    const double target = static_cast<double>(l) / (l + m);
    const bool one = curve.events.size() == 1 && curve.events[0].kind == EventKind::OriginContact;
    const double slope_err = one ? std::abs(curve.events[0].incoming_slope_sq - target) : 1.0;
    double line_err = 0.0;
    if (one) {
      for (const auto& st : curve.concatenated()) {
        if (st.s <= curve.events[0].s_event) continue;
        line_err = std::max(line_err, std::abs(st.x * ys - st.y * xs));
        line_err = std::max(line_err, std::hypot(st.xp - xs, st.yp - ys));
      }
    }
    ok = ok && one && slope_err <= 1e-6 && line_err <= 1e-10;
    detail << "(" << l << "," << m << ") slope_err=" << fmt("%.1e", slope_err)
           << " line_err=" << fmt("%.1e", line_err) << " ";
  }
  return {ok, detail.str()};
}

double halving_order(const std::function<std::vector<double>(int)>& solve, bool& exact) {
  const auto a = solve(64);
  const auto b = solve(128);
  const auto c = solve(256);
  double d1 = 0.0;
  double d2 = 0.0;
  for (int i = 0; i <= 64; ++i) {
    d1 = std::max(d1, std::abs(b[2 * i] - a[i]));
    d2 = std::max(d2, std::abs(c[4 * i] - b[2 * i]));
  }
  exact = d1 <= 1e-15 && d2 <= 1e-15;
  return exact ? std::numeric_limits<double>::infinity() : std::log2(d1 / d2);
}

Outcome fixed_point_solvers() {
  const std::vector<std::pair<std::string, HField>> fields = {
      {"0", ConstantH{0.0}}, {"1", ConstantH{1.0}}, {"bump", bump_table()}};
  bool ok = true;
  double worst_contraction = 0.0;
  double worst_residual = 0.0;
  double worst_order = std::numeric_limits<double>::infinity();
  int exact_cases = 0;
  for (const auto& [name, h] : fields) {
    for (const std::string op : {"phi", "psi", "theta"}) {
      auto solve = [&, op](int N) -> SingularChart {
        SolverConfig cfg;
        cfg.chart_nodes = N;
        if (op == "phi") return solve_singular_rot(h, 4, event_at(EventKind::AxisContact, 0.0, 1.0), -1, cfg);
        if (op == "psi") return solve_case_a(h, 1, 1, event_at(EventKind::AxisContact, 0.0, 1.0), -1, cfg);
        return solve_case_b(h, 1, 2, event_at(EventKind::OriginContact, 0.0, 0.0), 1, cfg);
      };
      const auto chart = solve(SolverConfig{}.chart_nodes);
      worst_contraction = std::max(worst_contraction, chart.contraction);
      worst_residual = std::max(worst_residual, chart.fixed_point_residual);
      double Y64 = 0.0;
      bool same_width = true;
      bool exact = false;
      const double order = halving_order(
          [&](int N) {
            const auto c = solve(N);
            if (Y64 == 0.0) Y64 = c.Y;
            same_width = same_width && c.Y == Y64;
            return c.q;
          },
          exact);
      if (exact) ++exact_cases;
      worst_order = std::min(worst_order, order);
      ok = ok && same_width && chart.contraction <= 0.9 && chart.fixed_point_residual <= 1e-10 &&
           order >= 1.9;
    }
  }
  return {ok, fmt("max_contraction=%.3f", worst_contraction) +
                  fmt(" max_residual=%.1e", worst_residual) + fmt(" min_order=%.3f", worst_order) +
                  " exact_cases=" + std::to_string(exact_cases)};
}

Outcome shooting() {
  const SolverConfig cfg;
  bool ok = true;
  double worst_pos = 0.0;
  double worst_slope = 0.0;
  auto record = [&](const SingularEvent& ev, double x_b, double y_b, double slope_target) {
    const double pos = std::hypot(ev.contact_x - x_b, ev.contact_y - y_b);
    const double slope = std::abs(ev.incoming_slope_sq - slope_target);
    worst_pos = std::max(worst_pos, pos);
    worst_slope = std::max(worst_slope, slope);
    ok = ok && pos <= 1e-5 && slope <= 0.05;
  };
  for (const auto& [n, h] : {std::pair<int, HField>{3, ConstantH{1.0}}, {4, bump_table()}}) {
    const auto in = solve_singular_rot(h, n, event_at(EventKind::AxisContact, 0.2, 1.0), -1, cfg);
    const auto out = solve_outgoing_rot(in, h, cfg);
    const auto st = continue_through_axis(in, h, n, cfg);
    const auto res = integrate_until_event(st, Rot{n}, h, st.s - 1.0, cfg, out.h_sign);
    if (!res.detection.triggered) return {false, "rot shooting did not return"};
    record(refine_event(res.detection, Rot{n}, h, cfg, out.h_sign), 1.0, 0.0, 0.0);
  }
  {
    const HField h = FourierH{0.5, {0.3}, {}, 2.0};
    const auto in = solve_case_a(h, 1, 2, event_at(EventKind::AxisContact, 0.3, 1.2), -1, cfg);
    const auto out = solve_outgoing_lm(in, h, cfg);
    const auto st = continue_through_axis(in, h, cfg);
    const auto res = integrate_until_event(st, Product{1, 2}, h, st.s - 1.0, cfg, out.h_sign);
    if (!res.detection.triggered) return {false, "case a shooting did not return"};
    record(refine_event(res.detection, Product{1, 2}, h, cfg, out.h_sign), 1.2, 0.0, 0.0);
  }
  for (const auto& [l, m] : {std::pair{1, 1}, std::pair{2, 1}}) {
    const HField h = ConstantH{0.3};
    const auto in = solve_case_b(h, l, m, event_at(EventKind::OriginContact, 0.5, 0.0), -1, cfg);
    const auto st = continue_through_origin(in, h, l, m, cfg);
    const auto res = integrate_until_event(st, Product{l, m}, h, st.s - 1.0, cfg, in.h_sign);
    if (!res.detection.triggered) return {false, "case b shooting did not return"};
    record(refine_event(res.detection, Product{l, m}, h, cfg, in.h_sign), 0.0, 0.0,
           static_cast<double>(l) / (l + m));
  }
  return {ok, fmt("max_position_err=%.2e", worst_pos) + fmt(" max_slope_err=%.2e", worst_slope)};
}

Outcome positivity() {
  const SolverConfig cfg;
  std::vector<std::pair<double, double>> tab;
  for (int i = 0; i <= 900; ++i) {
    const double s = -4.5 + 0.01 * i;
    tab.emplace_back(s, 1.0 / (1.0 + s * s));
  }
  const std::vector<CheckReport> reps = {
      check_positivity(ConstantH{1.0}, 2.0, 3, -4.0, 4.0, cfg),
      check_positivity(PolynomialH{{1.0, 0.0, 1.0}}, 1.5, 4, -4.0, 4.0, cfg),
      check_positivity(TableH(tab, Interpolation::Linear, Extrapolation::Clamp), 0.5, 3, -4.0, 4.0,
                       cfg)};
  bool ok = true;
  std::string detail;
  for (const auto& r : reps) {
    const double min_y = r.observed["min_y"].get<double>();
    ok = ok && r.pass && r.bound_or_expected["predicted_positive"].get<bool>() && min_y > 0.0;
    detail += fmt("min_y=%.4f ", min_y);
  }
  return {ok, detail};
}

std::map<double, ProfileCurve> family(int n, std::vector<double> cs) {
  RunSpec spec;
  spec.geometry = Rot{n};
  spec.h = ConstantH{1.0};
  spec.s_lo = -2.0;
  spec.s_hi = 2.0;
  return sweep(spec, cs);
}

Outcome convergence_bound() {
  const EtaAccumulator acc(ConstantH{1.0}, 3);
  const auto rep = check_convergence_bound(family(3, {4.0, 8.0, 16.0}), acc, -2.0, 2.0, 0.05);
  return {rep.pass, fmt("max_ratio=%.4f", rep.observed["max_ratio"].get<double>())};
}

Outcome expansion_scaling() {
  const EtaAccumulator acc4(ConstantH{1.0}, 4);
  const auto fam = family(4, {8.0, 16.0, 32.0, 64.0});
  const auto k1 = check_expansion_scaling(fam, acc4, 1, -2.0, 2.0);
  const auto k2 = check_expansion_scaling(fam, acc4, 2, -2.0, 2.0);
  const EtaAccumulator acc3(ConstantH{1.0}, 3);
  bool zero = true;
  for (double s = -2.0; s <= 2.0; s += 0.05) {
    const auto c = expansion_coeff(acc3, 2, s);
    zero = zero && c.F == 0.0 && c.G == 0.0;
  }
  const double s1 = k1.observed["slope"].is_number() ? k1.observed["slope"].get<double>() : 0.0;
  const double s2 = k2.observed["slope"].is_number() ? k2.observed["slope"].get<double>() : 0.0;
  const bool ok = k1.pass && k2.pass && s1 >= 1.75 && s2 >= 2.75 && zero;
  return {ok, fmt("slope_K1=%.3f", s1) + fmt(" slope_K2=%.3f", s2) +
                  (zero ? " n3_k2=(0,0)" : " n3_k2 nonzero")};
}

Outcome reduction() {
  const SolverConfig cfg;
  double worst = 0.0;
  const std::vector<HField> fields = {ConstantH{0.0}, ConstantH{1.0}, bump_table(),
                                      PolynomialH{{0.5, 0.3, -0.2}}};
  for (const auto& h : fields) {
    for (int n = 3; n <= 6; ++n) {
      for (int o : {-1, 1}) {
        const auto ev = event_at(EventKind::AxisContact, 0.1, 0.8);
        const auto a = solve_case_a(h, 0, n - 2, ev, o, cfg);
        const auto r = solve_singular_rot(h, n, ev, o, cfg);
        if (a.q.size() != r.q.size() || a.Y != r.Y) return {false, "grids differ"};
        for (std::size_t i = 0; i < a.q.size(); ++i) {
          worst = std::max(worst, std::abs(a.q[i] - r.q[i]));
          worst = std::max(worst, std::abs(a.s_of_y[i] - r.s_of_y[i]));
          worst = std::max(worst, std::abs(a.x_of_y[i] - r.x_of_y[i]));
        }
      }
    }
  }
  return {worst <= 1e-12, fmt("max_node_diff=%.1e", worst)};
}

Outcome periods() {
  const auto d = period_diagnostics(EtaAccumulator(ConstantH{1.0}, 3), kPi);
  const double err = std::max({std::abs(d.int_cos), std::abs(d.int_sin),
                               std::abs(d.double_int - kPi / 4), std::abs(d.signed_area - kPi / 4)});
  return {err <= 1e-8, fmt("max_err=%.1e", err)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"sphere-chain oracle", sphere_chain},
      {"cylinder equilibrium", cylinder},
      {"minimal-cone origin passage", cone_passage},
      {"fixed-point solvers", fixed_point_solvers},
      {"shooting-oracle equivalence", shooting},
      {"positivity examples", positivity},
      {"convergence bound", convergence_bound},
      {"expansion scaling", expansion_scaling},
      {"reduction identity", reduction},
      {"period diagnostics", periods},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome r;
    try {
      r = criteria[i].second();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    if (!r.pass) ++failures;
    std::printf("%s %2zu %s: %s\n", r.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                r.detail.c_str());
  }
  return failures == 0 ? 0 : 1;
}
