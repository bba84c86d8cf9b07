#pragma once

// Limit curve Gamma_inf of curvature -(n-1) H(s), the rescaled pairs
// (F_c, G_c) = (y y', y x') / c of the family Gamma_c and their 1/c expansions,
// plus the numerical checks built on them.

#include <algorithm>
#include <limits>
#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <nlohmann/json.hpp>

#include "pmc/error.hpp"
#include "pmc/extension.hpp"
#include "pmc/hfield.hpp"
#include "pmc/types.hpp"

namespace pmc {

struct FGPair {
  double F = 0.0;
  double G = 0.0;
};

struct PeriodDiagnostics {
  double L = 0.0;
  double int_cos = 0.0;
  double int_sin = 0.0;
  double double_int = 0.0;
  double signed_area = 0.0;
};

/// Cached running integrals of eta(s) = (n-1) \int_0^s H:
///   eta, C(s) = \int_0^s cos eta, S(s) = \int_0^s sin eta,
///   D1(s) = \int_0^s C sin eta, D2(s) = \int_0^s C cos eta.
/// Values at panel boundaries k * panel are cached in both directions; a query
/// integrates only the last partial panel. All methods are thread-safe.
class EtaAccumulator {
 public:
  struct Values {
    double eta = 0.0;
    double ccos = 0.0;
    double csin = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
  };

  EtaAccumulator(HField h, int n, double panel = 0.125) : h_(std::move(h)), n_(n), panel_(panel) {
    PMC_REQUIRE(n >= 3, ErrorCode::InvalidInput, "EtaAccumulator requires n >= 3");
    PMC_REQUIRE(panel > 0.0, ErrorCode::InvalidInput, "panel width must be positive");
    pos_.push_back(Values{});
    neg_.push_back(Values{});
  }

  [[nodiscard]] int n() const { return n_; }
  [[nodiscard]] const HField& h() const { return h_; }

  /// Fills the cache over [s_lo, s_hi]; afterwards `freeze` forbids growth.
  void prepare(double s_lo, double s_hi) {
    (void)values(s_lo, false);
    (void)values(s_hi, false);
  }
  void freeze() {
    std::lock_guard lock(mu_);
    frozen_ = true;
  }

  /// Running integrals at s; `with_double` = false leaves d1, d2 unset.
  [[nodiscard]] Values values(double s, bool with_double = true) const {
    const auto k = static_cast<long long>(std::trunc(s / panel_));
    const double a = static_cast<double>(k) * panel_;
    Values base;
    {
      std::lock_guard lock(mu_);
      auto& side = s >= 0 ? pos_ : neg_;
      const auto idx = static_cast<std::size_t>(std::llabs(k));
      if (side.size() <= idx) {
        PMC_REQUIRE(!frozen_, ErrorCode::InvalidInput,
                    "eta cache is frozen and does not cover s = " + std::to_string(s));
        const double step = s >= 0 ? panel_ : -panel_;
        while (side.size() <= idx) {
          const double from = static_cast<double>(side.size() - 1) * step;
          side.push_back(advance(side.back(), from, from + step, true));
        }
      }
      base = side[idx];
    }
    return advance(base, a, s, with_double);
  }

  [[nodiscard]] double eta(double s) const {
    const auto k = static_cast<long long>(std::trunc(s / panel_));
    const double a = static_cast<double>(k) * panel_;
    return values(a, false).eta + eta_increment(a, s);
  }

 private:
  double eta_increment(double a, double t) const {
    if (t == a) return 0.0;
    auto f = [this](double x) { return eval_H(h_, x); };
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    const double lo = std::min(a, t);
    const double hi = std::max(a, t);
    double err = 0.0;
    double l1 = 0.0;
    double v = GK::integrate(f, lo, hi, 0, 0.0, &err, &l1);
    // the error estimate bottoms out near rounding level, which a relative
    // test cannot reach on short intervals
    const double scale = std::max(1.0, l1 / (hi - lo));
    if (err > std::max(1e-12 * l1, 64 * std::numeric_limits<double>::epsilon() * scale))
      v = GK::integrate(f, lo, hi, 10, 1e-12);
    return (n_ - 1) * (t >= a ? v : -v);
  }

  template <class F>
  static double gl16(F f, double a, double b) {
    using GL = boost::math::quadrature::gauss<double, 16>;
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    const auto& x = GL::abscissa();
    const auto& w = GL::weights();
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] == 0.0) {
        acc += w[i] * f(mid);
      } else {
        acc += w[i] * (f(mid - half * x[i]) + f(mid + half * x[i]));
      }
    }
    return acc * half;
  }

  /// Values at t from values at a (|t - a| at most one panel).
  Values advance(const Values& v, double a, double t, bool with_double) const {
    if (t == a) return v;
    using GL = boost::math::quadrature::gauss<double, 16>;
    const double half = 0.5 * (t - a);
    const double mid = 0.5 * (a + t);
    std::vector<double> nodes;
    std::vector<double> weights;
    for (std::size_t i = 0; i < GL::abscissa().size(); ++i) {
      const double x = GL::abscissa()[i];
      const double w = GL::weights()[i] * half;
      nodes.push_back(mid + half * x);
      weights.push_back(w);
      if (x != 0.0) {
        nodes.push_back(mid - half * x);
        weights.push_back(w);
      }
    }
    Values out = v;
    out.eta = v.eta + eta_increment(a, t);
    std::vector<double> eta_n(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      eta_n[i] = v.eta + eta_increment(a, nodes[i]);
      out.ccos += weights[i] * std::cos(eta_n[i]);
      out.csin += weights[i] * std::sin(eta_n[i]);
    }
    if (!with_double) return out;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const double y = nodes[i];
      const double c = v.ccos + gl16([&](double z) { return std::cos(v.eta + eta_increment(a, z)); }, a, y);
      out.d1 += weights[i] * c * std::sin(eta_n[i]);
      out.d2 += weights[i] * c * std::cos(eta_n[i]);
    }
    return out;
  }

  HField h_;
  int n_;
  double panel_;
  mutable std::mutex mu_;
  mutable std::vector<Values> pos_;
  mutable std::vector<Values> neg_;
  bool frozen_ = false;
};

[[nodiscard]] inline double eta(const EtaAccumulator& acc, double s) { return acc.eta(s); }

/// Gamma_inf(s) = (\int_0^s cos eta, -\int_0^s sin eta).
[[nodiscard]] inline std::array<double, 2> gamma_infinity(const EtaAccumulator& acc, double s) {
  const auto v = acc.values(s, false);
  return {v.ccos, -v.csin};
}

[[nodiscard]] inline FGPair fg_infinity(const EtaAccumulator& acc, double s) {
  const double e = acc.eta(s);
  return {-std::sin(e), std::cos(e)};
}

/// Coefficient of eps^k in the expansion of (F_c, G_c) in eps = 1/c.
[[nodiscard]] inline FGPair expansion_coeff(const EtaAccumulator& acc, int k, double s) {
  PMC_REQUIRE(k >= 0, ErrorCode::InvalidInput, "expansion order must be >= 0");
  PMC_REQUIRE(k <= 2, ErrorCode::UnsupportedOrder, "expansion coefficients exist for k <= 2 only");
  const auto v = acc.values(s, k == 2);
  if (k == 0) return {-std::sin(v.eta), std::cos(v.eta)};
  const int n = acc.n();
  double a = 0.0;
  double b = 0.0;
  if (k == 1) {
    a = (n - 2) * v.ccos;
    b = -v.csin;
  } else {
    const double f = static_cast<double>((n - 2) * (n - 3));
    a = f * v.d1;
    b = -f * v.d2;
  }
  const double c = std::cos(v.eta);
  const double sn = std::sin(v.eta);
  return {c * a - sn * b, sn * a + c * b};
}

/// (y y' / c, y x' / c) of a curve started at (0, c) with horizontal tangent;
/// y is the signed ordinate of the smooth continuation.
[[nodiscard]] inline FGPair fg_from_curve(const ProfileCurve& curve, double c, double s) {
  PMC_REQUIRE(c > 0.0, ErrorCode::InvalidInput, "c must be positive");
  const auto [idx, st] = locate(curve, s);
  const int sign = curve.segments[idx].h_sign;
  return {st.y * st.yp / c, sign * st.y * st.xp / c};
}

[[nodiscard]] inline PeriodDiagnostics period_diagnostics(const EtaAccumulator& acc, double L) {
  PeriodDiagnostics d;
  d.L = L;
  const auto v = acc.values(L);
  d.int_cos = v.ccos;
  d.int_sin = v.csin;
  d.double_int = v.d1;
  // area functional evaluated directly from the Gamma_inf components
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  auto integrand = [&](double u) {
    const auto g = gamma_infinity(acc, u);
    return g[0] * -std::sin(acc.eta(u));
  };
  const double lo = std::min(0.0, L);
  const double hi = std::max(0.0, L);
  d.signed_area = lo == hi ? 0.0 : std::abs(GK::integrate(integrand, lo, hi, 10, 1e-12));
  return d;
}

/// Largest |H(s + L) - H(s)| over `samples` points of [s_lo, s_hi].
[[nodiscard]] inline double periodicity_defect(const HField& h, double L, double s_lo, double s_hi,
                                               int samples = 1000) {
  double worst = 0.0;
  for (int i = 0; i <= samples; ++i) {
    const double s = s_lo + (s_hi - s_lo) * i / samples;
    worst = std::max(worst, std::abs(eval_H(h, s + L) - eval_H(h, s)));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Checks

struct CheckReport {
  std::string check;
  nlohmann::json params = nlohmann::json::object();
  nlohmann::json observed = nlohmann::json::object();
  nlohmann::json bound_or_expected = nlohmann::json::object();
  bool pass = false;
};

inline nlohmann::json to_json(const CheckReport& r) {
  return {{"check", r.check},
          {"params", r.params},
          {"observed", r.observed},
          {"bound_or_expected", r.bound_or_expected},
          {"pass", r.pass}};
}

namespace detail {

inline std::vector<double> lattice(double lo, double hi, double ds) {
  PMC_REQUIRE(hi >= lo && ds > 0.0, ErrorCode::InvalidInput, "bad sampling range");
  std::vector<double> out;
  const auto count = static_cast<long long>(std::floor((hi - lo) / ds + 1e-9));
  for (long long i = 0; i <= count; ++i) out.push_back(lo + static_cast<double>(i) * ds);
  return out;
}

inline double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace detail

/// F~^2 + G~^2 <= 2 (n-2)^2 s^2 / c^2 with a relative slack for discretization.
[[nodiscard]] inline CheckReport check_convergence_bound(
    const std::map<double, ProfileCurve>& family, const EtaAccumulator& acc, double s_lo,
    double s_hi, double ds, double slack = 1e-3) {
  CheckReport rep;
  rep.check = "convergence_bound";
  const int n = acc.n();
  rep.params = {{"n", n}, {"s_range", {s_lo, s_hi}}, {"ds", ds}, {"slack", slack}};
  const auto grid = detail::lattice(s_lo, s_hi, ds);
  double worst_ratio = 0.0;
  bool ok = true;
  nlohmann::json per_c = nlohmann::json::array();
  for (const auto& [c, curve] : family) {
    double ratio_c = 0.0;
    double sup_dev = 0.0;
    for (double s : grid) {
      const auto fc = fg_from_curve(curve, c, s);
      const auto fi = fg_infinity(acc, s);
      const double lhs = (fc.F - fi.F) * (fc.F - fi.F) + (fc.G - fi.G) * (fc.G - fi.G);
      const double bound = 2.0 * (n - 2) * (n - 2) * s * s / (c * c);
      sup_dev = std::max(sup_dev, std::sqrt(lhs));
      if (bound == 0.0) {
        // shared initial data: both sides vanish
        if (lhs > 1e-20) ok = false;
        continue;
      }
      ratio_c = std::max(ratio_c, lhs / bound);
    }
    if (ratio_c > 1.0 + slack) ok = false;
    worst_ratio = std::max(worst_ratio, ratio_c);
    per_c.push_back({{"c", c}, {"max_ratio", ratio_c}, {"sup_deviation", sup_dev}});
  }
  rep.observed = {{"max_ratio", worst_ratio}, {"per_c", per_c}};
  rep.bound_or_expected = {{"max_ratio", 1.0 + slack}, {"bound", "2 (n-2)^2 s^2 / c^2"}};
  if (worst_ratio > 1.0)
    rep.observed["note"] =
        "ratio exceeds the integrated bound; the differential inequality uses 2 sqrt(2) (n-2) / c";
  rep.pass = ok;
  return rep;
}

/// Least-squares slope of log E_K(c) against log(1/c); expects >= K + 1 - 0.25.
[[nodiscard]] inline CheckReport check_expansion_scaling(
    const std::map<double, ProfileCurve>& family, const EtaAccumulator& acc, int K, double s_lo,
    double s_hi, double ds = 0.05, double noise_floor = 1e-8) {
  PMC_REQUIRE(K == 1 || K == 2, ErrorCode::UnsupportedOrder, "K must be 1 or 2");
  PMC_REQUIRE(family.size() >= 2, ErrorCode::InvalidInput, "need at least two values of c");
  CheckReport rep;
  rep.check = "expansion_scaling";
  rep.params = {{"n", acc.n()}, {"K", K}, {"s_range", {s_lo, s_hi}}, {"ds", ds}};
  const auto grid = detail::lattice(s_lo, s_hi, ds);
  std::vector<std::array<FGPair, 3>> coeffs;
  for (double s : grid)
    coeffs.push_back({expansion_coeff(acc, 0, s), expansion_coeff(acc, 1, s),
                      expansion_coeff(acc, 2, s)});
  std::vector<double> log_eps;
  std::vector<double> log_err;
  double e_worst = 0.0;
  nlohmann::json errs = nlohmann::json::array();
  for (const auto& [c, curve] : family) {
    const double eps = 1.0 / c;
    double e_max = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const auto fc = fg_from_curve(curve, c, grid[i]);
      double F = fc.F;
      double G = fc.G;
      double pw = 1.0;
      for (int k = 0; k <= K; ++k) {
        F -= pw * coeffs[i][k].F;
        G -= pw * coeffs[i][k].G;
        pw *= eps;
      }
      e_max = std::max(e_max, std::hypot(F, G));
    }
    e_worst = std::max(e_worst, e_max);
    log_eps.push_back(std::log(eps));
    log_err.push_back(std::log(e_max));
    errs.push_back({{"c", c}, {"E", e_max}});
  }
  rep.bound_or_expected = {{"min_slope", K + 1 - 0.25}, {"noise_floor", noise_floor}};
  if (e_worst <= noise_floor) {
    // the truncated expansion is exact up to the integrator error: no slope to fit
    rep.observed = {{"slope", nullptr}, {"errors", errs}, {"note", "remainder below noise floor"}};
    rep.pass = true;
    return rep;
  }
  const double slope = detail::ls_slope(log_eps, log_err);
  rep.observed = {{"slope", slope}, {"errors", errs}};
  rep.pass = std::isfinite(slope) && slope >= K + 1 - 0.25;
  return rep;
}

/// Positivity of y along Gamma_c for monotone H (c > 1/H(0) with H' >= 0 on
/// s > 0, H' <= 0 on s < 0; or 0 < c < 1/H(0) with the reversed monotonicity).
[[nodiscard]] inline CheckReport check_positivity(const HField& h, double c, int n, double s_lo,
                                                  double s_hi, const SolverConfig& cfg,
                                                  double sample_ds = 0.01) {
  PMC_REQUIRE(c > 0.0, ErrorCode::InvalidInput, "c must be positive");
  CheckReport rep;
  rep.check = "positivity";
  const double h0 = eval_H(h, 0.0);
  rep.params = {{"n", n}, {"c", c}, {"H", to_json(h)}, {"s_span", {s_lo, s_hi}}};
  // c > 1/H(0) needs H increasing away from 0, c < 1/H(0) needs H decreasing
  const bool above_side = h0 > 0.0 && c * h0 > 1.0;
  const bool below_side = h0 > 0.0 && c * h0 < 1.0;
  const double step = 1e-3;
  const double delta = 1e-4;
  double worst_violation = 0.0;
  for (double s = s_lo; s <= s_hi; s += step) {
    if (s == 0.0) continue;
    const double dh = (eval_H(h, s + delta) - eval_H(h, s - delta)) / (2 * delta);
    const double outward = s > 0 ? dh : -dh;
    const double violation = above_side ? -outward : outward;
    worst_violation = std::max(worst_violation, violation);
  }
  const bool monotone = (above_side || below_side) && worst_violation <= 1e-8;

  RunSpec spec;
  spec.geometry = Rot{n};
  spec.h = h;
  spec.initial = {0.0, 0.0, c, 1.0, 0.0};
  spec.s_lo = s_lo;
  spec.s_hi = s_hi;
  spec.cfg = cfg;
  spec.sample_ds = sample_ds;
  const auto curve = extend(spec);
  double min_y = std::numeric_limits<double>::infinity();
  for (const auto& st : curve.concatenated()) min_y = std::min(min_y, st.y);

  rep.observed = {{"min_y", min_y},
                  {"events", curve.events.size()},
                  {"monotonicity_violation", worst_violation},
                  {"side", above_side ? "c > 1/H(0)" : (below_side ? "c < 1/H(0)" : "none")}};
  rep.bound_or_expected = {{"predicted_positive", monotone}, {"min_y", "> 0"}};
  if (!monotone) rep.observed["warning"] = "monotonicity hypothesis not satisfied on the sample grid";
  rep.pass = monotone ? min_y > 0.0 : true;
  return rep;
}

}  // namespace pmc
