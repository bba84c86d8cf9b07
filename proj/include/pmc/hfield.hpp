#pragma once

// Prescribed mean curvature H(s) as a closed set of serializable variants.

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "pmc/error.hpp"

namespace pmc {

struct ConstantH {
  double value = 0.0;
};

/// H(s) = sum_k coeffs[k] s^k
struct PolynomialH {
  std::vector<double> coeffs;
};

/// H(s) = a0 + sum_k cos_coeffs[k] cos((k+1) w s) + sin_coeffs[k] sin((k+1) w s)
struct FourierH {
  double a0 = 0.0;
  std::vector<double> cos_coeffs;
  std::vector<double> sin_coeffs;
  double frequency = 1.0;
};

enum class Interpolation { Linear, Cubic };
enum class Extrapolation { Clamp, Periodic };

class TableH {
 public:
  TableH(std::vector<std::pair<double, double>> samples, Interpolation interp,
         Extrapolation extrap)
      : interp_(interp), extrap_(extrap) {
    PMC_REQUIRE(samples.size() >= 2, ErrorCode::InvalidInput, "table needs at least two samples");
    s_.reserve(samples.size());
    h_.reserve(samples.size());
    for (const auto& [s, h] : samples) {
      PMC_REQUIRE(std::isfinite(s) && std::isfinite(h), ErrorCode::InvalidInput,
                  "table samples must be finite");
      PMC_REQUIRE(s_.empty() || s > s_.back(), ErrorCode::InvalidInput,
                  "table abscissae must be strictly increasing");
      s_.push_back(s);
      h_.push_back(h);
    }
    if (interp_ == Interpolation::Cubic) build_natural_spline();
  }

  [[nodiscard]] double operator()(double s) const {
    const double lo = s_.front();
    const double hi = s_.back();
    if (extrap_ == Extrapolation::Periodic) {
      const double period = hi - lo;
      s = lo + std::fmod(s - lo, period);
      if (s < lo) s += period;
    } else {
      s = std::clamp(s, lo, hi);
    }
    auto it = std::upper_bound(s_.begin(), s_.end(), s);
    std::size_t j = it == s_.begin() ? 0 : static_cast<std::size_t>(it - s_.begin()) - 1;
    j = std::min(j, s_.size() - 2);
    const double h = s_[j + 1] - s_[j];
    const double t = (s - s_[j]) / h;
    const double linear = (1.0 - t) * h_[j] + t * h_[j + 1];
    if (interp_ == Interpolation::Linear) return linear;
    // natural cubic spline in second-derivative form
    const double a = 1.0 - t;
    return linear + h * h / 6.0 * ((a * a * a - a) * m_[j] + (t * t * t - t) * m_[j + 1]);
  }

  [[nodiscard]] std::vector<std::pair<double, double>> samples() const {
    std::vector<std::pair<double, double>> out;
    for (std::size_t i = 0; i < s_.size(); ++i) out.emplace_back(s_[i], h_[i]);
    return out;
  }
  [[nodiscard]] Interpolation interpolation() const { return interp_; }
  [[nodiscard]] Extrapolation extrapolation() const { return extrap_; }

 private:
  void build_natural_spline() {
    const std::size_t n = s_.size();
    m_.assign(n, 0.0);
    if (n < 3) return;
    // tridiagonal solve for interior second derivatives, m_0 = m_{n-1} = 0
    std::vector<double> c(n, 0.0), d(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double h0 = s_[i] - s_[i - 1];
      const double h1 = s_[i + 1] - s_[i];
      const double diag = 2.0 * (h0 + h1);
      const double rhs = 6.0 * ((h_[i + 1] - h_[i]) / h1 - (h_[i] - h_[i - 1]) / h0);
      const double denom = diag - h0 * c[i - 1];
      c[i] = h1 / denom;
      d[i] = (rhs - h0 * d[i - 1]) / denom;
    }
    for (std::size_t i = n - 2; i >= 1; --i) {
      m_[i] = d[i] - c[i] * m_[i + 1];
    }
  }

  std::vector<double> s_;
  std::vector<double> h_;
  std::vector<double> m_;
  Interpolation interp_;
  Extrapolation extrap_;
};

using HField = std::variant<ConstantH, PolynomialH, FourierH, TableH>;

[[nodiscard]] inline double eval_H(const HField& h, double s) {
  struct Visitor {
    double s;
    double operator()(const ConstantH& c) const { return c.value; }
    double operator()(const PolynomialH& p) const {
      double acc = 0.0;
      for (auto it = p.coeffs.rbegin(); it != p.coeffs.rend(); ++it) acc = acc * s + *it;
      return acc;
    }
    double operator()(const FourierH& f) const {
      double acc = f.a0;
      for (std::size_t k = 0; k < f.cos_coeffs.size(); ++k)
        acc += f.cos_coeffs[k] * std::cos(static_cast<double>(k + 1) * f.frequency * s);
      for (std::size_t k = 0; k < f.sin_coeffs.size(); ++k)
        acc += f.sin_coeffs[k] * std::sin(static_cast<double>(k + 1) * f.frequency * s);
      return acc;
    }
    double operator()(const TableH& t) const { return t(s); }
  };
  return std::visit(Visitor{s}, h);
}

[[nodiscard]] inline bool is_constant(const HField& h) {
  return std::holds_alternative<ConstantH>(h);
}

// ---------------------------------------------------------------------------
// JSON form: {"kind":"constant","value":1.0}, {"kind":"polynomial","coeffs":[..]},
// {"kind":"fourier","a0":..,"cos":[..],"sin":[..],"freq":..},
// {"kind":"table","samples":[[s,h],..],"interp":"linear","extrap":"clamp"}

inline nlohmann::json to_json(const HField& h) {
  using nlohmann::json;
  struct Visitor {
    json operator()(const ConstantH& c) const { return {{"kind", "constant"}, {"value", c.value}}; }
    json operator()(const PolynomialH& p) const {
      return {{"kind", "polynomial"}, {"coeffs", p.coeffs}};
    }
    json operator()(const FourierH& f) const {
      return {{"kind", "fourier"},
              {"a0", f.a0},
              {"cos", f.cos_coeffs},
              {"sin", f.sin_coeffs},
              {"freq", f.frequency}};
    }
    json operator()(const TableH& t) const {
      json samples = json::array();
      for (const auto& [s, v] : t.samples()) samples.push_back({s, v});
      return {{"kind", "table"},
              {"samples", samples},
              {"interp", t.interpolation() == Interpolation::Linear ? "linear" : "cubic"},
              {"extrap", t.extrapolation() == Extrapolation::Clamp ? "clamp" : "periodic"}};
    }
  };
  return std::visit(Visitor{}, h);
}

inline HField hfield_from_json(const nlohmann::json& j) {
  try {
    PMC_REQUIRE(j.is_object() && j.contains("kind"), ErrorCode::InvalidInput,
                "H must be a JSON object with a \"kind\" field");
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "constant") return ConstantH{j.at("value").get<double>()};
    if (kind == "polynomial") {
      auto coeffs = j.at("coeffs").get<std::vector<double>>();
      return PolynomialH{std::move(coeffs)};
    }
    if (kind == "fourier") {
      FourierH f;
      f.a0 = j.value("a0", 0.0);
      f.cos_coeffs = j.value("cos", std::vector<double>{});
      f.sin_coeffs = j.value("sin", std::vector<double>{});
      f.frequency = j.value("freq", 1.0);
      return f;
    }
    if (kind == "table") {
      std::vector<std::pair<double, double>> samples;
      for (const auto& row : j.at("samples")) {
        PMC_REQUIRE(row.is_array() && row.size() == 2, ErrorCode::InvalidInput,
                    "table samples must be [s, h] pairs");
        samples.emplace_back(row[0].get<double>(), row[1].get<double>());
      }
      const auto interp = j.value("interp", std::string("linear"));
      const auto extrap = j.value("extrap", std::string("clamp"));
      PMC_REQUIRE(interp == "linear" || interp == "cubic", ErrorCode::InvalidInput,
                  "interp must be linear or cubic");
      PMC_REQUIRE(extrap == "clamp" || extrap == "periodic", ErrorCode::InvalidInput,
                  "extrap must be clamp or periodic");
      return TableH(std::move(samples),
                    interp == "linear" ? Interpolation::Linear : Interpolation::Cubic,
                    extrap == "clamp" ? Extrapolation::Clamp : Extrapolation::Periodic);
    }
    throw Error(ErrorCode::InvalidInput, "unknown H kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidInput, std::string("malformed H json: ") + e.what());
  }
}

inline HField hfield_from_string(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidInput, std::string("cannot parse H json: ") + e.what());
  }
  return hfield_from_json(j);
}

}  // namespace pmc
