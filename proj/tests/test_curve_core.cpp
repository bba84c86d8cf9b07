#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "pmc/hfield.hpp"
#include "pmc/residual.hpp"
#include "pmc/types.hpp"

using namespace pmc;

namespace {

// Independent transcription of the O(n-1) equation used as an oracle.
double rot_oracle(double y, double xp, double yp, double xpp, double ypp, int n, double h) {
  return (n - 1) * h - (n - 2) * xp / y - (xpp * yp - xp * ypp);
}

}  // namespace

TEST(EvalH, Constant) { EXPECT_EQ(eval_H(ConstantH{2.0}, 5.0), 2.0); }

TEST(EvalH, LinearTableMidpoint) {
  const HField h = TableH({{0.0, 1.0}, {1.0, 3.0}}, Interpolation::Linear, Extrapolation::Clamp);
  EXPECT_DOUBLE_EQ(eval_H(h, 0.5), 2.0);
  EXPECT_DOUBLE_EQ(eval_H(h, -3.0), 1.0);
  EXPECT_DOUBLE_EQ(eval_H(h, 7.0), 3.0);
}

TEST(EvalH, FourierAtZero) {
  const HField h = FourierH{1.0, {0.5}, {}, 1.0};
  EXPECT_DOUBLE_EQ(eval_H(h, 0.0), 1.5);
}

TEST(EvalH, PolynomialHorner) {
  const HField h = PolynomialH{{1.0, 0.0, 1.0}};
  EXPECT_DOUBLE_EQ(eval_H(h, 2.0), 5.0);
  EXPECT_DOUBLE_EQ(eval_H(h, -2.0), 5.0);
}

TEST(EvalH, PeriodicTableWraps) {
  const HField h =
      TableH({{0.0, 0.0}, {1.0, 1.0}, {2.0, 0.0}}, Interpolation::Linear, Extrapolation::Periodic);
  EXPECT_NEAR(eval_H(h, 2.5), 0.5, 1e-15);
  EXPECT_NEAR(eval_H(h, -0.5), 0.5, 1e-15);
  EXPECT_NEAR(eval_H(h, 5.0), 1.0, 1e-15);
}

TEST(EvalH, CubicTableInterpolatesKnotsAndSmoothFunction) {
  std::vector<std::pair<double, double>> samples;
  for (int i = 0; i <= 100; ++i) {
    const double s = -2.0 + 0.04 * i;
    samples.emplace_back(s, std::sin(s));
  }
  const HField h = TableH(samples, Interpolation::Cubic, Extrapolation::Clamp);
  for (const auto& [s, v] : samples) EXPECT_NEAR(eval_H(h, s), v, 1e-14);
  for (double s = -1.5; s <= 1.5; s += 0.013) EXPECT_NEAR(eval_H(h, s), std::sin(s), 1e-6);
}

TEST(EvalH, TableRejectsUnsortedAbscissae) {
  try {
    TableH({{0.0, 1.0}, {0.0, 2.0}}, Interpolation::Linear, Extrapolation::Clamp);
    FAIL() << "expected InvalidInput";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidInput);
  }
}

TEST(HFieldJson, RoundTripAllKinds) {
  const std::vector<HField> fields = {
      ConstantH{1.25},
      PolynomialH{{1.0, -2.0, 0.5}},
      FourierH{0.5, {0.25, 0.125}, {1.0}, 2.0},
      TableH({{0.0, 1.0}, {0.5, 2.0}, {1.0, 0.0}}, Interpolation::Cubic, Extrapolation::Periodic)};
  for (const auto& h : fields) {
    const auto back = hfield_from_json(to_json(h));
    for (double s = -3.0; s <= 3.0; s += 0.37) EXPECT_DOUBLE_EQ(eval_H(back, s), eval_H(h, s));
  }
}

TEST(HFieldJson, ParsesDocumentedForms) {
  EXPECT_DOUBLE_EQ(eval_H(hfield_from_string(R"({"kind":"constant","value":1.0})"), 3.0), 1.0);
  EXPECT_DOUBLE_EQ(
      eval_H(hfield_from_string(R"({"kind":"table","samples":[[0,1],[1,3]],"interp":"linear","extrap":"clamp"})"),
             0.5),
      2.0);
}

TEST(HFieldJson, MalformedInputIsInvalidInput) {
  for (const char* text : {"not json", R"({"value":1})", R"({"kind":"weird"})",
                           R"({"kind":"constant"})", R"({"kind":"table","samples":[[0,1]]})"}) {
    try {
      (void)hfield_from_string(text);
      FAIL() << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::InvalidInput) << text;
    }
  }
}

TEST(ResidualRot, CylinderIsExact) {
  for (int n = 3; n <= 6; ++n) {
    const double c = 1.7;
    const CurveState st{0.0, 0.3, c, 1.0, 0.0};
    EXPECT_NEAR(residual_rot(st, {0.0, 0.0}, n, (n - 2) / ((n - 1) * c)), 0.0, 1e-15);
  }
}

TEST(ResidualRot, UnitCircleAtQuarterPi) {
  const double s = std::numbers::pi / 4;
  const CurveState st{s, std::sin(s), std::cos(s), std::cos(s), -std::sin(s)};
  EXPECT_NEAR(residual_rot(st, {-std::sin(s), -std::cos(s)}, 3, 1.0), 0.0, 1e-15);
}

TEST(ResidualRot, PerturbedCylinderMatchesOracle) {
  const double yp = 0.1;
  const double xp = std::sqrt(1 - yp * yp);
  const CurveState st{0.0, 0.0, 2.0, xp, yp};
  const double got = residual_rot(st, {0.0, 0.0}, 4, 1.0 / 3.0);
  EXPECT_NE(got, 0.0);
  EXPECT_NEAR(got, rot_oracle(2.0, xp, yp, 0.0, 0.0, 4, 1.0 / 3.0), 1e-13 * std::abs(got));
}

TEST(ResidualRot, MatchesOracleOnRandomStates) {
  for (int i = 1; i < 50; ++i) {
    const double a = 0.37 * i;
    const double y = 0.2 + std::fmod(0.71 * i, 3.0);
    const double k = std::sin(1.3 * i);
    const CurveState st{0.0, 0.0, y, std::cos(a), std::sin(a)};
    const SecondDerivatives d2{-k * std::sin(a), k * std::cos(a)};
    const double got = residual_rot(st, d2, 3 + i % 4, 0.3 * i);
    const double want =
        rot_oracle(y, std::cos(a), std::sin(a), d2.xpp, d2.ypp, 3 + i % 4, 0.3 * i);
    EXPECT_NEAR(got, want, 1e-13 * std::max(1.0, std::abs(want)));
  }
}

TEST(ResidualRot, AxisIsRejected) {
  try {
    (void)residual_rot({0.0, 1.0, 0.0, 0.0, 1.0}, {}, 3, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DivisionByAxis);
  }
}

TEST(ResidualLm, MinimalConeCancels) {
  const double a = 1 / std::sqrt(2.0);
  const CurveState st{1.0, a, a, a, a};
  EXPECT_NEAR(residual_lm(st, {0.0, 0.0}, 1, 1, 0.0), 0.0, 1e-15);
}

TEST(ResidualLm, SphereNeedsMinusOne) {
  const double s = std::numbers::pi / 4;
  const CurveState st{s, std::cos(s), std::sin(s), -std::sin(s), std::cos(s)};
  const SecondDerivatives d2{-std::cos(s), -std::sin(s)};
  EXPECT_NEAR(residual_lm(st, d2, 1, 1, -1.0), 0.0, 1e-14);
  EXPECT_NEAR(residual_lm(st, d2, 1, 1, 0.0), 3.0, 1e-14);
}

TEST(ResidualLm, ReducesToRotWhenLIsZero) {
  for (int i = 1; i < 30; ++i) {
    const double a = 0.41 * i;
    const CurveState st{0.0, 0.5 + i, 0.3 + 0.1 * i, std::cos(a), std::sin(a)};
    const SecondDerivatives d2{-0.7 * std::sin(a), 0.7 * std::cos(a)};
    const int n = 3 + i % 5;
    const double h = 0.2 * i - 2.0;
    EXPECT_NEAR(residual_lm(st, d2, 0, n - 2, h), residual_rot(st, d2, n, h), 1e-13);
  }
}

TEST(ResidualLm, AxesAreRejected) {
  for (const CurveState st : {CurveState{0, 0.0, 1.0, 1.0, 0.0}, CurveState{0, 1.0, 0.0, 0.0, 1.0}}) {
    try {
      (void)residual_lm(st, {}, 1, 1, 0.0);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::DivisionByAxis);
    }
  }
}

TEST(Geometry, Validation) {
  EXPECT_NO_THROW(validate(Geometry{Rot{3}}));
  EXPECT_THROW(validate(Geometry{Rot{2}}), Error);
  EXPECT_THROW(validate(Geometry{Product{0, 1}}), Error);
  EXPECT_EQ(ambient_dimension(Product{2, 3}), 7);
}

TEST(SolverConfig, Validation) {
  SolverConfig c;
  EXPECT_NO_THROW(c.validate());
  c.chart_Y_shrink = 1.0;
  EXPECT_THROW(c.validate(), Error);
  c = SolverConfig{};
  c.rk_tol = 0.0;
  EXPECT_THROW(c.validate(), Error);
}
