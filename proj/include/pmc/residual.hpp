#pragma once

// Pointwise residuals of the generating-curve equations.

#include "pmc/error.hpp"
#include "pmc/types.hpp"

namespace pmc {

/// (n-1) H - (n-2) x'/y - (x'' y' - x' y''); zero on solutions of the O(n-1) equation.
[[nodiscard]] inline double residual_rot(const CurveState& st, SecondDerivatives d2, int n,
                                         double h_val) {
  PMC_REQUIRE(st.y != 0.0, ErrorCode::DivisionByAxis, "residual_rot evaluated on the axis y = 0");
  const double turning = d2.xpp * st.yp - st.xp * d2.ypp;
  return (n - 1) * h_val - (n - 2) * st.xp / st.y - turning;
}

/// l y'/x - m x'/y - (x'' y' - x' y'') + (n-1) H with n = l + m + 2.
[[nodiscard]] inline double residual_lm(const CurveState& st, SecondDerivatives d2, int l, int m,
                                        double h_val) {
  PMC_REQUIRE(st.y != 0.0, ErrorCode::DivisionByAxis, "residual_lm evaluated on y = 0");
  const double turning = d2.xpp * st.yp - st.xp * d2.ypp;
  const int n = l + m + 2;
  // l = 0 drops the x-orbit term entirely, so x may be zero there
  const double x_term = l == 0 ? 0.0 : l * st.yp / st.x;
  PMC_REQUIRE(l == 0 || st.x != 0.0, ErrorCode::DivisionByAxis, "residual_lm evaluated on x = 0");
  return x_term - m * st.xp / st.y - turning + (n - 1) * h_val;
}

}  // namespace pmc
