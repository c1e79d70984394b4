#pragma once

#include "bellman/boundary.hpp"
#include "bellman/tangent.hpp"

namespace bellman {

/// Bilinear piece V(x) = a11 (x1^2 - x2^2) + a1 x1 + a0 on a strip figure.
struct BilinearPatch {
  double a11 = 0, a1 = 0, a0 = 0;
  double eval(double x1, double x2) const { return a11 * (x1 * x1 - x2 * x2) + a1 * x1 + a0; }
};

/// Affine piece B(y) = b2 y2 + b1 y1 + b0 on a linearity domain.
struct AffinePatch {
  double b2 = 0, b1 = 0, b0 = 0;
  double eval(double y1, double y2) const { return b2 * y2 + b1 * y1 + b0; }
};

/// Solves m_R(w) + m_L(w) = 2 f'(w) on the bracket by bisection plus a Newton
/// polish (the ODEs give r' = m_L - m_R - 2 f'' in closed form). Throws
/// NoRootError when the residual does not change sign.
double solve_balance(const BoundaryData& bd, const TangentSolution& mR,
                     const TangentSolution& mL, double w_lo, double w_hi);

/// Angle/square coefficients at a balance point w.
AffinePatch angle_coeffs(const BoundaryData& bd, double w, const TangentSolution& mR,
                         const TangentSolution& mL);
BilinearPatch square_coeffs(const BoundaryData& bd, double w, const TangentSolution& mR,
                            const TangentSolution& mL);

/// Trolleybus/corner coefficients from the chord (a0,b0) of the cup equation.
AffinePatch trolleybus_coeffs(const BoundaryData& bd, double a0, double b0);
BilinearPatch corner_coeffs(const BoundaryData& bd, double a0, double b0);

}  // namespace bellman
