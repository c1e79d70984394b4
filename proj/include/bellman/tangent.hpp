#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "bellman/boundary.hpp"

namespace bellman {

enum class Orientation { Right, Left };

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Slope function m(u) of a tangent-segment family, tabulated on a uniform
/// grid together with its second derivative. Right orientation solves
/// m' + m = f' with m'' <= 0; Left solves -m' + m = f' with m'' >= 0.
///
/// For the entire analytic families the solution is carried in closed form:
/// m(u) = particular(u) + hom * e^{-u} (Right) or + hom * e^{+u} (Left),
/// where particular is the decaying-tail solution. Grid families (pmom,
/// table) evaluate through interpolation of the tabulated values.
struct TangentSolution {
  Orientation orientation = Orientation::Right;
  double u1 = -kInf, u2 = kInf;  // solution range (may be infinite)

  double grid_lo = 0.0, grid_step = 0.0;
  std::vector<double> m;   // node values
  std::vector<double> m2;  // node second derivatives (from the ODE identity)

  bool closed = false;
  Family family = Family::Quad;
  double fparam = 0.0;
  double hom = 0.0;

  double grid_hi() const { return grid_lo + grid_step * double(m.size() - 1); }
  double value(double u) const;
  /// m'' via the ODE identity (exact given m): Right: f'' - f' + m; Left: m - f' - f''.
  double deriv2(const BoundaryData& bd, double u) const;
  /// Builds the interpolation channel; called after construction or load.
  void finalize() { ensure_interp(); }

 private:
  mutable std::optional<UniformPchip> interp_;  // built lazily over `m`
  void ensure_interp() const;
};

/// Decaying-tail slope in closed form; defined for Exp/NegExp/Quad/Poly5.
bool has_closed_m(Family f);
double particular_m(Family f, double param, Orientation o, double u);

struct TangentParams {
  double h = 1e-3;            // grid step (closed-form families)
  double h_grid = 2.5e-4;     // grid step (interpolated families)
  double window_lo = -16.0;   // tabulation window, clipped to [u1,u2]
  double window_hi = 16.0;
  bool certify = true;        // enforce the m'' sign certificate on [u1,u2]
  double tol_sign = 1e-9;     // certificate slack (scaled)
  double tail_block = 4.0;    // tail truncation block width
};

struct InitialValue {
  double u;
  double m;
};

/// Builds the slope function on [u1,u2]. An infinite side (u1=-inf for Right,
/// u2=+inf for Left) forbids an initial value (the decaying integral fixes
/// the solution); a finite-sided call requires one.
TangentSolution solve_m(const BoundaryData& bd, Orientation o, double u1, double u2,
                        std::optional<InitialValue> initial, const TangentParams& p = {});

/// Throws RegimeError at the first grid node violating the orientation's
/// m'' sign condition on [lo, hi].
void certify_tangent(const TangentSolution& ts, const BoundaryData& bd, double lo,
                     double hi, double tol_sign = 1e-9);

}  // namespace bellman
