#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "bellman/boundary.hpp"

namespace bellman {

/// Chord family [a(l), b(l)] of the fixed parabola satisfying the cup
/// equation, parametrized by the chord's horizontal length l, plus the
/// transported spine values A(l). Grid is ascending in l (node 0 at ell1).
struct ChordalSolution {
  double ell1 = 0.0, ell0 = 2.0;
  double grid_lo = 0.0, grid_step = 0.0;
  std::vector<double> a, b, dl, dr;
  std::vector<double> A;  // empty until solve_A
  double closure_t = std::numeric_limits<double>::quiet_NaN();  // set when ell1 == 0
  double A_at_ell0 = 0.0;

  std::size_t size() const { return a.size(); }
  double ell_at(std::size_t i) const { return grid_lo + grid_step * double(i); }
  double a_at(double ell) const;
  double b_at(double ell) const;
  double A_value(double ell) const;
  double ell_from_a(double av) const;  // a is strictly decreasing in ell
  double ell_from_b(double bv) const;  // b is strictly increasing in ell
  void finalize() { ensure_interp(); }

 private:
  friend void solve_A(ChordalSolution&, const BoundaryData&, double);
  mutable std::optional<UniformPchip> ia_, ib_, iA_;
  void ensure_interp() const;
};

struct CupParams {
  double h = 1e-3;          // public grid step is h/2 (the march stores half-steps)
  double tol_cup = 1e-9;    // seed projection tolerance (scaled)
  double corrector_floor = 5e-2;  // below this ell the Newton corrector is skipped
  int max_newton = 8;
};

/// Residual of the cup equation at a chord (a,b).
double cup_residual(const BoundaryData& bd, double a, double b);

/// Chord differentials; negative values certify concavity of the chordal solution.
void chord_differentials(const BoundaryData& bd, double a, double b, double& DL, double& DR);

/// Continues the chord family from the seed (a0,b0) down to ell1 by a
/// predictor-corrector march on a' = -DR/(DL+DR), b = a + ell. Throws
/// DegenerateChordError when a differential reaches zero away from closure.
ChordalSolution solve_cup(const BoundaryData& bd, double a0, double b0, double ell1,
                          const CupParams& p = {});

/// Fills A(l) from the transport integral with the value at ell0 given by the
/// caller (for a full-length chord this is (f(a0)+f(b0))/2).
void solve_A(ChordalSolution& ch, const BoundaryData& bd, double A_at_ell0);

}  // namespace bellman
