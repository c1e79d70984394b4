#include "bellman/chordal.hpp"

#include <algorithm>
#include <cmath>

#include "bellman/errors.hpp"

namespace bellman {

double cup_residual(const BoundaryData& bd, double a, double b) {
  return (bd.f(b) - bd.f(a)) / (b - a) - (bd.f1(a) + bd.f1(b)) / 2.0;
}

void chord_differentials(const BoundaryData& bd, double a, double b, double& DL, double& DR) {
  if (bd.family() == Family::PMoment && std::fabs(a + b) <= 1e-9 * (b - a)) {
    // symmetric chord of |t|^p: both differentials collapse to p(p-2)(l/2)^{p-2}
    const double p = bd.param();
    const double half = (b - a) / 2.0;
    const double d = half > 0 ? p * (p - 2.0) * std::pow(half, p - 2.0) : 0.0;
    DL = DR = d;
    return;
  }
  const double slope = (bd.f1(b) - bd.f1(a)) / (b - a);
  DL = bd.f2(a) - slope;
  DR = bd.f2(b) - slope;
}

void ChordalSolution::ensure_interp() const {
  if (!ia_ && a.size() >= 2) {
    ia_.emplace(grid_lo, grid_step, a);
    ib_.emplace(grid_lo, grid_step, b);
  }
  if (!iA_ && A.size() >= 2) iA_.emplace(grid_lo, grid_step, A);
}

double ChordalSolution::a_at(double ell) const {
  ensure_interp();
  return ia_->value(ell);
}
double ChordalSolution::b_at(double ell) const {
  ensure_interp();
  return ib_->value(ell);
}
double ChordalSolution::A_value(double ell) const {
  ensure_interp();
  if (!iA_) throw Error("chordal solution has no transported values yet");
  return iA_->value(ell);
}
double ChordalSolution::ell_from_a(double av) const {
  ensure_interp();
  return invert_monotone(*ia_, av);
}
double ChordalSolution::ell_from_b(double bv) const {
  ensure_interp();
  return invert_monotone(*ib_, bv);
}

namespace {

struct Derivs {
  double da;  // da/dl
  double DL, DR;
};

Derivs cup_derivs(const BoundaryData& bd, double a, double ell) {
  Derivs d{};
  chord_differentials(bd, a, a + ell, d.DL, d.DR);
  const double den = d.DL + d.DR;
  if (den == 0.0) {
    d.da = -0.5;  // symmetric limit; callers guard genuine degeneracy separately
  } else {
    d.da = -d.DR / den;
  }
  return d;
}

void newton_project(const BoundaryData& bd, double& a, double ell, double tol, int max_iter) {
  for (int i = 0; i < max_iter; ++i) {
    const double b = a + ell;
    const double r = cup_residual(bd, a, b);
    if (std::fabs(r) <= tol) return;
    double DL, DR;
    chord_differentials(bd, a, b, DL, DR);
    const double rp = -(DL + DR) / 2.0;
    if (std::fabs(rp) < 1e-300) return;
    const double step = r / rp;
    if (!std::isfinite(step) || std::fabs(step) > 0.5 * ell + 1.0)
      throw StepSizeError("cup corrector diverged");
    a -= step;
  }
}

double f_scale(const BoundaryData& bd, double a, double b) {
  return std::max({1.0, std::fabs(bd.f1(a)), std::fabs(bd.f1(b))});
}

}  // namespace

ChordalSolution solve_cup(const BoundaryData& bd, double a0, double b0, double ell1,
                          const CupParams& p) {
  if (!(b0 > a0)) throw DomainError("cup seed requires a0 < b0");
  if (b0 - a0 > 2.0 + 1e-12) throw DomainError("cup chord longer than 2");
  if (ell1 < 0.0 || ell1 >= b0 - a0) throw DomainError("inner chord length out of range");

  const double ell0 = b0 - a0;
  // project the seed onto the cup equation
  {
    const double tol = p.tol_cup * f_scale(bd, a0, b0);
    if (std::fabs(cup_residual(bd, a0, b0)) > 1e6 * tol)
      throw DomainError("seed chord is far from the cup equation");
    newton_project(bd, a0, ell0, tol, 2 * p.max_newton);
    b0 = a0 + ell0;
  }

  const double h_pub = p.h / 2.0;  // stored resolution
  const std::size_t cells = std::max<std::size_t>(2, std::size_t(std::ceil((ell0 - ell1) / h_pub)));
  const double h = (ell0 - ell1) / double(cells);
  const std::size_t n = cells + 1;

  ChordalSolution ch;
  ch.ell1 = ell1;
  ch.ell0 = ell0;
  ch.grid_lo = ell1;
  ch.grid_step = h;
  ch.a.assign(n, 0.0);
  ch.b.assign(n, 0.0);
  ch.dl.assign(n, 0.0);
  ch.dr.assign(n, 0.0);

  // march downwards from ell0 (index n-1) to ell1 (index 0)
  const bool closes = ell1 == 0.0;
  const double snap_ell = closes ? std::max(4.0 * h, 1e-3) : ell1;
  double a = a0;
  std::size_t i = n - 1;
  ch.a[i] = a;
  ch.b[i] = b0;
  {
    Derivs d0 = cup_derivs(bd, a, ell0);
    ch.dl[i] = d0.DL;
    ch.dr[i] = d0.DR;
    const double dtol = 1e-12 * std::max({1.0, std::fabs(bd.f2(a0)), std::fabs(bd.f2(b0))});
    if (d0.DL >= -dtol || d0.DR >= -dtol)
      throw DegenerateChordError("chord differentials must be negative at the seed", ell0);
  }
  while (i > 0) {
    const double ell = ch.ell_at(i);
    const double eln = ch.ell_at(i - 1);
    if (closes && eln < snap_ell - 1e-12) break;
    // RK4 predictor on da/dl (integrating towards smaller l)
    const Derivs k1 = cup_derivs(bd, a, ell);
    const Derivs k2 = cup_derivs(bd, a - 0.5 * h * k1.da, ell - 0.5 * h);
    const Derivs k3 = cup_derivs(bd, a - 0.5 * h * k2.da, ell - 0.5 * h);
    const Derivs k4 = cup_derivs(bd, a - h * k3.da, eln);
    a -= h * (k1.da + 2.0 * k2.da + 2.0 * k3.da + k4.da) / 6.0;
    if (eln >= p.corrector_floor)
      newton_project(bd, a, eln, p.tol_cup * f_scale(bd, a, a + eln), p.max_newton);
    --i;
    ch.a[i] = a;
    ch.b[i] = a + eln;
    Derivs d = cup_derivs(bd, a, eln);
    ch.dl[i] = d.DL;
    ch.dr[i] = d.DR;
    const double dtol = 1e-12 * std::max({1.0, std::fabs(bd.f2(ch.a[i])), std::fabs(bd.f2(ch.b[i]))});
    const bool near_closure = closes && eln <= std::max(0.2, 8.0 * snap_ell);
    if ((d.DL >= -dtol || d.DR >= -dtol) && !near_closure)
      throw DegenerateChordError("chord differential reached zero", eln);
  }

  if (closes && i > 0) {
    // Richardson estimate of the closure point from the midpoints at l and 2l
    const double li = ch.ell_at(i);
    const std::size_t i2 = std::min(n - 1, 2 * i);
    const double m1 = ch.a[i] + li / 2.0;
    const double m2 = ch.a[i2] + ch.ell_at(i2) / 2.0;
    double tstar = m1;
    if (std::fabs(ch.ell_at(i2) - 2.0 * li) < 1e-12 && i2 != i) tstar = (4.0 * m1 - m2) / 3.0;
    const double quad = (ch.a[i] + li / 2.0 - tstar) / (li * li);
    for (std::size_t j = 0; j < i; ++j) {
      const double l = ch.ell_at(j);
      ch.a[j] = tstar - l / 2.0 + quad * l * l;
      ch.b[j] = ch.a[j] + l;
      if (j == 0 && l == 0.0) {
        ch.dl[j] = ch.dr[j] = 0.0;
      } else {
        Derivs d = cup_derivs(bd, ch.a[j], l);
        ch.dl[j] = d.DL;
        ch.dr[j] = d.DR;
      }
    }
    ch.closure_t = tstar;
  } else if (closes) {
    ch.closure_t = ch.a[0];
  }

  // monotone tables are required for the herringbone lookup
  for (std::size_t j = 0; j + 1 < n; ++j) {
    if (!(ch.a[j] >= ch.a[j + 1]) || !(ch.b[j] <= ch.b[j + 1]))
      throw StepSizeError("chord continuation lost monotonicity");
  }

  ch.finalize();
  return ch;
}

void solve_A(ChordalSolution& ch, const BoundaryData& bd, double A_at_ell0) {
  const std::size_t n = ch.size();
  if (n < 3) throw DomainError("chord table too short");
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double den = ch.dl[i] + ch.dr[i];
    const double fa = bd.f(ch.a[i]), fb = bd.f(ch.b[i]);
    if (std::fabs(den) <= 1e-14 * (std::fabs(ch.dl[i]) + std::fabs(ch.dr[i]))) {
      if (ch.dl[i] * ch.dr[i] < 0.0)
        throw DegenerateChordError("transport integrand degenerate (DL+DR = 0)", ch.ell_at(i));
      g[i] = 0.5 * (fa + fb);
    } else {
      g[i] = (fa * ch.dl[i] + fb * ch.dr[i]) / den;
    }
  }

  // I(l) = int_l^{l0} g(s)/s^2 ds accumulated cellwise with exact moments of a
  // local parabola fit (the 1/s^2 weight is too stiff for plain Simpson)
  std::vector<double> I(n, 0.0);
  const bool closed_end = ch.ell1 == 0.0;
  const std::size_t bottom = closed_end ? 1 : 0;
  for (std::size_t ii = n - 1; ii > bottom; --ii) {
    const std::size_t i = ii - 1;  // cell [i, i+1]
    std::size_t t0 = i == bottom ? bottom : i - 1;
    if (t0 + 2 >= n) t0 = n - 3;
    const double xa = ch.ell_at(t0), xb = ch.ell_at(t0 + 1), xc = ch.ell_at(t0 + 2);
    const double ya = g[t0], yb = g[t0 + 1], yc = g[t0 + 2];
    // power-basis coefficients of the parabola through the three nodes
    const double d1 = (yb - ya) / (xb - xa);
    const double d2 = ((yc - yb) / (xc - xb) - d1) / (xc - xa);
    const double c2 = d2;
    const double c1 = d1 - d2 * (xa + xb);
    const double c0 = ya - xa * d1 + d2 * xa * xb;
    const double lo = ch.ell_at(i), hi = ch.ell_at(i + 1);
    const double cell = c0 * (1.0 / lo - 1.0 / hi) + c1 * std::log(hi / lo) + c2 * (hi - lo);
    I[i] = I[i + 1] + cell;
  }

  ch.A.assign(n, 0.0);
  ch.A_at_ell0 = A_at_ell0;
  for (std::size_t i = bottom; i < n; ++i)
    ch.A[i] = ch.ell_at(i) * (A_at_ell0 / ch.ell0 + I[i]);
  if (closed_end) ch.A[0] = g[0];  // limit value f(t*) at the closure point
  ch.iA_.reset();
  ch.finalize();
}

}  // namespace bellman
