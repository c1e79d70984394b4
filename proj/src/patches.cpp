#include "bellman/patches.hpp"

#include <cmath>

#include "bellman/errors.hpp"
#include "bellman/roots.hpp"

namespace bellman {

double solve_balance(const BoundaryData& bd, const TangentSolution& mR,
                     const TangentSolution& mL, double w_lo, double w_hi) {
  auto r = [&](double w) { return mR.value(w) + mL.value(w) - 2.0 * bd.f1(w); };
  const double flo = r(w_lo), fhi = r(w_hi);
  if (flo != 0.0 && fhi != 0.0 && (flo > 0) == (fhi > 0))
    throw NoRootError("balance residual does not change sign on the bracket");
  double w = bisect(r, w_lo, w_hi, flo, fhi, 1e-9);
  // Newton polish; the two slope ODEs give r' = m_L - m_R - 2 f'' exactly
  for (int i = 0; i < 40; ++i) {
    const double res = r(w);
    if (std::fabs(res) <= 1e-12 * std::max(1.0, std::fabs(bd.f1(w)))) return w;
    const double rp = mL.value(w) - mR.value(w) - 2.0 * bd.f2(w);
    if (std::fabs(rp) < 1e-300) break;
    const double step = res / rp;
    if (!std::isfinite(step) || std::fabs(step) > 0.5 * (w_hi - w_lo)) break;
    w -= step;
  }
  if (std::fabs(r(w)) > 1e-12 * std::max(1.0, std::fabs(bd.f1(w))))
    throw NoRootError("balance polish failed to reach tolerance");
  return w;
}

AffinePatch angle_coeffs(const BoundaryData& bd, double w, const TangentSolution& mR,
                         const TangentSolution& mL) {
  AffinePatch p;
  p.b2 = (mL.value(w) - mR.value(w)) / 4.0;
  p.b1 = bd.f1(w) - 2.0 * p.b2 * w;
  p.b0 = bd.f(w) - w * bd.f1(w) + p.b2 * w * w;
  return p;
}

BilinearPatch square_coeffs(const BoundaryData& bd, double w, const TangentSolution& mR,
                            const TangentSolution& mL) {
  const AffinePatch q = angle_coeffs(bd, w, mR, mL);
  BilinearPatch p;
  p.a11 = q.b2;
  p.a1 = q.b1;
  p.a0 = q.b0 + q.b2;
  return p;
}

AffinePatch trolleybus_coeffs(const BoundaryData& bd, double a0, double b0) {
  if (!(b0 > a0) || b0 - a0 > 2.0 + 1e-12)
    throw DomainError("trolleybus chord must satisfy 0 < b0 - a0 <= 2");
  const double avg_f2 = (bd.f1(b0) - bd.f1(a0)) / (b0 - a0);
  const double avg_f1 = (bd.f(b0) - bd.f(a0)) / (b0 - a0);
  AffinePatch p;
  p.b2 = 0.5 * avg_f2;
  p.b1 = avg_f1 - 0.5 * (b0 + a0) * avg_f2;
  p.b0 = (b0 * bd.f(a0) - a0 * bd.f(b0)) / (b0 - a0) + 0.5 * a0 * b0 * avg_f2;
  return p;
}

BilinearPatch corner_coeffs(const BoundaryData& bd, double a0, double b0) {
  const AffinePatch q = trolleybus_coeffs(bd, a0, b0);
  BilinearPatch p;
  p.a11 = q.b2;
  p.a1 = q.b1;
  p.a0 = q.b0 + q.b2;
  return p;
}

}  // namespace bellman
