#include "bellman/roots.hpp"

#include <cmath>

#include "bellman/errors.hpp"

namespace bellman {

double bisect(const std::function<double(double)>& f, double lo, double hi, double flo,
              double fhi, double xtol) {
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0) == (fhi > 0)) throw NoRootError("bisect: no sign change on bracket");
  for (int i = 0; i < 200 && hi - lo > xtol; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

bool scan_for_bracket(const std::function<double(double)>& f, double lo, double hi, double step,
                      double& blo, double& bhi) {
  double x = lo, fx = f(lo);
  while (x < hi) {
    const double xn = std::min(x + step, hi);
    const double fn = f(xn);
    if (fx == 0.0 || (fx > 0) != (fn > 0)) {
      blo = x;
      bhi = xn;
      return true;
    }
    x = xn;
    fx = fn;
  }
  return false;
}

bool newton2d(const std::function<void(const double*, double*)>& F, double x[2], double ftol,
              int max_iter) {
  double Fx[2];
  F(x, Fx);
  for (int it = 0; it < max_iter; ++it) {
    double norm = std::fabs(Fx[0]) + std::fabs(Fx[1]);
    if (!(norm == norm)) return false;
    if (norm <= ftol) return true;
    double J[2][2];
    for (int j = 0; j < 2; ++j) {
      const double h = 1e-7 * (1.0 + std::fabs(x[j]));
      double xp[2] = {x[0], x[1]};
      xp[j] += h;
      double Fp[2];
      F(xp, Fp);
      J[0][j] = (Fp[0] - Fx[0]) / h;
      J[1][j] = (Fp[1] - Fx[1]) / h;
    }
    const double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
    if (std::fabs(det) < 1e-300) return false;
    double dx0 = -(J[1][1] * Fx[0] - J[0][1] * Fx[1]) / det;
    double dx1 = -(-J[1][0] * Fx[0] + J[0][0] * Fx[1]) / det;
    // damped step: halve until the residual shrinks
    double lam = 1.0;
    for (int k = 0; k < 30; ++k, lam *= 0.5) {
      double xn[2] = {x[0] + lam * dx0, x[1] + lam * dx1};
      double Fn[2];
      F(xn, Fn);
      if (std::fabs(Fn[0]) + std::fabs(Fn[1]) < norm) {
        x[0] = xn[0];
        x[1] = xn[1];
        Fx[0] = Fn[0];
        Fx[1] = Fn[1];
        break;
      }
      if (k == 29) return false;
    }
  }
  return std::fabs(Fx[0]) + std::fabs(Fx[1]) <= ftol;
}

}  // namespace bellman
