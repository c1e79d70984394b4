#include "bellman/interp.hpp"

#include <cstdio>

namespace bellman {

double invert_monotone(const UniformPchip& p, double target, double tol) {
  double lo = p.lo(), hi = p.hi();
  double flo = p.value(lo) - target;
  double fhi = p.value(hi) - target;
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0) == (fhi > 0)) {
    // endpoint values re-evaluated through the cubic can be an ulp away from
    // the stored nodes; absorb targets that close instead of failing
    const double slack = 1e-12 * (std::fabs(flo - fhi) + std::fabs(target));
    if (std::fabs(flo) <= slack) return lo;
    if (std::fabs(fhi) <= slack) return hi;
    char buf[160];
    snprintf(buf, sizeof buf,
             "invert_monotone: target %.17g outside [%.17g, %.17g]", target,
             p.value(p.lo()), p.value(p.hi()));
    throw DomainError(buf);
  }
  for (int i = 0; i < 120 && hi - lo > tol * (1.0 + std::fabs(lo) + std::fabs(hi)); ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = p.value(mid) - target;
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

}  // namespace bellman
