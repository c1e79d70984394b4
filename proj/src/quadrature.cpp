#include "bellman/quadrature.hpp"

#include <cmath>

namespace bellman {

double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  if (a == b) return 0.0;
  if (n < 2) n = 2;
  if (n % 2) ++n;
  const double h = (b - a) / n;
  long double acc = f(a) + f(b);
  for (int i = 1; i < n; i += 2) acc += 4.0L * f(a + h * i);
  for (int i = 2; i < n; i += 2) acc += 2.0L * f(a + h * i);
  return double(acc * h / 3.0L);
}

double integrate_left_tail(const std::function<double(double)>& f, double b, double block,
                           double h, double rel_tol) {
  const int steps = std::max(2, int(std::ceil(block / h)));
  long double acc = 0.0L;
  double hi = b;
  for (int k = 0; k < 4096; ++k) {
    const double piece = simpson(f, hi - block, hi, steps);
    acc += piece;
    hi -= block;
    if (std::fabs(piece) < rel_tol * std::fabs(double(acc)) + 1e-300) break;
  }
  return double(acc);
}

double integrate_right_tail(const std::function<double(double)>& f, double a, double block,
                            double h, double rel_tol) {
  const int steps = std::max(2, int(std::ceil(block / h)));
  long double acc = 0.0L;
  double lo = a;
  for (int k = 0; k < 4096; ++k) {
    const double piece = simpson(f, lo, lo + block, steps);
    acc += piece;
    lo += block;
    if (std::fabs(piece) < rel_tol * std::fabs(double(acc)) + 1e-300) break;
  }
  return double(acc);
}

}  // namespace bellman
