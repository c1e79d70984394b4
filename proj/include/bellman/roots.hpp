#pragma once

#include <functional>

namespace bellman {

/// Bisection to width `xtol`, requires a sign change on [lo, hi].
double bisect(const std::function<double(double)>& f, double lo, double hi,
              double flo, double fhi, double xtol = 1e-13);

/// Scans [lo, hi] at `step` for the first sign change of f; returns true and
/// the bracket if found.
bool scan_for_bracket(const std::function<double(double)>& f, double lo, double hi,
                      double step, double& blo, double& bhi);

/// Damped 2D Newton with numeric Jacobian; returns true on |F| convergence.
bool newton2d(const std::function<void(const double*, double*)>& F, double x[2],
              double ftol, int max_iter = 80);

}  // namespace bellman
