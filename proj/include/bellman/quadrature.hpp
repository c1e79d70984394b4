#pragma once

#include <functional>

namespace bellman {

/// Composite Simpson on [a,b] with n subintervals (n rounded up to even).
double simpson(const std::function<double(double)>& f, double a, double b, int n);

/// Integral of f over (-inf, b]: marches blocks of width `block` leftwards with
/// composite Simpson until a block contributes less than `rel_tol` times the
/// running sum (in absolute value).
double integrate_left_tail(const std::function<double(double)>& f, double b,
                           double block = 4.0, double h = 1e-3, double rel_tol = 1e-16);

/// Integral of f over [a, +inf), same truncation rule marching rightwards.
double integrate_right_tail(const std::function<double(double)>& f, double a,
                            double block = 4.0, double h = 1e-3, double rel_tol = 1e-16);

}  // namespace bellman
