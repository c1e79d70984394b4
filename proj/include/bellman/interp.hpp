#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "bellman/errors.hpp"

namespace bellman {

/// Shape-preserving piecewise-cubic interpolant (Fritsch-Carlson slopes).
/// Works on arbitrary strictly increasing abscissae; C^1 overall, the second
/// derivative is piecewise linear with jumps at the nodes.
class Pchip {
 public:
  Pchip() = default;

  Pchip(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
    if (x_.size() < 2 || x_.size() != y_.size()) throw DomainError("pchip: need >= 2 nodes");
    const std::size_t n = x_.size();
    for (std::size_t i = 0; i + 1 < n; ++i)
      if (!(x_[i] < x_[i + 1])) throw DomainError("pchip: abscissae must strictly increase");
    d_.assign(n, 0.0);
    std::vector<double> h(n - 1), del(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      h[i] = x_[i + 1] - x_[i];
      del[i] = (y_[i + 1] - y_[i]) / h[i];
    }
    if (n == 2) {
      d_[0] = d_[1] = del[0];
    } else {
      for (std::size_t i = 1; i + 1 < n; ++i) {
        if (del[i - 1] == 0.0 || del[i] == 0.0 || (del[i - 1] > 0) != (del[i] > 0)) {
          d_[i] = 0.0;
        } else {
          // weighted harmonic mean keeps the interpolant monotone on monotone data
          const double w1 = 2.0 * h[i] + h[i - 1];
          const double w2 = h[i] + 2.0 * h[i - 1];
          d_[i] = (w1 + w2) / (w1 / del[i - 1] + w2 / del[i]);
        }
      }
      d_[0] = edge_slope(h[0], h[1], del[0], del[1]);
      d_[n - 1] = edge_slope(h[n - 2], h[n - 3], del[n - 2], del[n - 3]);
    }
  }

  double lo() const { return x_.front(); }
  double hi() const { return x_.back(); }
  std::size_t size() const { return x_.size(); }
  const std::vector<double>& xs() const { return x_; }
  const std::vector<double>& ys() const { return y_; }

  double value(double t) const {
    const auto [i, s] = locate(t);
    const double h = x_[i + 1] - x_[i];
    const double a = y_[i], b = d_[i];
    const double del = (y_[i + 1] - y_[i]) / h;
    const double c = (3.0 * del - 2.0 * d_[i] - d_[i + 1]) / h;
    const double e = (d_[i] + d_[i + 1] - 2.0 * del) / (h * h);
    return a + s * (b + s * (c + s * e));
  }

  double deriv(double t) const {
    const auto [i, s] = locate(t);
    const double h = x_[i + 1] - x_[i];
    const double del = (y_[i + 1] - y_[i]) / h;
    const double c = (3.0 * del - 2.0 * d_[i] - d_[i + 1]) / h;
    const double e = (d_[i] + d_[i + 1] - 2.0 * del) / (h * h);
    return d_[i] + s * (2.0 * c + 3.0 * s * e);
  }

  double deriv2(double t) const {
    const auto [i, s] = locate(t);
    const double h = x_[i + 1] - x_[i];
    const double del = (y_[i + 1] - y_[i]) / h;
    const double c = (3.0 * del - 2.0 * d_[i] - d_[i + 1]) / h;
    const double e = (d_[i] + d_[i + 1] - 2.0 * del) / (h * h);
    return 2.0 * c + 6.0 * s * e;
  }

 private:
  static double edge_slope(double h0, double h1, double del0, double del1) {
    // one-sided three-point formula, clipped to preserve shape near the ends
    double d = ((2.0 * h0 + h1) * del0 - h0 * del1) / (h0 + h1);
    if (d * del0 <= 0.0)
      d = 0.0;
    else if (del0 * del1 < 0.0 && std::fabs(d) > 3.0 * std::fabs(del0))
      d = 3.0 * del0;
    return d;
  }

  std::pair<std::size_t, double> locate(double t) const {
    const double tol = 1e-9 * (1.0 + std::fabs(x_.front()) + std::fabs(x_.back()));
    if (t < x_.front() - tol || t > x_.back() + tol)
      throw DomainError("pchip: abscissa out of range");
    std::size_t lo = 0, hi = x_.size() - 1;
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      (x_[mid] <= t ? lo : hi) = mid;
    }
    if (lo == x_.size() - 1) lo--;
    return {lo, t - x_[lo]};
  }

  std::vector<double> x_, y_, d_;
};

/// Shape-preserving cubic on a uniform grid; stores slopes once, O(1) lookup.
class UniformPchip {
 public:
  UniformPchip() = default;

  UniformPchip(double lo, double step, std::vector<double> y)
      : lo_(lo), h_(step), y_(std::move(y)) {
    if (y_.size() < 2) throw DomainError("pchip: need >= 2 nodes");
    if (!(step > 0)) throw DomainError("pchip: step must be positive");
    const std::size_t n = y_.size();
    d_.assign(n, 0.0);
    if (n == 2) {
      d_[0] = d_[1] = (y_[1] - y_[0]) / h_;
      return;
    }
    auto del = [&](std::size_t i) { return (y_[i + 1] - y_[i]) / h_; };
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double dm = del(i - 1), dp = del(i);
      if (dm == 0.0 || dp == 0.0 || (dm > 0) != (dp > 0))
        d_[i] = 0.0;
      else
        d_[i] = 2.0 * dm * dp / (dm + dp);
    }
    d_[0] = clip_edge(1.5 * del(0) - 0.5 * del(1), del(0), del(1));
    d_[n - 1] = clip_edge(1.5 * del(n - 2) - 0.5 * del(n - 3), del(n - 2), del(n - 3));
  }

  double lo() const { return lo_; }
  double hi() const { return lo_ + h_ * double(y_.size() - 1); }
  double step() const { return h_; }
  std::size_t size() const { return y_.size(); }
  const std::vector<double>& ys() const { return y_; }

  double value(double t) const {
    const auto [i, s] = locate(t);
    const double del = (y_[i + 1] - y_[i]) / h_;
    const double c = (3.0 * del - 2.0 * d_[i] - d_[i + 1]) / h_;
    const double e = (d_[i] + d_[i + 1] - 2.0 * del) / (h_ * h_);
    return y_[i] + s * (d_[i] + s * (c + s * e));
  }

  double deriv(double t) const {
    const auto [i, s] = locate(t);
    const double del = (y_[i + 1] - y_[i]) / h_;
    const double c = (3.0 * del - 2.0 * d_[i] - d_[i + 1]) / h_;
    const double e = (d_[i] + d_[i + 1] - 2.0 * del) / (h_ * h_);
    return d_[i] + s * (2.0 * c + 3.0 * s * e);
  }

 private:
  static double clip_edge(double d, double del0, double del1) {
    if (d * del0 <= 0.0) return 0.0;
    if (del0 * del1 < 0.0 && std::fabs(d) > 3.0 * std::fabs(del0)) return 3.0 * del0;
    return d;
  }

  std::pair<std::size_t, double> locate(double t) const {
    const double tol = 1e-9 * (1.0 + std::fabs(lo()) + std::fabs(hi()));
    if (t < lo() - tol || t > hi() + tol) throw DomainError("pchip: abscissa out of range");
    double u = (t - lo_) / h_;
    std::ptrdiff_t i = static_cast<std::ptrdiff_t>(std::floor(u));
    if (i < 0) i = 0;
    if (i > static_cast<std::ptrdiff_t>(y_.size()) - 2) i = static_cast<std::ptrdiff_t>(y_.size()) - 2;
    return {static_cast<std::size_t>(i), t - (lo_ + h_ * double(i))};
  }

  double lo_ = 0, h_ = 1;
  std::vector<double> y_, d_;
};

/// Inverts a strictly monotone tabulated function by bisection on its pchip.
double invert_monotone(const UniformPchip& p, double target, double tol = 1e-14);

}  // namespace bellman
