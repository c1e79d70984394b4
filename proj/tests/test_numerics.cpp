#include <doctest.h>

#include <cmath>

#include "bellman/errors.hpp"
#include "bellman/interp.hpp"
#include "bellman/quadrature.hpp"
#include "bellman/roots.hpp"

using namespace bellman;

TEST_CASE("simpson is exact on cubics") {
  auto f = [](double x) { return 3 * x * x * x - 2 * x * x + x - 7; };
  auto F = [](double x) {
    return 0.75 * x * x * x * x - 2.0 / 3.0 * x * x * x + 0.5 * x * x - 7 * x;
  };
  CHECK(simpson(f, -1.0, 2.5, 10) == doctest::Approx(F(2.5) - F(-1.0)).epsilon(1e-14));
  CHECK(simpson(f, 0.0, 0.0, 10) == 0.0);
}

TEST_CASE("tail integrals against closed forms") {
  CHECK(integrate_left_tail([](double t) { return std::exp(t); }, 0.0) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(integrate_right_tail([](double t) { return t * std::exp(-t); }, 0.0) ==
        doctest::Approx(1.0).epsilon(1e-12));
  // int_1^inf 3 t^2 e^{1-t} dt = 3 (1^2 + 2*1 + 2) = 15
  CHECK(integrate_right_tail([](double t) { return 3 * t * t * std::exp(1.0 - t); }, 1.0) ==
        doctest::Approx(15.0).epsilon(1e-12));
}

TEST_CASE("pchip reproduces nodes and preserves monotone data") {
  std::vector<double> xs, ys;
  for (int i = 0; i <= 20; ++i) {
    xs.push_back(0.1 * i);
    ys.push_back(std::tanh(0.1 * i - 1.0));
  }
  Pchip p(xs, ys);
  for (std::size_t i = 0; i < xs.size(); ++i)
    CHECK(p.value(xs[i]) == doctest::Approx(ys[i]).epsilon(1e-15));
  double prev = p.value(0.0);
  for (double t = 0.005; t <= 2.0; t += 0.005) {
    const double v = p.value(t);
    CHECK(v >= prev - 1e-14);
    prev = v;
  }
  CHECK_THROWS_AS(p.value(-1.0), DomainError);
}

TEST_CASE("uniform pchip inversion round-trip") {
  std::vector<double> ys;
  for (int i = 0; i <= 1000; ++i) ys.push_back(std::sqrt(1.0 + 0.01 * i));
  UniformPchip p(0.0, 0.01, ys);
  for (double t : {0.3, 1.7, 5.4, 9.99}) {
    const double v = p.value(t);
    CHECK(invert_monotone(p, v) == doctest::Approx(t).epsilon(1e-10));
  }
}

TEST_CASE("bisect, bracket scan, damped newton") {
  auto f = [](double x) { return x * x - 2.0; };
  const double r = bisect(f, 0.0, 2.0, f(0.0), f(2.0));
  CHECK(r == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK_THROWS_AS(bisect(f, 2.0, 3.0, f(2.0), f(3.0)), NoRootError);

  double blo, bhi;
  CHECK(scan_for_bracket(f, 0.0, 3.0, 0.1, blo, bhi));
  CHECK(blo <= std::sqrt(2.0));
  CHECK(bhi >= std::sqrt(2.0));

  auto sys = [](const double* x, double* F) {
    F[0] = x[0] * x[0] + x[1] * x[1] - 4.0;
    F[1] = x[0] - x[1];
  };
  double x[2] = {1.0, 0.5};
  CHECK(newton2d(sys, x, 1e-13));
  CHECK(x[0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));
}
