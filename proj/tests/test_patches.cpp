#include <doctest.h>

#include <cmath>

#include "bellman/errors.hpp"
#include "bellman/patches.hpp"

using namespace bellman;

namespace {

TangentSolution closed_fan(const BoundaryData& bd, Orientation o) {
  TangentParams tp;
  tp.certify = false;
  return solve_m(bd, o, -kInf, kInf, std::nullopt, tp);
}

}  // namespace

TEST_CASE("balance point and square coefficients for the cubic moment") {
  BoundaryData bd = BoundaryData::p_moment(3.0);
  TangentSolution mR = closed_fan(bd, Orientation::Right);
  TangentSolution mL = closed_fan(bd, Orientation::Left);
  const double w = solve_balance(bd, mR, mL, -1.0, 1.0);
  CHECK(std::fabs(w) <= 1e-9);  // symmetry puts the vertex at the origin

  const AffinePatch q = angle_coeffs(bd, w, mR, mL);
  CHECK(q.b2 == doctest::Approx(3.0).epsilon(1e-9));  // (6 - (-6))/4
  CHECK(std::fabs(q.b1) <= 1e-8);
  CHECK(std::fabs(q.b0) <= 1e-8);
  const BilinearPatch s = square_coeffs(bd, w, mR, mL);
  CHECK(s.a11 == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(s.a0 == doctest::Approx(3.0).epsilon(1e-9));  // value at the origin = Gamma(4)/2
  CHECK(s.eval(0.0, 0.0) == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("synthetic quadratic data reproduces the exact bilinear solution") {
  BoundaryData bd = BoundaryData::quad();
  TangentSolution mR = closed_fan(bd, Orientation::Right);  // 2u - 2
  TangentSolution mL = closed_fan(bd, Orientation::Left);   // 2u + 2
  const double w = 0.0;                                     // every w balances for t^2
  CHECK(std::fabs(mR.value(w) + mL.value(w) - 2.0 * bd.f1(w)) <= 1e-14);
  const AffinePatch q = angle_coeffs(bd, w, mR, mL);
  CHECK(q.b2 == doctest::Approx(1.0));
  CHECK(q.b1 == doctest::Approx(0.0));
  CHECK(q.b0 == doctest::Approx(0.0));
  const BilinearPatch s = square_coeffs(bd, w, mR, mL);
  CHECK(s.eval(0.3, -0.4) == doctest::Approx(0.3 * 0.3 - 0.4 * 0.4 + 1.0).epsilon(1e-14));
}

TEST_CASE("balance residual of the quintic family against the dense oracle") {
  // with both decaying fans, r(w) = (w^4 + 12w^2 + 24)/6 - c(w^2+2) - (w^4/6 - c w^2)
  //                              = 2w^2 + 4 - 2c
  for (double c : {2.5, 3.0}) {
    BoundaryData bd = BoundaryData::poly5(c);
    TangentSolution mR = closed_fan(bd, Orientation::Right);
    TangentSolution mL = closed_fan(bd, Orientation::Left);
    double worst = 0.0;
    for (double w = -3.0; w <= 3.0; w += 1e-3) {
      const double r = mR.value(w) + mL.value(w) - 2.0 * bd.f1(w);
      worst = std::max(worst, std::fabs(r - (2.0 * w * w + 4.0 - 2.0 * c)));
    }
    CHECK(worst <= 1e-10);
    const double w = solve_balance(bd, mR, mL, 0.1, 3.0);
    CHECK(w == doctest::Approx(std::sqrt(c - 2.0)).epsilon(1e-10));
  }
  // at c = 2 the residual 2w^2 only touches zero: no sign change to bracket
  {
    BoundaryData bd = BoundaryData::poly5(2.0);
    TangentSolution mR = closed_fan(bd, Orientation::Right);
    TangentSolution mL = closed_fan(bd, Orientation::Left);
    CHECK_THROWS_AS(solve_balance(bd, mR, mL, -1.0, 1.0), NoRootError);
  }
}

TEST_CASE("a single-fan family has no balance point") {
  BoundaryData bd = BoundaryData::exponential(0.5);
  TangentSolution mR = closed_fan(bd, Orientation::Right);
  TangentSolution mL = closed_fan(bd, Orientation::Left);
  CHECK_THROWS_AS(solve_balance(bd, mR, mL, -6.0, 6.0), NoRootError);
}

TEST_CASE("trolleybus and corner coefficients") {
  BoundaryData bd = BoundaryData::quad();
  const AffinePatch q = trolleybus_coeffs(bd, -1.0, 1.0);
  CHECK(q.b2 == doctest::Approx(1.0));
  CHECK(q.b1 == doctest::Approx(0.0));
  CHECK(q.b0 == doctest::Approx(0.0));
  const BilinearPatch s = corner_coeffs(bd, -1.0, 1.0);
  CHECK(s.a0 == doctest::Approx(1.0));

  // slope identities: a11 = b2, a1 = b1, a0 = b0 + b2, for arbitrary chords
  BoundaryData p5 = BoundaryData::poly5(1.1);
  for (double a0 : {-1.8, -1.2, -0.6}) {
    const double b0 = a0 + 1.1;
    const AffinePatch t = trolleybus_coeffs(p5, a0, b0);
    const BilinearPatch c = corner_coeffs(p5, a0, b0);
    CHECK(c.a11 == doctest::Approx(t.b2).epsilon(1e-14));
    CHECK(c.a1 == doctest::Approx(t.b1).epsilon(1e-14));
    CHECK(c.a0 == doctest::Approx(t.b0 + t.b2).epsilon(1e-14));
  }
  CHECK_THROWS_AS(trolleybus_coeffs(bd, -2.0, 1.0), DomainError);
}
