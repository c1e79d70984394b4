#include <doctest.h>

#include <cmath>
#include <sstream>

#include "bellman/errors.hpp"
#include "bellman/foliation.hpp"
#include "bellman/lattice.hpp"
#include "bellman/roots.hpp"
#include "bellman/verify.hpp"

using namespace bellman;

namespace {

// User-assembled figure graph for the quintic family past the corner window:
// left fan | full-length cup | right fan | square | left fan.
FoliationSpec build_quintic_cup_angle(double c, double window = 16.0) {
  BoundaryData bd = BoundaryData::poly5(c);
  auto res = [&](double a) { return cup_residual(bd, a, a + 2.0); };
  double blo, bhi;
  REQUIRE(scan_for_bracket(res, -window, 0.0, 1e-2, blo, bhi));
  const double a0 = bisect(res, blo, bhi, res(blo), res(bhi), 1e-14);
  const double b0 = a0 + 2.0;

  ChordalSolution ch = solve_cup(bd, a0, b0, 0.0);
  solve_A(ch, bd, 0.5 * (bd.f(a0) + bd.f(b0)));
  const double m0 = 0.5 * (bd.f(b0) - bd.f(a0));

  TangentParams tp;
  tp.window_lo = -window - 1.25;
  tp.window_hi = window + 1.25;
  tp.certify = false;
  TangentSolution fan_l1 = solve_m(bd, Orientation::Left, -kInf, a0, InitialValue{a0, m0}, tp);
  TangentSolution fan_r = solve_m(bd, Orientation::Right, b0, kInf, InitialValue{b0, m0}, tp);
  TangentSolution fan_l2 = solve_m(bd, Orientation::Left, -kInf, kInf, std::nullopt, tp);

  double wlo, whi;
  auto bal = [&](double w) { return fan_r.value(w) + fan_l2.value(w) - 2.0 * bd.f1(w); };
  REQUIRE(scan_for_bracket(bal, b0 + 0.05, window, 1e-2, wlo, whi));
  const double w = solve_balance(bd, fan_r, fan_l2, wlo, whi);

  certify_tangent(fan_l1, bd, tp.window_lo, a0);
  certify_tangent(fan_r, bd, b0, w);
  certify_tangent(fan_l2, bd, w, tp.window_hi);

  SquareFigure sq;
  sq.w = w;
  sq.v = square_coeffs(bd, w, fan_r, fan_l2);
  sq.b = angle_coeffs(bd, w, fan_r, fan_l2);

  FoliationSpec spec(bd, RegimeTag::Custom, -window, window);
  TangentFigure f1;
  f1.m = std::move(fan_l1);
  f1.lo = -kInf;
  f1.hi = a0;
  HerringboneFigure hb;
  hb.ch = std::move(ch);
  TangentFigure f2;
  f2.m = std::move(fan_r);
  f2.lo = b0;
  f2.hi = w;
  TangentFigure f3;
  f3.m = std::move(fan_l2);
  f3.lo = w;
  f3.hi = kInf;
  spec.add_figure(std::move(f1));
  spec.add_figure(std::move(hb));
  spec.add_figure(f2);
  spec.add_figure(sq);
  spec.add_figure(std::move(f3));

  auto seg = [&](const char* name, double x0, double y0, double x1, double y1) {
    Interface ifc;
    ifc.name = name;
    ifc.x0 = x0;
    ifc.y0 = y0;
    ifc.x1 = x1;
    ifc.y1 = y1;
    spec.add_interface(ifc);
  };
  seg("fanL|hrb.lower", a0, -1.0, a0 + 1.0, 0.0);
  seg("fanL|hrb.upper", a0, 1.0, a0 + 1.0, 0.0);
  seg("hrb|fanR.lower", b0 - 1.0, 0.0, b0, -1.0);
  seg("hrb|fanR.upper", b0 - 1.0, 0.0, b0, 1.0);
  seg("fanR|square.lower", w - 1.0, 0.0, w, -1.0);
  seg("fanR|square.upper", w - 1.0, 0.0, w, 1.0);
  seg("square|fanL.lower", w, -1.0, w + 1.0, 0.0);
  seg("square|fanL.upper", w, 1.0, w + 1.0, 0.0);
  Interface sp1;
  sp1.name = "hrb.spine.lower";
  sp1.spine = true;
  sp1.figure = 1;
  sp1.y0 = -1.0;
  spec.add_interface(sp1);
  Interface sp2 = sp1;
  sp2.name = "hrb.spine.upper";
  sp2.y0 = 1.0;
  spec.add_interface(sp2);
  return spec;
}

}  // namespace

TEST_CASE("regime dispatch") {
  CHECK(build_foliation_auto(BoundaryData::parse("quad"), {}).regime() == RegimeTag::AllRight);
  CHECK(build_foliation_auto(BoundaryData::parse("negexp:0.5"), {}).regime() == RegimeTag::AllRight);
  CHECK(build_foliation_auto(BoundaryData::parse("exp:0.5"), {}).regime() == RegimeTag::AllLeft);
  CHECK(build_foliation_auto(BoundaryData::parse("poly5:0.5"), {}).regime() == RegimeTag::AllLeft);
  CHECK(build_foliation_auto(BoundaryData::parse("pmom:3"), {}).regime() == RegimeTag::AngleSquare);
  CHECK(build_foliation_auto(BoundaryData::parse("pmom:1.5"), {}).regime() ==
        RegimeTag::SymmetricChord);
  CHECK(build_foliation_auto(BoundaryData::parse("poly5:1.1"), {}).regime() ==
        RegimeTag::CornerRegime);
  CHECK_THROWS_AS(build_foliation_auto(BoundaryData::parse("poly5:2"), {}),
                  UnsupportedFoliationError);
}

TEST_CASE("strip values at reference points") {
  FoliationSpec e = build_foliation_auto(BoundaryData::parse("exp:0.5"), {});
  CHECK(e.eval_V(0.0, 0.0) == doctest::Approx(2.0 * std::exp(-0.5)).epsilon(1e-13));

  FoliationSpec p = build_foliation_auto(BoundaryData::parse("pmom:1.5"), {});
  CHECK(p.eval_V(0.0, 0.0) == doctest::Approx(1.0).epsilon(1e-12));

  FoliationSpec c = build_foliation_auto(BoundaryData::parse("pmom:3"), {});
  CHECK(c.eval_V(0.0, 0.0) == doctest::Approx(3.0).epsilon(1e-8));

  for (const auto* fam : {"exp:0.5", "pmom:1.5", "poly5:1.1"}) {
    FoliationSpec s = build_foliation_auto(BoundaryData::parse(fam), {});
    for (double x1 : {-3.0, -0.7, 0.0, 1.3, 4.0})
      for (double x2 : {-1.0, 1.0})
        CHECK(s.eval_V(x1, x2) ==
              doctest::Approx(s.boundary().f(x1)).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("exp family matches its closed form everywhere") {
  const double lam = 0.5;
  FoliationSpec s = build_foliation_auto(BoundaryData::exponential(lam), {});
  double worst = 0.0;
  for (double x1 = -14.0; x1 <= 14.0; x1 += 0.37)
    for (double x2 = -1.0; x2 <= 1.0; x2 += 0.04) {
      const double v = x1 - 1.0 + std::fabs(x2);
      const double exact = (lam / (1.0 - lam) * (x1 - v) + 1.0) * std::exp(lam * v);
      worst = std::max(worst, std::fabs(s.eval_V(x1, x2) - exact));
    }
  CHECK(worst <= 1e-10);
}

TEST_CASE("quadratic data reproduces x1^2 - x2^2 + 1") {
  FoliationSpec s = build_foliation_auto(BoundaryData::quad(), {});
  double worst = 0.0;
  for (double x1 = -15.0; x1 <= 15.0; x1 += 0.31)
    for (double x2 = -1.0; x2 <= 1.0; x2 += 0.05)
      worst = std::max(worst, std::fabs(s.eval_V(x1, x2) - (x1 * x1 - x2 * x2 + 1.0)));
  CHECK(worst <= 1e-10);
}

TEST_CASE("herringbone closed form for p in (1,2)") {
  const double p = 1.5;
  FoliationSpec s = build_foliation_auto(BoundaryData::p_moment(p), {});
  double worst = 0.0;
  for (double x1 = -0.95; x1 <= 0.95; x1 += 0.011)
    for (double x2 = -0.99; x2 <= 0.99; x2 += 0.04) {
      if (std::fabs(x1) > std::fabs(x2)) continue;  // outside the vertical herringbone
      const double ell = 2.0 + 2.0 * std::fabs(x1) - 2.0 * std::fabs(x2);
      const double exact = std::pow(ell / 2.0, p) +
                           p / (p - 1.0) * (1.0 - std::fabs(x2)) * (1.0 - std::pow(ell / 2.0, p - 1.0));
      worst = std::max(worst, std::fabs(s.eval_V(x1, x2) - exact));
    }
  CHECK(worst <= 1e-9);
}

TEST_CASE("parabolic-strip values: free boundary identity and closed forms") {
  for (const auto* fam : {"quad", "exp:0.5", "negexp:0.5", "pmom:3", "pmom:1.5", "poly5:1.1"}) {
    FoliationSpec s = build_foliation_auto(BoundaryData::parse(fam), {});
    const auto rep = check_diagonal(s, -3.0, 3.0, 1e-2);
    CHECK(rep.max_residual <= 1e-8);
  }
  // fixed-boundary condition B(t, t^2) = f(t)
  FoliationSpec s = build_foliation_auto(BoundaryData::exponential(0.25), {});
  for (double t : {-2.0, 0.0, 1.0, 3.5})
    CHECK(s.eval_B(t, t * t) == doctest::Approx(s.boundary().f(t)).epsilon(1e-10));
  // closed form on the whole domain
  double worst = 0.0;
  for (double y1 = -5.0; y1 <= 5.0; y1 += 0.13)
    for (double d = 0.0; d <= 1.0; d += 0.05) {
      const double y2 = y1 * y1 + d;
      const double uL = y1 - 1.0 + std::sqrt(y1 * y1 + 1.0 - y2);
      const double exact = (0.25 / 0.75 * (y1 - uL) + 1.0) * std::exp(0.25 * uL);
      worst = std::max(worst, std::fabs(s.eval_B(y1, y2) - exact));
    }
  CHECK(worst <= 1e-10);
}

TEST_CASE("chordal parabolic values interpolate the boundary data") {
  const double p = 1.5;
  FoliationSpec s = build_foliation_auto(BoundaryData::p_moment(p), {});
  // on the symmetric chord through (0, y2): B = (l/2)^p with y2 = l^2/4
  for (double y2 : {0.25, 0.5, 0.81, 0.99})
    CHECK(s.eval_B(0.0, y2) == doctest::Approx(std::pow(y2, p / 2.0)).epsilon(1e-9));
}

TEST_CASE("coverage guards") {
  BuildParams bp;
  bp.window = 6.0;
  FoliationSpec s = build_foliation_auto(BoundaryData::exponential(0.5), bp);
  CHECK_THROWS_AS(s.eval_V(7.0, 0.0), CoverageError);
  CHECK_THROWS_AS(s.eval_V(0.0, 1.5), CoverageError);
  CHECK_THROWS_AS(s.eval_B(0.0, 2.5), CoverageError);   // above the free boundary
  CHECK_THROWS_AS(s.eval_B(2.0, 0.5), CoverageError);   // below the fixed boundary
}

TEST_CASE("gluing certificates for the assembled regimes") {
  for (const auto* fam : {"pmom:3", "pmom:1.5", "poly5:1.1"}) {
    FoliationSpec s = build_foliation_auto(BoundaryData::parse(fam), {});
    const GluingReport rep = check_c1_gluing(s);
    CHECK(rep.pass);
    CHECK(rep.max_jump <= 1e-4);
  }
}

TEST_CASE("a seeded defect in the fan data is detected") {
  BoundaryData bd = BoundaryData::p_moment(1.5);
  FoliationSpec good = build_foliation_auto(bd, {});
  // rebuild the right fan with a slope offset at the gluing chord
  FoliationSpec bad(bd, RegimeTag::Custom, good.window_lo(), good.window_hi());
  TangentParams tp;
  tp.window_lo = good.window_lo() - 1.25;
  tp.window_hi = good.window_hi() + 1.25;
  tp.certify = false;
  for (std::size_t i = 0; i < good.figures().size(); ++i) {
    if (i == 2) {
      TangentFigure f;
      f.m = solve_m(bd, Orientation::Right, 1.0, kInf, InitialValue{1.0, 0.1}, tp);
      f.lo = 1.0;
      f.hi = kInf;
      bad.add_figure(std::move(f));
    } else {
      bad.add_figure(good.figures()[i]);
    }
  }
  for (const auto& ifc : good.interfaces()) bad.add_interface(ifc);
  const GluingReport rep = check_c1_gluing(bad);
  CHECK_FALSE(rep.pass);
  CHECK(rep.max_jump > 1e-2);  // the 0.1 slope defect is clearly visible
}

TEST_CASE("serialization round-trip") {
  for (const auto* fam : {"exp:0.5", "pmom:1.5", "poly5:1.1"}) {
    FoliationSpec s = build_foliation_auto(BoundaryData::parse(fam), {});
    std::stringstream ss;
    s.save(ss);
    ss.seekg(0);
    FoliationSpec t = FoliationSpec::load(ss);
    CHECK(t.regime() == s.regime());
    CHECK(t.figures().size() == s.figures().size());
    double worst = 0.0;
    for (double x1 = -5.0; x1 <= 5.0; x1 += 0.17)
      for (double x2 = -1.0; x2 <= 1.0; x2 += 0.11)
        worst = std::max(worst, std::fabs(t.eval_V(x1, x2) - s.eval_V(x1, x2)));
    CHECK(worst <= 1e-9);
  }
  std::stringstream junk("not-a-foliation");
  CHECK_THROWS_AS(FoliationSpec::load(junk), ParseError);
}

TEST_CASE("user-assembled cup-angle graph for the quintic") {
  FoliationSpec spec = build_quintic_cup_angle(2.0);
  CHECK(spec.regime() == RegimeTag::Custom);
  CHECK(spec.figures().size() == 5);

  CHECK(check_boundary(spec).pass);
  CHECK(check_diag_concavity(spec, 6000, 1e-3, 1e-8, 5).pass);
  CHECK(check_diagonal(spec, -3, 3, 1e-2).max_residual <= 1e-8);
  const GluingReport glue = check_c1_gluing(spec);
  CHECK(glue.max_jump <= 1e-4);

  // independent route: the discrete fixed point stays below and, up to the
  // N=30 resolution gap (~0.1 around the flat stretch of f), close
  LatticeGrid g = solve_lattice(spec.boundary(), 30, 10, 1e-5, {});
  const auto dc = check_discrete_vs_closed(spec, g, 5.0, 0.15);
  CHECK(dc.one_sided.pass);
  CHECK(dc.two_sided.pass);

  // serialization handles the custom graph too
  std::stringstream ss;
  spec.save(ss);
  ss.seekg(0);
  FoliationSpec back = FoliationSpec::load(ss);
  CHECK(back.eval_V(0.5, 0.25) == doctest::Approx(spec.eval_V(0.5, 0.25)).epsilon(1e-12));
}
