#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "bellman/errors.hpp"
#include "bellman/foliation.hpp"
#include "bellman/roots.hpp"

namespace bellman {

namespace {

TangentParams fan_params(const BuildParams& p, double win_lo, double win_hi, bool certify) {
  TangentParams tp = p.tangent;
  tp.window_lo = win_lo - 1.25;
  tp.window_hi = win_hi + 1.25;
  tp.certify = certify;
  return tp;
}

void add_segment(FoliationSpec& spec, const std::string& name, double x0, double y0, double x1,
                 double y1) {
  Interface ifc;
  ifc.name = name;
  ifc.x0 = x0;
  ifc.y0 = y0;
  ifc.x1 = x1;
  ifc.y1 = y1;
  spec.add_interface(std::move(ifc));
}

void add_spine(FoliationSpec& spec, const std::string& name, int figure, bool lower) {
  Interface ifc;
  ifc.name = name;
  ifc.spine = true;
  ifc.figure = figure;
  ifc.y0 = lower ? -1.0 : 1.0;
  spec.add_interface(std::move(ifc));
}

FoliationSpec build_single_fan(const BoundaryData& bd, const BuildParams& p, Orientation o) {
  TangentParams tp = fan_params(p, -p.window, p.window, true);
  TangentSolution m = solve_m(bd, o, -kInf, kInf, std::nullopt, tp);
  FoliationSpec spec(bd, o == Orientation::Right ? RegimeTag::AllRight : RegimeTag::AllLeft,
                     -p.window, p.window);
  TangentFigure fig;
  fig.m = std::move(m);
  fig.lo = -kInf;
  fig.hi = kInf;
  spec.add_figure(std::move(fig));
  return spec;
}

FoliationSpec build_angle_square(const BoundaryData& bd, const BuildParams& p) {
  TangentParams tp = fan_params(p, -p.window, p.window, false);
  TangentSolution mR = solve_m(bd, Orientation::Right, -kInf, kInf, std::nullopt, tp);
  TangentSolution mL = solve_m(bd, Orientation::Left, -kInf, kInf, std::nullopt, tp);

  auto r = [&](double w) { return mR.value(w) + mL.value(w) - 2.0 * bd.f1(w); };
  double blo, bhi;
  if (!scan_for_bracket(r, -p.window, p.window, p.balance_scan_step, blo, bhi))
    throw NoRootError("no balance point on the window");
  const double w = solve_balance(bd, mR, mL, blo, bhi);

  certify_tangent(mR, bd, tp.window_lo, w, tp.tol_sign);
  certify_tangent(mL, bd, w, tp.window_hi, tp.tol_sign);

  SquareFigure sq;
  sq.w = w;
  sq.v = square_coeffs(bd, w, mR, mL);
  sq.b = angle_coeffs(bd, w, mR, mL);

  FoliationSpec spec(bd, RegimeTag::AngleSquare, -p.window, p.window);
  TangentFigure right;
  right.m = std::move(mR);
  right.lo = -kInf;
  right.hi = w;
  TangentFigure left;
  left.m = std::move(mL);
  left.lo = w;
  left.hi = kInf;
  spec.add_figure(std::move(right));
  spec.add_figure(sq);
  spec.add_figure(std::move(left));
  add_segment(spec, "fanR|square.lower", w - 1.0, 0.0, w, -1.0);
  add_segment(spec, "fanR|square.upper", w - 1.0, 0.0, w, 1.0);
  add_segment(spec, "square|fanL.lower", w, -1.0, w + 1.0, 0.0);
  add_segment(spec, "square|fanL.upper", w, 1.0, w + 1.0, 0.0);
  return spec;
}

FoliationSpec build_symmetric_chord(const BoundaryData& bd, const BuildParams& p) {
  if (!bd.mirror_symmetric())
    throw NoRootError("symmetric-chord regime expects mirror-symmetric data");
  // full-length chords: roots of the cup residual with b = a + 2
  auto res = [&](double a) -> double {
    try {
      return cup_residual(bd, a, a + 2.0);
    } catch (const NonDifferentiableError&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  };
  std::vector<std::pair<double, double>> brackets;
  {
    const double lo = std::max(-p.window, bd.domain_lo());
    const double hi = std::min(p.window, bd.domain_hi()) - 2.0;
    double x = lo;
    double fx = res(x);
    const double step = 1e-2;
    while (x < hi && brackets.size() < 8) {
      const double xn = std::min(x + step, hi);
      const double fn = res(xn);
      if (!std::isnan(fx) && !std::isnan(fn)) {
        if (fx != 0.0 && fn != 0.0 && (fx > 0) != (fn > 0)) {
          brackets.emplace_back(x, xn);
        } else if (fx == 0.0) {
          // accept an exact hit only when the residual crosses transversally
          const double fl = res(x - 0.5 * step), fr = res(x + 0.5 * step);
          if (!std::isnan(fl) && !std::isnan(fr) && fl != 0.0 && fr != 0.0 &&
              (fl > 0) != (fr > 0))
            brackets.emplace_back(x - 0.5 * step, x + 0.5 * step);
        }
      }
      x = xn;
      fx = fn;
    }
  }
  if (brackets.empty()) throw NoRootError("no full-length cup chord on the window");

  std::exception_ptr last_err;
  for (auto [blo, bhi] : brackets) {
    try {
      const double a0 = bisect(res, blo, bhi, res(blo), res(bhi), 1e-14);
      const double b0 = a0 + 2.0;
      ChordalSolution ch = solve_cup(bd, a0, b0, 0.0, p.cup);
      solve_A(ch, bd, 0.5 * (bd.f(a0) + bd.f(b0)));
      const double m0 = 0.5 * (bd.f(b0) - bd.f(a0));

      TangentParams tpl = fan_params(p, -p.window, p.window, false);
      TangentSolution mL = solve_m(bd, Orientation::Left, -kInf, a0,
                                   InitialValue{a0, m0}, tpl);
      TangentSolution mR = solve_m(bd, Orientation::Right, b0, kInf,
                                   InitialValue{b0, m0}, tpl);
      certify_tangent(mL, bd, tpl.window_lo, a0, tpl.tol_sign);
      certify_tangent(mR, bd, b0, tpl.window_hi, tpl.tol_sign);

      FoliationSpec spec(bd, RegimeTag::SymmetricChord, -p.window, p.window);
      TangentFigure left;
      left.m = std::move(mL);
      left.lo = -kInf;
      left.hi = a0;
      TangentFigure right;
      right.m = std::move(mR);
      right.lo = b0;
      right.hi = kInf;
      HerringboneFigure hb;
      hb.ch = std::move(ch);
      spec.add_figure(std::move(left));
      spec.add_figure(std::move(hb));
      spec.add_figure(std::move(right));
      add_segment(spec, "fanL|hrb.lower", a0, -1.0, a0 + 1.0, 0.0);
      add_segment(spec, "fanL|hrb.upper", a0, 1.0, a0 + 1.0, 0.0);
      add_segment(spec, "hrb|fanR.lower", b0 - 1.0, 0.0, b0, -1.0);
      add_segment(spec, "hrb|fanR.upper", b0 - 1.0, 0.0, b0, 1.0);
      add_spine(spec, "hrb.spine.lower", 1, true);
      add_spine(spec, "hrb.spine.upper", 1, false);
      return spec;
    } catch (const RegimeError&) {
      last_err = std::current_exception();
    } catch (const DegenerateChordError&) {
      last_err = std::current_exception();
    } catch (const StepSizeError&) {
      last_err = std::current_exception();
    } catch (const NoRootError&) {
      last_err = std::current_exception();
    }
  }
  if (last_err) std::rethrow_exception(last_err);
  throw NoRootError("symmetric chord construction failed");
}

FoliationSpec build_corner(const BoundaryData& bd, const BuildParams& p, Orientation o) {
  const bool left = o == Orientation::Left;
  TangentParams tp = fan_params(p, -p.window, p.window, false);
  TangentSolution minf = solve_m(bd, o, -kInf, kInf, std::nullopt, tp);

  // locate where the fan's own certificate fails; the corner straddles it
  double vbad_lo = kInf, vbad_hi = -kInf;
  for (std::size_t i = 0; i < minf.m2.size(); ++i) {
    const double m2 = minf.m2[i];
    const bool bad = std::isnan(m2) || (left ? m2 < 0.0 : m2 > 0.0);
    if (bad) {
      const double u = minf.grid_lo + minf.grid_step * double(i);
      vbad_lo = std::min(vbad_lo, u);
      vbad_hi = std::max(vbad_hi, u);
    }
  }
  if (!(vbad_lo <= vbad_hi)) throw NoRootError("fan certificate holds everywhere; no corner");

  auto avg_f2 = [&](double a, double b) { return (bd.f1(b) - bd.f1(a)) / (b - a); };
  const double sgn = left ? 1.0 : -1.0;
  auto system = [&](const double* x, double* F) {
    const double a = x[0], b = x[1];
    if (!(b > a + 1e-9)) {
      F[0] = 1e6;
      F[1] = 1e6;
      return;
    }
    F[0] = cup_residual(bd, a, b);
    const double glue_u = left ? b : a;
    F[1] = minf.value(glue_u) - bd.f1(glue_u) - sgn * avg_f2(a, b);
  };

  double a0 = 0, b0 = 0;
  bool found = false;
  for (double pad : {0.3, 0.6, 1.0, 1.5}) {
    double x[2] = {vbad_lo - pad, vbad_hi + pad};
    if (x[1] - x[0] > 2.0) {
      const double mid = 0.5 * (x[0] + x[1]);
      x[0] = mid - 0.999;
      x[1] = mid + 0.999;
    }
    if (newton2d(system, x, 1e-12) && x[1] > x[0] && x[1] - x[0] <= 2.0 + 1e-9) {
      a0 = x[0];
      b0 = x[1];
      found = true;
      break;
    }
  }
  if (!found) throw NoRootError("corner gluing system has no solution near the defect");

  const double glue_a = bd.f1(a0) + sgn * avg_f2(a0, b0);
  const double glue_b = bd.f1(b0) + sgn * avg_f2(a0, b0);

  ChordalSolution ch = solve_cup(bd, a0, b0, 0.0, p.cup);
  CornerFigure corner;
  corner.orient = o;
  corner.a0 = a0;
  corner.b0 = b0;
  corner.v = corner_coeffs(bd, a0, b0);
  corner.b = trolleybus_coeffs(bd, a0, b0);
  // spine top value feeds the transport integral
  const double mid = 0.5 * (a0 + b0);
  const double ptop = -1.0 + 0.5 * (b0 - a0);
  solve_A(ch, bd, corner.v.eval(mid, ptop));

  TangentSolution fan1, fan2;
  if (left) {
    fan1 = solve_m(bd, o, -kInf, a0, InitialValue{a0, glue_a}, tp);
    fan2 = solve_m(bd, o, b0, kInf, std::nullopt, tp);
  } else {
    fan1 = solve_m(bd, o, -kInf, a0, std::nullopt, tp);
    fan2 = solve_m(bd, o, b0, kInf, InitialValue{b0, glue_b}, tp);
  }
  certify_tangent(fan1, bd, tp.window_lo, a0, tp.tol_sign);
  certify_tangent(fan2, bd, b0, tp.window_hi, tp.tol_sign);

  FoliationSpec spec(bd, RegimeTag::CornerRegime, -p.window, p.window);
  TangentFigure f1;
  f1.m = std::move(fan1);
  f1.lo = -kInf;
  f1.hi = a0;
  TangentFigure f2;
  f2.m = std::move(fan2);
  f2.lo = b0;
  f2.hi = kInf;
  HerringboneFigure hb;
  hb.ch = std::move(ch);
  spec.add_figure(std::move(f1));
  spec.add_figure(std::move(hb));
  spec.add_figure(corner);
  spec.add_figure(std::move(f2));

  const double off = left ? 1.0 : -1.0;  // fan boundary leans with the orientation
  add_segment(spec, "fan1|corner.lower", a0, -1.0, a0 + off, 0.0);
  add_segment(spec, "fan1|corner.upper", a0, 1.0, a0 + off, 0.0);
  add_segment(spec, "corner|fan2.lower", b0, -1.0, b0 + off, 0.0);
  add_segment(spec, "corner|fan2.upper", b0, 1.0, b0 + off, 0.0);
  add_segment(spec, "corner|hrb.sw", a0, -1.0, mid, ptop);
  add_segment(spec, "corner|hrb.se", mid, ptop, b0, -1.0);
  add_segment(spec, "corner|hrb.nw", a0, 1.0, mid, -ptop);
  add_segment(spec, "corner|hrb.ne", mid, -ptop, b0, 1.0);
  add_spine(spec, "hrb.spine.lower", 1, true);
  add_spine(spec, "hrb.spine.upper", 1, false);
  return spec;
}

}  // namespace

FoliationSpec build_foliation_auto(const BoundaryData& bd, const BuildParams& p) {
  std::string trail;
  auto note = [&](const char* what, const Error& e) {
    trail += std::string("\n  ") + what + ": " + e.what();
  };
  try {
    return build_single_fan(bd, p, Orientation::Right);
  } catch (const RegimeError& e) {
    note("AllRight", e);
  } catch (const NonDifferentiableError& e) {
    note("AllRight", e);
  }
  try {
    return build_single_fan(bd, p, Orientation::Left);
  } catch (const RegimeError& e) {
    note("AllLeft", e);
  } catch (const NonDifferentiableError& e) {
    note("AllLeft", e);
  }
  try {
    return build_angle_square(bd, p);
  } catch (const RegimeError& e) {
    note("AngleSquare", e);
  } catch (const NoRootError& e) {
    note("AngleSquare", e);
  } catch (const NonDifferentiableError& e) {
    note("AngleSquare", e);
  }
  try {
    return build_symmetric_chord(bd, p);
  } catch (const RegimeError& e) {
    note("SymmetricChord", e);
  } catch (const NoRootError& e) {
    note("SymmetricChord", e);
  } catch (const DegenerateChordError& e) {
    note("SymmetricChord", e);
  } catch (const StepSizeError& e) {
    note("SymmetricChord", e);
  } catch (const NonDifferentiableError& e) {
    note("SymmetricChord", e);
  }
  for (Orientation o : {Orientation::Left, Orientation::Right}) {
    try {
      return build_corner(bd, p, o);
    } catch (const RegimeError& e) {
      note("Corner", e);
    } catch (const NoRootError& e) {
      note("Corner", e);
    } catch (const DegenerateChordError& e) {
      note("Corner", e);
    } catch (const StepSizeError& e) {
      note("Corner", e);
    } catch (const NonDifferentiableError& e) {
      note("Corner", e);
    }
  }
  throw UnsupportedFoliationError(
      "no supported regime fits this boundary data; supply a custom figure graph. Attempts:" +
      trail);
}

}  // namespace bellman
