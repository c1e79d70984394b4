#include "bellman/foliation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "bellman/errors.hpp"

namespace bellman {

namespace {
constexpr double kTol = 1e-9;

double clamp01(double t) { return t < 0 ? 0 : (t > 1 ? 1 : t); }

struct OmegaPoint {
  double y1, y2, root;  // root = sqrt(y1^2 + 1 - y2)
};

double u_of(const TangentFigure& fig, const OmegaPoint& y) {
  return fig.m.orientation == Orientation::Right ? y.y1 + 1.0 - y.root : y.y1 - 1.0 + y.root;
}

double v_of(const TangentFigure& fig, double x1, double s) {
  return fig.m.orientation == Orientation::Right ? x1 + 1.0 - s : x1 - 1.0 + s;
}

// herringbone wing lookup; returns false when x is not inside the figure
struct WingHit {
  double ell;
  double endpoint;  // f is evaluated here (a or b)
};

bool wing_lookup(const HerringboneFigure& fig, double x1, double s, WingHit& hit) {
  const ChordalSolution& ch = fig.ch;
  const double zeta = 1.0 - s;  // height above the near boundary line
  const double a0 = ch.a.back(), atop = ch.a.front();
  const double b0 = ch.b.back(), btop = ch.b.front();
  const double astar = x1 + s - 1.0;
  const double tol = kTol * (1.0 + std::fabs(x1));
  if (astar >= a0 - tol && astar <= atop + tol) {
    const double ell = ch.ell_from_a(std::clamp(astar, a0, atop));
    const double mid = 0.5 * (ch.a_at(ell) + ch.b_at(ell));
    if (zeta <= 0.5 * ell + tol && x1 <= mid + tol) {
      hit = {ell, astar};
      return true;
    }
  }
  const double bstar = x1 - s + 1.0;
  if (bstar >= btop - tol && bstar <= b0 + tol) {
    const double ell = ch.ell_from_b(std::clamp(bstar, btop, b0));
    const double mid = 0.5 * (ch.a_at(ell) + ch.b_at(ell));
    if (zeta <= 0.5 * ell + tol && x1 >= mid - tol) {
      hit = {ell, bstar};
      return true;
    }
  }
  return false;
}

bool omega_in_chordal(const HerringboneFigure& fig, double y1, double y2, double tol) {
  const ChordalSolution& ch = fig.ch;
  const double a0 = ch.a.back(), b0 = ch.b.back();
  const double outer = (a0 + b0) * y1 - a0 * b0;
  if (y2 > outer + tol) return false;
  if (ch.ell1 > 0.0) {
    const double a1 = ch.a.front(), b1 = ch.b.front();
    if (y2 < (a1 + b1) * y1 - a1 * b1 - tol) return false;
  }
  return y1 >= a0 - tol && y1 <= b0 + tol;
}

}  // namespace

std::string to_string(RegimeTag t) {
  switch (t) {
    case RegimeTag::AllRight: return "AllRight";
    case RegimeTag::AllLeft: return "AllLeft";
    case RegimeTag::AngleSquare: return "AngleSquare";
    case RegimeTag::SymmetricChord: return "SymmetricChord";
    case RegimeTag::CornerRegime: return "CornerRegime";
    case RegimeTag::Custom: return "Custom";
  }
  return "Custom";
}

static RegimeTag regime_from_string(const std::string& s) {
  if (s == "AllRight") return RegimeTag::AllRight;
  if (s == "AllLeft") return RegimeTag::AllLeft;
  if (s == "AngleSquare") return RegimeTag::AngleSquare;
  if (s == "SymmetricChord") return RegimeTag::SymmetricChord;
  if (s == "CornerRegime") return RegimeTag::CornerRegime;
  if (s == "Custom") return RegimeTag::Custom;
  throw ParseError("unknown regime tag: " + s);
}

int FoliationSpec::locate_strip(double x1, double s) const {
  for (std::size_t i = 0; i < figures_.size(); ++i) {
    const Figure& f = figures_[i];
    if (const auto* tf = std::get_if<TangentFigure>(&f)) {
      const double v = v_of(*tf, x1, s);
      if (v >= tf->lo - kTol && v <= tf->hi + kTol) return int(i);
    } else if (const auto* hb = std::get_if<HerringboneFigure>(&f)) {
      WingHit hit;
      if (wing_lookup(*hb, x1, s, hit)) return int(i);
    } else if (const auto* sq = std::get_if<SquareFigure>(&f)) {
      if (std::fabs(x1 - sq->w) + s <= 1.0 + kTol) return int(i);
    } else if (const auto* co = std::get_if<CornerFigure>(&f)) {
      const double v = co->orient == Orientation::Right ? x1 + 1.0 - s : x1 - 1.0 + s;
      if (v >= co->a0 - kTol && v <= co->b0 + kTol) return int(i);
    }
  }
  return -1;
}

double FoliationSpec::eval_V(double x1, double x2) const {
  const double s = std::fabs(x2);
  if (s > 1.0 + 1e-12) throw CoverageError("point outside the strip |x2| <= 1");
  if (x1 < win_lo_ - 1e-12 || x1 > win_hi_ + 1e-12)
    throw CoverageError("point outside the covered window");
  const double sc = std::min(s, 1.0);
  const int i = locate_strip(x1, sc);
  if (i < 0) throw CoverageError("no figure covers the point");
  const Figure& f = figures_[i];
  if (const auto* tf = std::get_if<TangentFigure>(&f)) {
    const double v = v_of(*tf, x1, sc);
    return tf->m.value(v) * (x1 - v) + bd_.f(v);
  }
  if (const auto* hb = std::get_if<HerringboneFigure>(&f)) {
    WingHit hit;
    wing_lookup(*hb, x1, sc, hit);
    if (hit.ell <= 1e-300) return bd_.f(hb->ch.closure_t);
    const double fe = bd_.f(hit.endpoint);
    const double tau = clamp01(2.0 * (1.0 - sc) / hit.ell);
    return fe + tau * (hb->ch.A_value(hit.ell) - fe);
  }
  if (const auto* sq = std::get_if<SquareFigure>(&f)) return sq->v.eval(x1, sc);
  const auto& co = std::get<CornerFigure>(f);
  return co.v.eval(x1, sc);
}

int FoliationSpec::locate_omega(double y1, double y2) const {
  OmegaPoint y{y1, y2, std::sqrt(std::max(0.0, y1 * y1 + 1.0 - y2))};
  const double tol = kTol * (1.0 + std::fabs(y1));
  for (std::size_t i = 0; i < figures_.size(); ++i) {
    const Figure& f = figures_[i];
    if (const auto* tf = std::get_if<TangentFigure>(&f)) {
      const double u = u_of(*tf, y);
      if (u >= tf->lo - tol && u <= tf->hi + tol) return int(i);
    } else if (const auto* hb = std::get_if<HerringboneFigure>(&f)) {
      if (omega_in_chordal(*hb, y1, y2, tol)) return int(i);
    } else if (const auto* sq = std::get_if<SquareFigure>(&f)) {
      const double uR = y.y1 + 1.0 - y.root, uL = y.y1 - 1.0 + y.root;
      if (uL <= sq->w + tol && uR >= sq->w - tol) return int(i);
    } else if (const auto* co = std::get_if<CornerFigure>(&f)) {
      const double u = co->orient == Orientation::Right ? y.y1 + 1.0 - y.root : y.y1 - 1.0 + y.root;
      const double chordline = (co->a0 + co->b0) * y1 - co->a0 * co->b0;
      if (u >= co->a0 - tol && u <= co->b0 + tol && y2 >= chordline - tol) return int(i);
    }
  }
  return -1;
}

double FoliationSpec::eval_B(double y1, double y2) const {
  const double parab = y1 * y1;
  if (y2 < parab - 1e-9 || y2 > parab + 1.0 + 1e-9)
    throw CoverageError("point outside the parabolic strip");
  y2 = std::clamp(y2, parab, parab + 1.0);
  if (y1 < win_lo_ - 1e-12 || y1 > win_hi_ + 1e-12)
    throw CoverageError("point outside the covered window");
  const int i = locate_omega(y1, y2);
  if (i < 0) throw CoverageError("no figure covers the point");
  const Figure& f = figures_[i];
  OmegaPoint y{y1, y2, std::sqrt(std::max(0.0, y1 * y1 + 1.0 - y2))};
  if (const auto* tf = std::get_if<TangentFigure>(&f)) {
    const double u = u_of(*tf, y);
    return tf->m.value(u) * (y1 - u) + bd_.f(u);
  }
  if (const auto* hb = std::get_if<HerringboneFigure>(&f)) {
    const ChordalSolution& ch = hb->ch;
    // the chord through y: (a+b) y1 - a b = y2, increasing in the chord length
    auto g = [&](double ell) {
      const double a = ch.a_at(ell), b = ch.b_at(ell);
      return (a + b) * y1 - a * b - y2;
    };
    double lo = ch.ell1 > 0 ? ch.ell1 : ch.grid_step;
    double hi = ch.ell0;
    double ell;
    if (g(lo) >= 0.0) {
      ell = lo;  // sliver beneath the lowest tabulated chord
    } else {
      for (int it = 0; it < 100 && hi - lo > 1e-14 * (1.0 + hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        ((g(mid) <= 0.0) ? lo : hi) = mid;
      }
      ell = 0.5 * (lo + hi);
    }
    const double a = ch.a_at(ell), b = ch.b_at(ell);
    const double beta = clamp01((y1 - a) / (b - a));
    return (1.0 - beta) * bd_.f(a) + beta * bd_.f(b);
  }
  if (const auto* sq = std::get_if<SquareFigure>(&f)) return sq->b.eval(y1, y2);
  const auto& co = std::get<CornerFigure>(f);
  return co.b.eval(y1, y2);
}

GluingReport check_c1_gluing(const FoliationSpec& spec, double tol, int samples, double h) {
  GluingReport rep;
  for (const Interface& iface : spec.interfaces()) {
    GluingReport::Entry e{iface.name, 0.0, 0.0, 0.0};
    for (int k = 0; k < samples; ++k) {
      const double t = 0.06 + (0.94 - 0.06) * double(k) / double(std::max(1, samples - 1));
      double px, py, nx, ny;
      if (!iface.spine) {
        px = iface.x0 + t * (iface.x1 - iface.x0);
        py = iface.y0 + t * (iface.y1 - iface.y0);
        const double dx = iface.x1 - iface.x0, dy = iface.y1 - iface.y0;
        const double len = std::hypot(dx, dy);
        nx = -dy / len;
        ny = dx / len;
      } else {
        const auto& hb = std::get<HerringboneFigure>(spec.figures()[iface.figure]);
        const ChordalSolution& ch = hb.ch;
        const double ell = ch.ell1 + (0.08 + 0.89 * t) * (ch.ell0 - ch.ell1);
        const double mid = 0.5 * (ch.a_at(ell) + ch.b_at(ell));
        px = mid;
        py = (iface.y0 < 0 ? -1.0 : 1.0) * (1.0 - ell / 2.0);
        nx = 1.0;
        ny = 0.0;
      }
      const double hh = h * (1.0 + std::fabs(px));
      const double v0 = spec.eval_V(px, py);
      const double fwd =
          (-3.0 * v0 + 4.0 * spec.eval_V(px + hh * nx, py + hh * ny) -
           spec.eval_V(px + 2.0 * hh * nx, py + 2.0 * hh * ny)) /
          (2.0 * hh);
      const double bwd =
          (3.0 * v0 - 4.0 * spec.eval_V(px - hh * nx, py - hh * ny) +
           spec.eval_V(px - 2.0 * hh * nx, py - 2.0 * hh * ny)) /
          (2.0 * hh);
      const double jump = std::fabs(fwd - bwd);
      if (jump > e.max_jump) {
        e.max_jump = jump;
        e.at_x1 = px;
        e.at_x2 = py;
      }
    }
    if (e.max_jump > rep.max_jump) {
      rep.max_jump = e.max_jump;
      rep.at_x1 = e.at_x1;
      rep.at_x2 = e.at_x2;
    }
    rep.entries.push_back(std::move(e));
  }
  rep.pass = rep.max_jump <= tol;
  return rep;
}

// ---------------------------------------------------------------------------
// serialization (format: foliation/1)

namespace {

void put_num(std::ostream& os, double v) {
  if (std::isinf(v))
    os << (v > 0 ? "inf" : "-inf");
  else {
    char buf[40];
    snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
  }
}

void put_vec(std::ostream& os, const char* name, const std::vector<double>& v) {
  os << name << ' ' << v.size();
  for (double x : v) {
    os << ' ';
    put_num(os, x);
  }
  os << '\n';
}

double get_num(std::istream& is) {
  std::string tok;
  if (!(is >> tok)) throw ParseError("foliation file truncated");
  if (tok == "inf") return kInf;
  if (tok == "-inf") return -kInf;
  if (tok == "nan") return std::numeric_limits<double>::quiet_NaN();
  try {
    return std::stod(tok);
  } catch (const std::exception&) {
    throw ParseError("foliation file: bad number '" + tok + "'");
  }
}

std::vector<double> get_vec(std::istream& is, const char* name) {
  std::string tok;
  is >> tok;
  if (tok != name) throw ParseError(std::string("foliation file: expected ") + name);
  std::size_t n;
  is >> n;
  std::vector<double> v(n);
  for (auto& x : v) x = get_num(is);
  return v;
}

}  // namespace

void FoliationSpec::save(std::ostream& os) const {
  os << "foliation/1\n";
  os << "family " << bd_.spec_string() << '\n';
  os << "regime " << to_string(regime_) << '\n';
  os << "window ";
  put_num(os, win_lo_);
  os << ' ';
  put_num(os, win_hi_);
  os << '\n';
  os << "figures " << figures_.size() << '\n';
  for (const Figure& f : figures_) {
    if (const auto* tf = std::get_if<TangentFigure>(&f)) {
      os << "tangent " << (tf->m.orientation == Orientation::Right ? 'R' : 'L') << '\n';
      os << "range ";
      put_num(os, tf->m.u1);
      os << ' ';
      put_num(os, tf->m.u2);
      os << ' ';
      put_num(os, tf->lo);
      os << ' ';
      put_num(os, tf->hi);
      os << '\n';
      os << "closed " << (tf->m.closed ? 1 : 0) << ' ';
      put_num(os, tf->m.hom);
      os << '\n';
      os << "grid ";
      put_num(os, tf->m.grid_lo);
      os << ' ';
      put_num(os, tf->m.grid_step);
      os << '\n';
      put_vec(os, "m", tf->m.m);
      put_vec(os, "m2", tf->m.m2);
    } else if (const auto* hb = std::get_if<HerringboneFigure>(&f)) {
      const ChordalSolution& ch = hb->ch;
      os << "herringbone\n";
      os << "ell ";
      put_num(os, ch.ell1);
      os << ' ';
      put_num(os, ch.ell0);
      os << ' ';
      put_num(os, std::isnan(ch.closure_t) ? std::numeric_limits<double>::quiet_NaN()
                                           : ch.closure_t);
      os << ' ';
      put_num(os, ch.A_at_ell0);
      os << '\n';
      os << "grid ";
      put_num(os, ch.grid_lo);
      os << ' ';
      put_num(os, ch.grid_step);
      os << '\n';
      put_vec(os, "a", ch.a);
      put_vec(os, "b", ch.b);
      put_vec(os, "dl", ch.dl);
      put_vec(os, "dr", ch.dr);
      put_vec(os, "A", ch.A);
    } else if (const auto* sq = std::get_if<SquareFigure>(&f)) {
      os << "square ";
      put_num(os, sq->w);
      os << '\n' << "coeff ";
      put_num(os, sq->v.a11);
      os << ' ';
      put_num(os, sq->v.a1);
      os << ' ';
      put_num(os, sq->v.a0);
      os << ' ';
      put_num(os, sq->b.b2);
      os << ' ';
      put_num(os, sq->b.b1);
      os << ' ';
      put_num(os, sq->b.b0);
      os << '\n';
    } else {
      const auto& co = std::get<CornerFigure>(f);
      os << "corner " << (co.orient == Orientation::Right ? 'R' : 'L') << ' ';
      put_num(os, co.a0);
      os << ' ';
      put_num(os, co.b0);
      os << '\n' << "coeff ";
      put_num(os, co.v.a11);
      os << ' ';
      put_num(os, co.v.a1);
      os << ' ';
      put_num(os, co.v.a0);
      os << ' ';
      put_num(os, co.b.b2);
      os << ' ';
      put_num(os, co.b.b1);
      os << ' ';
      put_num(os, co.b.b0);
      os << '\n';
    }
  }
  os << "interfaces " << interfaces_.size() << '\n';
  for (const Interface& ifc : interfaces_) {
    os << "iface " << ifc.name << ' ' << (ifc.spine ? 1 : 0) << ' ';
    put_num(os, ifc.x0);
    os << ' ';
    put_num(os, ifc.y0);
    os << ' ';
    put_num(os, ifc.x1);
    os << ' ';
    put_num(os, ifc.y1);
    os << ' ' << ifc.figure << '\n';
  }
  os << "end\n";
}

FoliationSpec FoliationSpec::load(std::istream& is) {
  std::string tok;
  is >> tok;
  if (tok != "foliation/1") throw ParseError("not a foliation/1 file");
  is >> tok;
  if (tok != "family") throw ParseError("expected family");
  std::string famspec;
  is >> famspec;
  is >> tok;
  if (tok != "regime") throw ParseError("expected regime");
  std::string reg;
  is >> reg;
  is >> tok;
  if (tok != "window") throw ParseError("expected window");
  const double wlo = get_num(is), whi = get_num(is);
  BoundaryData bd = BoundaryData::parse(famspec);
  FoliationSpec spec(bd, regime_from_string(reg), wlo, whi);
  is >> tok;
  if (tok != "figures") throw ParseError("expected figures");
  std::size_t nf;
  is >> nf;
  for (std::size_t i = 0; i < nf; ++i) {
    is >> tok;
    if (tok == "tangent") {
      char oc;
      is >> oc;
      TangentFigure tf;
      tf.m.orientation = oc == 'R' ? Orientation::Right : Orientation::Left;
      tf.m.family = bd.family();
      tf.m.fparam = bd.param();
      is >> tok;  // range
      tf.m.u1 = get_num(is);
      tf.m.u2 = get_num(is);
      tf.lo = get_num(is);
      tf.hi = get_num(is);
      is >> tok;  // closed
      int cl;
      is >> cl;
      tf.m.closed = cl != 0;
      tf.m.hom = get_num(is);
      is >> tok;  // grid
      tf.m.grid_lo = get_num(is);
      tf.m.grid_step = get_num(is);
      tf.m.m = get_vec(is, "m");
      tf.m.m2 = get_vec(is, "m2");
      tf.m.finalize();
      spec.add_figure(std::move(tf));
    } else if (tok == "herringbone") {
      HerringboneFigure hb;
      ChordalSolution& ch = hb.ch;
      is >> tok;  // ell
      ch.ell1 = get_num(is);
      ch.ell0 = get_num(is);
      ch.closure_t = get_num(is);
      ch.A_at_ell0 = get_num(is);
      is >> tok;  // grid
      ch.grid_lo = get_num(is);
      ch.grid_step = get_num(is);
      ch.a = get_vec(is, "a");
      ch.b = get_vec(is, "b");
      ch.dl = get_vec(is, "dl");
      ch.dr = get_vec(is, "dr");
      ch.A = get_vec(is, "A");
      ch.finalize();
      spec.add_figure(std::move(hb));
    } else if (tok == "square") {
      SquareFigure sq;
      sq.w = get_num(is);
      is >> tok;
      sq.v.a11 = get_num(is);
      sq.v.a1 = get_num(is);
      sq.v.a0 = get_num(is);
      sq.b.b2 = get_num(is);
      sq.b.b1 = get_num(is);
      sq.b.b0 = get_num(is);
      spec.add_figure(sq);
    } else if (tok == "corner") {
      CornerFigure co;
      char oc;
      is >> oc;
      co.orient = oc == 'R' ? Orientation::Right : Orientation::Left;
      co.a0 = get_num(is);
      co.b0 = get_num(is);
      is >> tok;
      co.v.a11 = get_num(is);
      co.v.a1 = get_num(is);
      co.v.a0 = get_num(is);
      co.b.b2 = get_num(is);
      co.b.b1 = get_num(is);
      co.b.b0 = get_num(is);
      spec.add_figure(co);
    } else {
      throw ParseError("foliation file: unknown figure kind " + tok);
    }
  }
  is >> tok;
  if (tok != "interfaces") throw ParseError("expected interfaces");
  std::size_t ni;
  is >> ni;
  for (std::size_t i = 0; i < ni; ++i) {
    is >> tok;
    if (tok != "iface") throw ParseError("expected iface");
    Interface ifc;
    is >> ifc.name;
    int sp;
    is >> sp;
    ifc.spine = sp != 0;
    ifc.x0 = get_num(is);
    ifc.y0 = get_num(is);
    ifc.x1 = get_num(is);
    ifc.y1 = get_num(is);
    is >> ifc.figure;
    spec.add_interface(std::move(ifc));
  }
  return spec;
}

}  // namespace bellman
