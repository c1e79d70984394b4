#include "bellman/tangent.hpp"

#include <algorithm>
#include <cmath>

#include "bellman/errors.hpp"
#include "bellman/quadrature.hpp"

namespace bellman {

bool has_closed_m(Family f) {
  return f == Family::Exp || f == Family::NegExp || f == Family::Quad || f == Family::Poly5;
}

double particular_m(Family f, double param, Orientation o, double u) {
  const bool right = o == Orientation::Right;
  switch (f) {
    case Family::Exp:
      return right ? param / (1.0 + param) * std::exp(param * u)
                   : param / (1.0 - param) * std::exp(param * u);
    case Family::NegExp:
      return right ? -param / (1.0 + param) * std::exp(param * u)
                   : -param / (1.0 - param) * std::exp(param * u);
    case Family::Quad:
      return right ? 2.0 * u - 2.0 : 2.0 * u + 2.0;
    case Family::Poly5: {
      const double u2 = u * u;
      if (right)
        return (u2 * u2 - 4.0 * u2 * u + 12.0 * u2 - 24.0 * u + 24.0) / 12.0 -
               param * (u2 - 2.0 * u + 2.0) / 2.0;
      return (u2 * u2 + 4.0 * u2 * u + 12.0 * u2 + 24.0 * u + 24.0) / 12.0 -
             param * (u2 + 2.0 * u + 2.0) / 2.0;
    }
    default:
      throw DomainError("no closed slope for this family");
  }
}

void TangentSolution::ensure_interp() const {
  if (!interp_ && !closed && m.size() >= 2) interp_.emplace(grid_lo, grid_step, m);
}

double TangentSolution::value(double u) const {
  if (closed) {
    const double part = particular_m(family, fparam, orientation, u);
    if (hom == 0.0) return part;
    return part + hom * std::exp(orientation == Orientation::Right ? -u : u);
  }
  if (!interp_) throw Error("tangent solution not finalized");
  return interp_->value(u);
}

double TangentSolution::deriv2(const BoundaryData& bd, double u) const {
  const double mv = value(u);
  if (orientation == Orientation::Right) return bd.f2(u) - bd.f1(u) + mv;
  return mv - bd.f1(u) - bd.f2(u);
}

namespace {

double node_m2(const BoundaryData& bd, Orientation o, double u, double mv) {
  try {
    if (o == Orientation::Right) return bd.f2(u) - bd.f1(u) + mv;
    return mv - bd.f1(u) - bd.f2(u);
  } catch (const NonDifferentiableError&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

// wraps f' with constant extension beyond a table's domain so that tail
// integrals stay defined; analytic families pass through untouched
double f1_ext(const BoundaryData& bd, double t) {
  const double c = std::clamp(t, bd.domain_lo(), bd.domain_hi());
  return bd.f1(c);
}

}  // namespace

TangentSolution solve_m(const BoundaryData& bd, Orientation o, double u1, double u2,
                        std::optional<InitialValue> initial, const TangentParams& p) {
  const bool right = o == Orientation::Right;
  const bool infinite_side = right ? std::isinf(u1) && u1 < 0 : std::isinf(u2) && u2 > 0;
  if (infinite_side && initial)
    throw DomainError("infinite tangent range: the decaying integral fixes the solution, "
                      "no initial value is accepted");
  if (!infinite_side && !initial)
    throw DomainError("finite tangent range requires an initial value (u*, m(u*))");
  if (!(u1 < u2)) throw DomainError("tangent range must be non-degenerate");

  TangentSolution ts;
  ts.orientation = o;
  ts.u1 = u1;
  ts.u2 = u2;
  ts.family = bd.family();
  ts.fparam = bd.param();

  double clip_lo = std::max(u1, p.window_lo);
  double clip_hi = std::min(u2, p.window_hi);
  if (!(clip_lo < clip_hi)) throw DomainError("tangent window does not intersect the range");

  if (has_closed_m(bd.family())) {
    ts.closed = true;
    ts.hom = 0.0;
    if (initial) {
      const double part = particular_m(bd.family(), bd.param(), o, initial->u);
      ts.hom = (initial->m - part) * std::exp(right ? initial->u : -initial->u);
    }
    const double h = p.h;
    const std::size_t n = std::size_t(std::ceil((clip_hi - clip_lo) / h)) + 1;
    ts.grid_lo = clip_lo;
    ts.grid_step = h;
    ts.m.resize(n);
    ts.m2.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double u = clip_lo + h * double(i);
      ts.m[i] = ts.value(u);
      ts.m2[i] = node_m2(bd, o, u, ts.m[i]);
    }
  } else {
    const double h = p.h_grid;
    // anchor the grid on the initial abscissa when one is given
    double lo = clip_lo, hi = clip_hi;
    std::size_t n;
    std::size_t anchor;
    if (initial) {
      if (initial->u < clip_lo - 1e-12 || initial->u > clip_hi + 1e-12)
        throw DomainError("initial value lies outside the tabulation window");
      const double us = std::clamp(initial->u, clip_lo, clip_hi);
      const std::size_t below = std::size_t(std::ceil((us - clip_lo) / h - 1e-12));
      const std::size_t above = std::size_t(std::ceil((clip_hi - us) / h - 1e-12));
      lo = us - h * double(below);
      hi = us + h * double(above);
      n = below + above + 1;
      anchor = below;
    } else {
      n = std::size_t(std::ceil((clip_hi - clip_lo) / h)) + 1;
      hi = lo + h * double(n - 1);
      anchor = right ? 0 : n - 1;
    }
    ts.grid_lo = lo;
    ts.grid_step = h;
    ts.m.assign(n, 0.0);

    if (initial) {
      ts.m[anchor] = initial->m;
    } else if (right) {
      ts.m[0] = integrate_left_tail(
          [&](double t) { return f1_ext(bd, t) * std::exp(t - lo); }, lo, p.tail_block);
    } else {
      ts.m[n - 1] = integrate_right_tail(
          [&](double t) { return f1_ext(bd, t) * std::exp(hi - t); }, hi, p.tail_block);
    }

    const double eh = std::exp(-h), eh2 = std::exp(-h / 2.0);
    const double gh = std::exp(h), gh2 = std::exp(h / 2.0);
    auto fp = [&](double t) { return f1_ext(bd, t); };
    // integrating-factor step; Simpson on the one-cell integral
    for (std::size_t i = anchor; i + 1 < n; ++i) {
      const double u = lo + h * double(i);
      if (right)
        ts.m[i + 1] = eh * ts.m[i] +
                      h / 6.0 * (fp(u) * eh + 4.0 * fp(u + h / 2.0) * eh2 + fp(u + h));
      else
        ts.m[i + 1] = gh * ts.m[i] -
                      h / 6.0 * (fp(u) * gh + 4.0 * fp(u + h / 2.0) * gh2 + fp(u + h));
    }
    for (std::size_t i = anchor; i > 0; --i) {
      const double u = lo + h * double(i);
      if (right)
        ts.m[i - 1] = gh * ts.m[i] -
                      h / 6.0 * (fp(u - h) + 4.0 * fp(u - h / 2.0) * gh2 + fp(u) * gh);
      else
        ts.m[i - 1] = eh * ts.m[i] +
                      h / 6.0 * (fp(u - h) + 4.0 * fp(u - h / 2.0) * eh2 + fp(u) * eh);
    }
    ts.m2.resize(n);
    for (std::size_t i = 0; i < n; ++i)
      ts.m2[i] = node_m2(bd, o, lo + h * double(i), ts.m[i]);
  }

  ts.finalize();
  if (p.certify) certify_tangent(ts, bd, clip_lo, clip_hi, p.tol_sign);
  return ts;
}

void certify_tangent(const TangentSolution& ts, const BoundaryData& bd, double lo, double hi,
                     double tol_sign) {
  double scale = 1.0;
  for (std::size_t i = 0; i < ts.m.size(); ++i) scale = std::max(scale, std::fabs(ts.m[i]));
  const double tol = tol_sign * scale;
  const std::size_t n = ts.m.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double u = ts.grid_lo + ts.grid_step * double(i);
    if (u < lo - 1e-12 || u > hi + 1e-12) continue;
    const double m2 = ts.m2[i];
    const bool bad = std::isnan(m2) || (ts.orientation == Orientation::Right ? m2 > tol : m2 < -tol);
    if (bad)
      throw RegimeError(ts.orientation == Orientation::Right
                            ? "right tangent certificate m'' <= 0 fails"
                            : "left tangent certificate m'' >= 0 fails",
                        u);
  }
  (void)bd;
}

}  // namespace bellman
