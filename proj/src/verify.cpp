#include "bellman/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "bellman/errors.hpp"
#include "bellman/martingale.hpp"

namespace bellman {

namespace {

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

struct Rng64 {
  std::uint64_t s;
  explicit Rng64(std::uint64_t seed) : s(seed ? seed : 1) {}
  std::uint64_t next() {
    std::uint64_t z = (s += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * (double(next() >> 11) * 0x1.0p-53);
  }
};

void track(VerificationReport& rep, double residual, double x1, double x2) {
  if (residual > rep.max_residual) {
    rep.max_residual = residual;
    rep.locus_x1 = x1;
    rep.locus_x2 = x2;
  }
}

}  // namespace

VerificationReport check_diagonal(const FoliationSpec& spec, double x1_lo, double x1_hi,
                                  double step, double tol) {
  Timer tm;
  VerificationReport rep;
  rep.name = "diagonal-identity";
  rep.tolerance = tol;
  {
    char buf[128];
    snprintf(buf, sizeof buf, "x1=[%g,%g] step=%g", x1_lo, x1_hi, step);
    rep.params = buf;
  }
  for (double x1 = x1_lo; x1 <= x1_hi + 1e-12; x1 += step) {
    const double v = spec.eval_V(x1, 0.0);
    const double b = spec.eval_B(x1, x1 * x1 + 1.0);
    track(rep, std::fabs(v - b), x1, 0.0);
  }
  rep.pass = rep.max_residual <= tol;
  rep.runtime_sec = tm.seconds();
  return rep;
}

VerificationReport check_boundary(const FoliationSpec& spec, int samples, double tol) {
  Timer tm;
  VerificationReport rep;
  rep.name = "boundary-condition";
  rep.tolerance = tol;
  rep.params = "samples=" + std::to_string(samples);
  const double lo = spec.window_lo(), hi = spec.window_hi();
  for (int i = 0; i < samples; ++i) {
    const double x1 = lo + (hi - lo) * double(i) / double(samples - 1);
    for (double x2 : {-1.0, 1.0}) {
      const double r = std::fabs(spec.eval_V(x1, x2) - spec.boundary().f(x1));
      track(rep, r, x1, x2);
    }
  }
  rep.pass = rep.max_residual <= tol;
  rep.runtime_sec = tm.seconds();
  return rep;
}

VerificationReport check_diag_concavity(const FoliationSpec& spec, int samples, double h,
                                        double tol, std::uint64_t seed) {
  Timer tm;
  VerificationReport rep;
  rep.name = "diagonal-concavity";
  rep.tolerance = tol;
  rep.params = "samples=" + std::to_string(samples) + " h=" + std::to_string(h);
  Rng64 rng(seed);
  const double lo = spec.window_lo() + 2 * h, hi = spec.window_hi() - 2 * h;
  const double r2 = std::sqrt(0.5);
  for (int i = 0; i < samples; ++i) {
    const double x1 = rng.uniform(lo, hi);
    const double x2 = rng.uniform(-1.0 + 2 * h, 1.0 - 2 * h);
    for (double sy : {1.0, -1.0}) {
      const double ex = h * r2, ey = sy * h * r2;
      const double second = spec.eval_V(x1 + ex, x2 + ey) - 2.0 * spec.eval_V(x1, x2) +
                            spec.eval_V(x1 - ex, x2 - ey);
      track(rep, std::max(0.0, second), x1, x2);
    }
  }
  rep.pass = rep.max_residual <= tol;
  rep.runtime_sec = tm.seconds();
  return rep;
}

VerificationReport check_omega_concavity(const FoliationSpec& spec, int samples, int directions,
                                         double h, double tol, std::uint64_t seed) {
  Timer tm;
  VerificationReport rep;
  rep.name = "omega-concavity";
  rep.tolerance = tol;
  rep.params = "samples=" + std::to_string(samples) + " dirs=" + std::to_string(directions);
  Rng64 rng(seed);
  const double lo = spec.window_lo() + 1.0, hi = spec.window_hi() - 1.0;
  for (int i = 0; i < samples; ++i) {
    const double y1 = rng.uniform(lo, hi);
    const double depth = rng.uniform(0.1, 0.9);
    const double y2 = y1 * y1 + depth;
    // admissible slopes keep the whole sampled segment under the free boundary
    const double margin = 0.75;
    const double rad = 2.0 * std::sqrt(std::max(0.0, 1.0 - depth)) * margin;
    for (int d = 0; d < directions; ++d) {
      const double k = 2.0 * y1 + rad * (2.0 * double(d) / double(directions - 1) - 1.0);
      const double nrm = std::hypot(1.0, k);
      const double ex = h / nrm, ey = h * k / nrm;
      const double yl2 = y2 - ey, yr2 = y2 + ey;
      const double yl1 = y1 - ex, yr1 = y1 + ex;
      if (yl2 < yl1 * yl1 || yl2 > yl1 * yl1 + 1.0) continue;
      if (yr2 < yr1 * yr1 || yr2 > yr1 * yr1 + 1.0) continue;
      const double second =
          spec.eval_B(yr1, yr2) - 2.0 * spec.eval_B(y1, y2) + spec.eval_B(yl1, yl2);
      track(rep, std::max(0.0, second), y1, y2);
    }
  }
  rep.pass = rep.max_residual <= tol;
  rep.runtime_sec = tm.seconds();
  return rep;
}

VerificationReport check_c1(const FoliationSpec& spec, double tol) {
  Timer tm;
  VerificationReport rep;
  rep.name = "c1-gluing";
  rep.tolerance = tol;
  rep.params = "interfaces=" + std::to_string(spec.interfaces().size());
  const GluingReport g = check_c1_gluing(spec, tol);
  rep.max_residual = g.max_jump;
  rep.locus_x1 = g.at_x1;
  rep.locus_x2 = g.at_x2;
  rep.pass = g.pass;
  rep.runtime_sec = tm.seconds();
  return rep;
}

DiscreteCheck check_discrete_vs_closed(const FoliationSpec& spec, const LatticeGrid& g,
                                       double window, double two_sided_tol) {
  Timer tm;
  DiscreteCheck out;
  out.one_sided.name = "lattice-domination";
  out.one_sided.tolerance = 1e-9;
  out.two_sided.name = "lattice-agreement";
  out.two_sided.tolerance = two_sided_tol;
  {
    char buf[128];
    snprintf(buf, sizeof buf, "N=%d M=%d window=%g metric=relative", g.N, g.M, window);
    out.one_sided.params = buf;
    out.two_sided.params = buf;
  }
  const int N = g.N, MN = g.M * g.N;
  const int mwin = std::min(MN, int(std::floor(window * N)));
  for (int n = -N; n <= N; ++n)
    for (int m = -mwin; m <= mwin; ++m) {
      const double x1 = double(m) / double(N), x2 = double(n) / double(N);
      const double v = spec.eval_V(x1, x2);
      const double d = g.at(m, n);
      track(out.one_sided, d - v, x1, x2);  // positive = grid exceeds the closed form
      // the discrete gap scales with the value; judge agreement relative
      track(out.two_sided, std::fabs(d - v) / std::max(1.0, std::fabs(v)), x1, x2);
    }
  out.one_sided.pass = out.one_sided.max_residual <= out.one_sided.tolerance;
  out.two_sided.pass = out.two_sided.max_residual <= out.two_sided.tolerance;
  out.one_sided.runtime_sec = out.two_sided.runtime_sec = tm.seconds();
  return out;
}

VerificationReport check_martingale_bound(const FoliationSpec& spec, int depth, long trials,
                                          std::uint64_t seed) {
  Timer tm;
  VerificationReport rep;
  rep.name = "martingale-upper";
  rep.tolerance = 1e-8;
  rep.params = "depth=" + std::to_string(depth) + " trials=" + std::to_string(trials);
  const double pts[][2] = {{0.0, 0.0}, {0.5, 0.25}, {-1.0, -0.5}, {2.0, 0.7}, {-2.5, 0.0}};
  for (const auto& pt : pts) {
    if (pt[0] < spec.window_lo() + 2 || pt[0] > spec.window_hi() - 2) continue;
    const SearchResult sr = search_lower_bound(spec.boundary(), pt[0], pt[1], depth, trials,
                                               TransformMode::V, seed);
    const double v = spec.eval_V(pt[0], pt[1]);
    track(rep, sr.best_payoff - v, pt[0], pt[1]);  // positive would break the bound
  }
  rep.pass = rep.max_residual <= rep.tolerance;
  rep.runtime_sec = tm.seconds();
  return rep;
}

VerificationReport check_subordination(const FoliationSpec& spec, int points, int depth,
                                       long trials, std::uint64_t seed) {
  Timer tm;
  VerificationReport rep;
  rep.name = "subordination";
  rep.tolerance = 1e-8;
  rep.params = "points=" + std::to_string(points) + " depth=" + std::to_string(depth);
  Rng64 rng(seed);
  for (int i = 0; i < points; ++i) {
    const double x1 = rng.uniform(spec.window_lo() + 2.0, spec.window_hi() - 2.0);
    const double x2 = rng.uniform(-0.95, 0.95);
    const SearchResult sr =
        search_lower_bound(spec.boundary(), x1, x2, depth, trials, TransformMode::U, seed + i);
    double bound = -1e300;
    const int K = 64;
    for (int k = 0; k <= K; ++k) {
      const double delta = (1.0 - x2 * x2) * double(k) / double(K);
      bound = std::max(bound, spec.eval_B(x1, x1 * x1 + delta));
    }
    track(rep, sr.best_payoff - bound, x1, x2);
  }
  rep.pass = rep.max_residual <= rep.tolerance;
  rep.runtime_sec = tm.seconds();
  return rep;
}

std::vector<VerificationReport> run_suite(const SuiteConfig& cfg) {
  const BoundaryData bd = BoundaryData::parse(cfg.family);
  BuildParams bp;
  bp.window = cfg.window;
  const FoliationSpec spec = build_foliation_auto(bd, bp);

  std::vector<VerificationReport> reps;
  reps.push_back(check_boundary(spec));
  const double dspan = std::min(3.0, cfg.window - 2.0);
  reps.push_back(check_diagonal(spec, -dspan, dspan, 1e-2));
  reps.push_back(check_diag_concavity(spec, 10000, 1e-3, 1e-8, cfg.seed));
  reps.push_back(check_omega_concavity(spec, 4000, 8, 1e-3, 1e-8, cfg.seed + 1));
  reps.push_back(check_c1(spec));
  if (cfg.with_lattice) {
    const LatticeGrid g = solve_lattice(bd, cfg.N, cfg.M, cfg.tol);
    DiscreteCheck dc = check_discrete_vs_closed(spec, g, cfg.compare_window, 2e-2);
    reps.push_back(dc.one_sided);
    reps.push_back(dc.two_sided);
  }
  if (cfg.with_martingale) {
    reps.push_back(check_martingale_bound(spec, cfg.depth, cfg.trials, cfg.seed + 2));
    reps.push_back(check_subordination(spec, 3, std::min(cfg.depth, 8), cfg.trials / 4 + 1,
                                       cfg.seed + 3));
  }
  std::sort(reps.begin(), reps.end(),
            [](const VerificationReport& a, const VerificationReport& b) { return a.name < b.name; });
  return reps;
}

void write_report(std::ostream& os, const SuiteConfig& cfg,
                  const std::vector<VerificationReport>& reports) {
  os << "report/1\n";
  os << "artifact bellman-suite 1.0.0\n";
  os << "seed " << cfg.seed << '\n';
  os << "family " << cfg.family << '\n';
  char buf[160];
  snprintf(buf, sizeof buf, "config N=%d M=%d tol=%.17g thresh=%.17g window=%.17g", cfg.N, cfg.M,
           cfg.tol, cfg.thresh, cfg.window);
  os << buf << "\n\n";
  for (const auto& r : reports) {
    os << "check " << r.name << '\n';
    os << "  params " << r.params << '\n';
    snprintf(buf, sizeof buf, "  tolerance %.17g", r.tolerance);
    os << buf << '\n';
    snprintf(buf, sizeof buf, "  max_residual %.17g", r.max_residual);
    os << buf << '\n';
    snprintf(buf, sizeof buf, "  locus %.17g %.17g", r.locus_x1, r.locus_x2);
    os << buf << '\n';
    os << "  status " << (r.pass ? "PASS" : "FAIL") << '\n';
  }
}

}  // namespace bellman
