#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "bellman/errors.hpp"
#include "bellman/foliation.hpp"
#include "bellman/lattice.hpp"
#include "bellman/martingale.hpp"
#include "bellman/verify.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

void set_threads(int threads) {
#ifdef _OPENMP
  if (threads <= 0) {
    if (const char* env = std::getenv("BELLMAN_THREADS")) threads = std::atoi(env);
  }
  if (threads > 0) omp_set_num_threads(threads);
#else
  (void)threads;
#endif
}

int run(int argc, char** argv) {
  CLI::App app{"Bellman/Burkholder solver suite: closed-form foliations on the strip, the "
               "discrete lattice solver, and martingale lower bounds"};
  app.set_config("--config", "", "key=value configuration file");
  app.require_subcommand(1);

  std::string family = "quad";
  int threads = 0;
  app.add_option("--threads", threads, "worker threads (default: all cores)")
      ->envname("BELLMAN_THREADS");

  int N = 30, M = 10;
  double tol = 1e-5, thresh = 0.005;
  double window = 16.0;
  std::uint64_t seed = 1;

  auto* lat = app.add_subcommand("solve-lattice", "solve the discrete fixed point and export CSV");
  lat->fallthrough();
  std::string grid_out = "grid.csv";
  bool gauss_seidel = false;
  long long max_iters = 10'000'000;
  lat->add_option("--f", family, "boundary family spec")->required();
  lat->add_option("--n", N, "vertical half-resolution");
  lat->add_option("--m", M, "horizontal half-width");
  lat->add_option("--tol", tol, "sup-delta stopping tolerance");
  lat->add_option("--max-iters", max_iters, "iteration cap");
  lat->add_option("--out", grid_out, "output CSV path");
  lat->add_flag("--gauss-seidel", gauss_seidel,
                "in-place sweeps (same fixed point, different iteration count)");

  auto* cls = app.add_subcommand("classify", "classify cell flatness and export PPM");
  cls->fallthrough();
  std::string map_out = "map.ppm", cls_grid_out;
  cls->add_option("--f", family)->required();
  cls->add_option("--n", N);
  cls->add_option("--m", M);
  cls->add_option("--tol", tol);
  cls->add_option("--thresh", thresh, "flatness threshold");
  cls->add_option("--out", map_out, "output PPM path");
  cls->add_option("--grid-out", cls_grid_out, "also export the grid CSV");

  auto* fol = app.add_subcommand("foliation", "build the closed-form construction and save it");
  fol->fallthrough();
  std::string fol_out = "foliation.txt";
  fol->add_option("--f", family)->required();
  fol->add_option("--window", window, "covered |x1| range");
  fol->add_option("--out", fol_out, "output path");

  auto* ev = app.add_subcommand("eval", "evaluate the closed form at a point");
  ev->fallthrough();
  double x1 = 0, x2 = 0;
  std::string side = "sigma";
  ev->add_option("--f", family)->required();
  ev->add_option("--x1", x1)->required();
  ev->add_option("--x2", x2, "second coordinate (strip: x2, parabolic: y2)");
  ev->add_option("--side", side, "sigma (strip value) or omega (parabolic value)")
      ->check(CLI::IsMember({"sigma", "omega"}));
  ev->add_option("--window", window);

  auto* ver = app.add_subcommand("verify", "run the cross-check battery and write a report");
  ver->fallthrough();
  std::string report_out = "report.txt";
  int depth = 10;
  long trials = 2000;
  bool no_lattice = false, no_martingale = false;
  ver->add_option("--f", family)->required();
  ver->add_option("--seed", seed);
  ver->add_option("--n", N);
  ver->add_option("--m", M);
  ver->add_option("--tol", tol);
  ver->add_option("--thresh", thresh);
  ver->add_option("--window", window);
  ver->add_option("--depth", depth);
  ver->add_option("--trials", trials);
  ver->add_option("--report", report_out, "report output path");
  ver->add_flag("--no-lattice", no_lattice, "skip the lattice cross-checks");
  ver->add_flag("--no-martingale", no_martingale, "skip the martingale cross-checks");

  auto* sim = app.add_subcommand("simulate", "martingale lower-bound search");
  sim->fallthrough();
  std::string mode = "V", tree_out;
  sim->add_option("--f", family)->required();
  sim->add_option("--x1", x1)->required();
  sim->add_option("--x2", x2);
  sim->add_option("--depth", depth, "tree depth");
  sim->add_option("--trials", trials, "search restarts");
  sim->add_option("--mode", mode)->check(CLI::IsMember({"V", "U"}));
  sim->add_option("--seed", seed);
  sim->add_option("--out", tree_out, "serialize the best tree here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp") return 0;
    std::fprintf(stderr,
                 "family grammar: exp:<l>  negexp:<l>  pmom:<p>  poly5:<c>  quad  table:<path>\n");
    return 2;
  }
  set_threads(threads);

  using namespace bellman;
  if (lat->parsed()) {
    const BoundaryData bd = BoundaryData::parse(family);
    LatticeParams lp;
    lp.max_iters = max_iters;
    lp.sweep = gauss_seidel ? Sweep::GaussSeidel : Sweep::Jacobi;
    const LatticeGrid g = solve_lattice(bd, N, M, tol, lp);
    export_grid_csv(g, grid_out, bd.spec_string(), tol);
    std::printf("converged in %lld iterations; wrote %s\n", g.iterations, grid_out.c_str());
    return 0;
  }
  if (cls->parsed()) {
    const BoundaryData bd = BoundaryData::parse(family);
    const LatticeGrid g = solve_lattice(bd, N, M, tol, {});
    const FlatnessMap fm = classify_flatness(g, thresh);
    export_map_ppm(fm, map_out);
    if (!cls_grid_out.empty()) export_grid_csv(g, cls_grid_out, bd.spec_string(), tol);
    long green = 0;
    for (auto c : fm.cls)
      if (c == CellClass::Bilinear) ++green;
    std::printf("converged in %lld iterations; %ld bilinear cells; wrote %s\n", g.iterations,
                green, map_out.c_str());
    return 0;
  }
  if (fol->parsed()) {
    const BoundaryData bd = BoundaryData::parse(family);
    BuildParams bp;
    bp.window = window;
    const FoliationSpec spec = build_foliation_auto(bd, bp);
    std::ofstream out(fol_out, std::ios::binary);
    if (!out) throw Error("cannot open " + fol_out);
    spec.save(out);
    std::printf("regime %s; %zu figures; wrote %s\n", to_string(spec.regime()).c_str(),
                spec.figures().size(), fol_out.c_str());
    return 0;
  }
  if (ev->parsed()) {
    const BoundaryData bd = BoundaryData::parse(family);
    BuildParams bp;
    bp.window = window;
    const FoliationSpec spec = build_foliation_auto(bd, bp);
    const double v = side == "sigma" ? spec.eval_V(x1, x2) : spec.eval_B(x1, x2);
    std::printf("%.12g\n", v);
    return 0;
  }
  if (ver->parsed()) {
    SuiteConfig cfg;
    cfg.family = family;
    cfg.seed = seed;
    cfg.N = N;
    cfg.M = M;
    cfg.tol = tol;
    cfg.thresh = thresh;
    cfg.window = window;
    cfg.depth = depth;
    cfg.trials = trials;
    cfg.with_lattice = !no_lattice;
    cfg.with_martingale = !no_martingale;
    const auto reports = run_suite(cfg);
    std::ofstream out(report_out, std::ios::binary);
    if (!out) throw Error("cannot open " + report_out);
    write_report(out, cfg, reports);
    bool all = true;
    for (const auto& r : reports) {
      std::printf("%-22s %s  max_residual=%.3e (tol %.1e)  [%.2fs]\n", r.name.c_str(),
                  r.pass ? "PASS" : "FAIL", r.max_residual, r.tolerance, r.runtime_sec);
      all = all && r.pass;
    }
    std::printf("report written to %s\n", report_out.c_str());
    return all ? 0 : 1;
  }
  if (sim->parsed()) {
    const BoundaryData bd = BoundaryData::parse(family);
    const SearchResult sr = search_lower_bound(
        bd, x1, x2, depth, trials, mode == "V" ? TransformMode::V : TransformMode::U, seed);
    std::printf("best payoff %.12g over %ld trials\n", sr.best_payoff, sr.trials_run);
    if (!tree_out.empty()) {
      std::ofstream out(tree_out, std::ios::binary);
      if (!out) throw Error("cannot open " + tree_out);
      sr.best_tree.save(out);
      std::printf("tree written to %s\n", tree_out.c_str());
    }
    return 0;
  }
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const bellman::ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    std::fprintf(stderr,
                 "family grammar: exp:<l>  negexp:<l>  pmom:<p>  poly5:<c>  quad  table:<path>\n");
    return 2;
  } catch (const bellman::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
