// Compares the serial reference sweep against the OpenMP kernel, and the
// martingale search throughput per thread count.
#include <chrono>
#include <cstdio>

#include "bellman/lattice.hpp"
#include "bellman/martingale.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using clk = std::chrono::steady_clock;

static double secs(clk::time_point a, clk::time_point b) {
  return std::chrono::duration<double>(b - a).count();
}

int main() {
  using namespace bellman;
  const BoundaryData bd = BoundaryData::poly5(2.0);

  for (int N : {30, 60}) {
    const int M = 10;
    LatticeGrid g = init_lattice(bd, N, M);
    LatticeGrid out = g;
    const int iters = N == 30 ? 400 : 100;
    const double cells = double(g.width()) * double(g.height());

    auto t0 = clk::now();
    for (int i = 0; i < iters; ++i) {
      iterate_step_serial(g, out);
      std::swap(g.values, out.values);
    }
    auto t1 = clk::now();
    const double ts = secs(t0, t1);

    g = init_lattice(bd, N, M);
    auto t2 = clk::now();
    for (int i = 0; i < iters; ++i) {
      iterate_step(g, out);
      std::swap(g.values, out.values);
    }
    auto t3 = clk::now();
    const double tp = secs(t2, t3);

    std::printf("lattice N=%2d M=%d  serial %7.1f Mcells/s   omp %7.1f Mcells/s   speedup %.2fx\n",
                N, M, cells * iters / ts / 1e6, cells * iters / tp / 1e6, ts / tp);
  }

  {
    const long trials = 4000;
    auto t0 = clk::now();
    SearchParams sp;
    sp.use_dp_seed = false;
    const SearchResult r =
        search_lower_bound(bd, 0.0, 0.0, 10, trials, TransformMode::V, 42, sp);
    auto t1 = clk::now();
    std::printf("martingale search: %ld trials in %.2fs (%.0f trials/s), best %.6f\n", trials,
                secs(t0, t1), trials / secs(t0, t1), r.best_payoff);
  }

#ifdef _OPENMP
  std::printf("threads available: %d\n", omp_get_max_threads());
#endif
  return 0;
}
