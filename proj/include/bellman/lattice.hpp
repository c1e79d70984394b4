#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bellman/boundary.hpp"

namespace bellman {

/// Discrete grid on {(m,n): |n| <= N, |m| <= M*N}; boundary rows |n| = N are
/// frozen at f(m/N). Values are stored row-major, row n = -N first.
struct LatticeGrid {
  int N = 0, M = 0;
  std::vector<double> values;
  long long iterations = 0;
  std::vector<double> sup_delta_history;

  int width() const { return 2 * M * N + 1; }
  int height() const { return 2 * N + 1; }
  std::size_t idx(int m, int n) const {
    return std::size_t(n + N) * std::size_t(width()) + std::size_t(m + M * N);
  }
  double at(int m, int n) const { return values[idx(m, n)]; }
  double& at(int m, int n) { return values[idx(m, n)]; }
};

/// G0: interior rows at min f over [-M, M] (dense scan), boundary rows f(m/N).
LatticeGrid init_lattice(const BoundaryData& bd, int N, int M);

/// One Jacobi sweep: every interior cell gets max(current, diagonal average,
/// anti-diagonal average); pairs with a missing horizontal neighbour are
/// dropped from the max. Returns the sup of pointwise increases. `out` is
/// resized/overwritten; result is a pure function of `in`.
double iterate_step_serial(const LatticeGrid& in, LatticeGrid& out);

/// OpenMP version of the same map; bit-identical to iterate_step_serial.
double iterate_step(const LatticeGrid& in, LatticeGrid& out);

enum class Sweep { Jacobi, GaussSeidel };

struct LatticeParams {
  long long max_iters = 10'000'000;
  Sweep sweep = Sweep::Jacobi;
  bool parallel = true;
  bool record_history = true;
};

/// Iterates until the sup increase drops to tol. Throws ConvergenceError past
/// the iteration cap. Gauss-Seidel sweeps in place (may change the iteration
/// count, not the fixed point).
LatticeGrid solve_lattice(const BoundaryData& bd, int N, int M, double tol,
                          const LatticeParams& p = {});

enum class CellClass : std::uint8_t { Unclassified = 0, Bilinear, DiagAffine, AntiDiagAffine };

/// Per-cell flatness of the converged grid: D1/D2 are the absolute deviations
/// from the diagonal and anti-diagonal averages; both below the threshold
/// marks a bilinearity cell (green), one below marks the affine direction.
struct FlatnessMap {
  int N = 0, M = 0;
  std::vector<double> d1, d2;
  std::vector<CellClass> cls;

  int width() const { return 2 * M * N + 1; }
  int height() const { return 2 * N + 1; }
  std::size_t idx(int m, int n) const {
    return std::size_t(n + N) * std::size_t(width()) + std::size_t(m + M * N);
  }
  CellClass at(int m, int n) const { return cls[idx(m, n)]; }
};

FlatnessMap classify_flatness(const LatticeGrid& g, double thresh);

/// CSV "m,n,value"; '#'-prefixed header records N, M, tol, iterations, family.
void export_grid_csv(const LatticeGrid& g, const std::string& path,
                     const std::string& family_spec, double tol);

/// Binary P6, width 2MN+1, height 2N+1, row n=+N first. Green (0,200,0),
/// red (220,0,0), blue (0,0,220), white unclassified.
void export_map_ppm(const FlatnessMap& fm, const std::string& path);

}  // namespace bellman
