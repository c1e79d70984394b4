#include "bellman/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "bellman/errors.hpp"

namespace bellman {

LatticeGrid init_lattice(const BoundaryData& bd, int N, int M) {
  if (N < 1 || M < 1) throw DomainError("lattice requires N >= 1 and M >= 1");
  LatticeGrid g;
  g.N = N;
  g.M = M;
  g.values.assign(std::size_t(g.width()) * std::size_t(g.height()), 0.0);

  const double lo = std::max(-double(M), bd.domain_lo());
  const double hi = std::min(double(M), bd.domain_hi());
  double fmin = bd.f(lo);
  const int scan = int(std::ceil((hi - lo) / 1e-3));
  for (int i = 1; i <= scan; ++i) {
    const double t = lo + (hi - lo) * double(i) / double(scan);
    fmin = std::min(fmin, bd.f(t));
  }

  for (int n = -N; n <= N; ++n)
    for (int m = -M * N; m <= M * N; ++m)
      g.at(m, n) = (std::abs(n) == N) ? bd.f(double(m) / double(N)) : fmin;
  return g;
}

namespace {

// one Jacobi row; returns the row's sup increase
inline double sweep_row(const LatticeGrid& in, LatticeGrid& out, int n) {
  const int N = in.N, MN = in.M * in.N;
  double supd = 0.0;
  const double* prev = in.values.data();
  double* next = out.values.data();
  const std::size_t W = std::size_t(in.width());
  const std::size_t row = std::size_t(n + N) * W;
  const std::size_t up = row + W, dn = row - W;
  for (int m = -MN + 1; m <= MN - 1; ++m) {
    const std::size_t j = std::size_t(m + MN);
    const double cur = prev[row + j];
    const double d1 = 0.5 * (prev[up + j + 1] + prev[dn + j - 1]);
    const double d2 = 0.5 * (prev[dn + j + 1] + prev[up + j - 1]);
    const double v = std::max(cur, std::max(d1, d2));
    next[row + j] = v;
    supd = std::max(supd, v - cur);
  }
  // edge columns have no admissible pairs; copy through
  next[row] = prev[row];
  next[row + W - 1] = prev[row + W - 1];
  return supd;
}

}  // namespace

double iterate_step_serial(const LatticeGrid& in, LatticeGrid& out) {
  out.N = in.N;
  out.M = in.M;
  out.values.resize(in.values.size());
  const int N = in.N, MN = in.M * in.N;
  // boundary rows are frozen
  std::copy_n(in.values.begin(), std::size_t(2 * MN + 1), out.values.begin());
  std::copy_n(in.values.end() - (2 * MN + 1), std::size_t(2 * MN + 1),
              out.values.end() - (2 * MN + 1));
  double supd = 0.0;
  for (int n = -N + 1; n <= N - 1; ++n) supd = std::max(supd, sweep_row(in, out, n));
  return supd;
}

double iterate_step(const LatticeGrid& in, LatticeGrid& out) {
  out.N = in.N;
  out.M = in.M;
  out.values.resize(in.values.size());
  const int N = in.N, MN = in.M * in.N;
  std::copy_n(in.values.begin(), std::size_t(2 * MN + 1), out.values.begin());
  std::copy_n(in.values.end() - (2 * MN + 1), std::size_t(2 * MN + 1),
              out.values.end() - (2 * MN + 1));
  double supd = 0.0;
#pragma omp parallel for schedule(static) reduction(max : supd)
  for (int n = -N + 1; n <= N - 1; ++n) supd = std::max(supd, sweep_row(in, out, n));
  return supd;
}

namespace {

double gauss_seidel_sweep(LatticeGrid& g) {
  const int N = g.N, MN = g.M * g.N;
  double supd = 0.0;
  for (int n = -N + 1; n <= N - 1; ++n)
    for (int m = -MN + 1; m <= MN - 1; ++m) {
      const double cur = g.at(m, n);
      const double d1 = 0.5 * (g.at(m + 1, n + 1) + g.at(m - 1, n - 1));
      const double d2 = 0.5 * (g.at(m + 1, n - 1) + g.at(m - 1, n + 1));
      const double v = std::max(cur, std::max(d1, d2));
      g.at(m, n) = v;
      supd = std::max(supd, v - cur);
    }
  return supd;
}

}  // namespace

LatticeGrid solve_lattice(const BoundaryData& bd, int N, int M, double tol,
                          const LatticeParams& p) {
  LatticeGrid g = init_lattice(bd, N, M);
  LatticeGrid scratch = g;
  long long k = 0;
  while (true) {
    ++k;
    double supd;
    if (p.sweep == Sweep::GaussSeidel) {
      supd = gauss_seidel_sweep(g);
    } else {
      supd = p.parallel ? iterate_step(g, scratch) : iterate_step_serial(g, scratch);
      std::swap(g.values, scratch.values);
    }
    if (p.record_history) g.sup_delta_history.push_back(supd);
    if (supd <= tol) break;
    if (k >= p.max_iters)
      throw ConvergenceError("lattice iteration cap exceeded", supd);
  }
  g.iterations = k;
  return g;
}

FlatnessMap classify_flatness(const LatticeGrid& g, double thresh) {
  FlatnessMap fm;
  fm.N = g.N;
  fm.M = g.M;
  const std::size_t total = g.values.size();
  fm.d1.assign(total, 0.0);
  fm.d2.assign(total, 0.0);
  fm.cls.assign(total, CellClass::Unclassified);
  const int N = g.N, MN = g.M * g.N;
  for (int n = -N + 1; n <= N - 1; ++n)
    for (int m = -MN + 1; m <= MN - 1; ++m) {
      const double v = g.at(m, n);
      const double d1 = std::fabs(v - 0.5 * (g.at(m + 1, n + 1) + g.at(m - 1, n - 1)));
      const double d2 = std::fabs(v - 0.5 * (g.at(m + 1, n - 1) + g.at(m - 1, n + 1)));
      const std::size_t i = g.idx(m, n);
      fm.d1[i] = d1;
      fm.d2[i] = d2;
      if (d1 < thresh && d2 < thresh)
        fm.cls[i] = CellClass::Bilinear;
      else if (d1 < thresh)
        fm.cls[i] = CellClass::DiagAffine;
      else if (d2 < thresh)
        fm.cls[i] = CellClass::AntiDiagAffine;
    }
  return fm;
}

void export_grid_csv(const LatticeGrid& g, const std::string& path,
                     const std::string& family_spec, double tol) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path + " for writing");
  char buf[64];
  out << "# N " << g.N << "\n# M " << g.M << "\n";
  snprintf(buf, sizeof buf, "%.17g", tol);
  out << "# tol " << buf << "\n";
  out << "# iterations " << g.iterations << "\n";
  out << "# family " << family_spec << "\n";
  out << "m,n,value\n";
  for (int n = -g.N; n <= g.N; ++n)
    for (int m = -g.M * g.N; m <= g.M * g.N; ++m) {
      snprintf(buf, sizeof buf, "%.17g", g.at(m, n));
      out << m << ',' << n << ',' << buf << '\n';
    }
}

void export_map_ppm(const FlatnessMap& fm, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path + " for writing");
  out << "P6\n" << fm.width() << ' ' << fm.height() << "\n255\n";
  std::vector<unsigned char> row(std::size_t(fm.width()) * 3);
  for (int n = fm.N; n >= -fm.N; --n) {
    std::size_t k = 0;
    for (int m = -fm.M * fm.N; m <= fm.M * fm.N; ++m) {
      unsigned char r = 255, g = 255, b = 255;
      switch (fm.at(m, n)) {
        case CellClass::Bilinear: r = 0; g = 200; b = 0; break;
        case CellClass::DiagAffine: r = 220; g = 0; b = 0; break;
        case CellClass::AntiDiagAffine: r = 0; g = 0; b = 220; break;
        case CellClass::Unclassified: break;
      }
      row[k++] = r;
      row[k++] = g;
      row[k++] = b;
    }
    out.write(reinterpret_cast<const char*>(row.data()), std::streamsize(row.size()));
  }
}

}  // namespace bellman
