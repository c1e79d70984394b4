#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "bellman/foliation.hpp"
#include "bellman/lattice.hpp"

namespace bellman {

struct VerificationReport {
  std::string name;
  std::string params;
  double max_residual = 0;
  double tolerance = 0;
  double locus_x1 = 0, locus_x2 = 0;
  bool pass = false;
  double runtime_sec = 0;  // console metadata; not part of the report file
};

/// Identity between the strip value on the midline and the parabolic-strip
/// value on the free boundary, sampled over [x1_lo, x1_hi].
VerificationReport check_diagonal(const FoliationSpec& spec, double x1_lo, double x1_hi,
                                  double step, double tol = 1e-8);

/// Boundary rows reproduce f.
VerificationReport check_boundary(const FoliationSpec& spec, int samples = 1000,
                                  double tol = 1e-10);

/// Second differences along the two diagonal directions at interior samples.
VerificationReport check_diag_concavity(const FoliationSpec& spec, int samples = 10000,
                                        double h = 1e-3, double tol = 1e-8,
                                        std::uint64_t seed = 1);

/// Second differences along subtangential directions in the parabolic strip.
VerificationReport check_omega_concavity(const FoliationSpec& spec, int samples = 4000,
                                         int directions = 8, double h = 1e-3,
                                         double tol = 1e-8, std::uint64_t seed = 2);

/// C^1 gluing across figure interfaces.
VerificationReport check_c1(const FoliationSpec& spec, double tol = 1e-4);

struct DiscreteCheck {
  VerificationReport one_sided;   // grid <= V + 1e-9 on the window
  VerificationReport two_sided;   // sup |grid - V| on the window
};

/// Compares a converged grid against the closed-form construction on the
/// window |x1| <= window (the side columns are truncated and excluded).
DiscreteCheck check_discrete_vs_closed(const FoliationSpec& spec, const LatticeGrid& g,
                                       double window, double two_sided_tol);

/// V-mode search payoffs never exceed the closed form.
VerificationReport check_martingale_bound(const FoliationSpec& spec, int depth, long trials,
                                          std::uint64_t seed);

/// U-mode search payoffs against the subordination bound
/// sup_{0<=d<=1-x2^2} B(x1, x1^2+d).
VerificationReport check_subordination(const FoliationSpec& spec, int points, int depth,
                                       long trials, std::uint64_t seed);

struct SuiteConfig {
  std::string family = "quad";
  std::uint64_t seed = 1;
  int N = 30, M = 10;
  double tol = 1e-5;
  double thresh = 0.005;
  double window = 16.0;
  double compare_window = 5.0;  // |x1| window for lattice comparisons
  int depth = 10;
  long trials = 2000;
  bool with_lattice = true;
  bool with_martingale = true;
};

/// Runs the named battery for one family; reports come back sorted by name.
std::vector<VerificationReport> run_suite(const SuiteConfig& cfg);

/// Appends the blocks in report/1 format (deterministic byte-wise for a fixed
/// config and seed; runtimes are deliberately omitted).
void write_report(std::ostream& os, const SuiteConfig& cfg,
                  const std::vector<VerificationReport>& reports);

}  // namespace bellman
