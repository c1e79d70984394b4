#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "bellman/boundary.hpp"

namespace bellman {

enum class TransformMode { V, U };

/// Finite binary tree of a transform pair (psi, phi). Each internal node
/// carries the predictable multiplier alpha shared by its two child edges;
/// increments obey d(psi) = alpha * d(phi). V-mode trees end with |phi| = 1
/// at every leaf and |alpha| = 1 on every edge; U-mode allows alpha in [-1,1]
/// and any |phi| <= 1 at the leaves.
struct MartingaleTree {
  struct Node {
    double psi = 0, phi = 0, prob = 1;
    double alpha = 1;      // multiplier for the split below this node
    int left = -1, right = -1;
  };

  TransformMode mode = TransformMode::V;
  double x1 = 0, x2 = 0;  // root (psi0, phi0)
  int depth = 0;
  std::vector<Node> nodes;  // nodes[0] is the root

  bool leaf(int i) const { return nodes[i].left < 0; }

  /// Checks the martingale property, transform rule, probability flow and the
  /// mode's constraints; throws DomainError on violation.
  void validate() const;

  void save(std::ostream& os) const;
};

/// Expected payoff sum_leaves p * f(psi).
double payoff(const MartingaleTree& tree, const BoundaryData& bd);

/// |E psi^2 - (x1^2 + 1 - x2^2)| for V-mode trees (zero up to rounding).
double check_variance_identity(const MartingaleTree& tree);

struct SearchParams {
  bool use_dp_seed = true;   // envelope dynamic program seed (depth >= 4)
  double dp_grid = 0.01;
  int ascent_rounds = 2;
  int top_candidates = 3;
};

struct SearchResult {
  double best_payoff = 0;
  MartingaleTree best_tree;
  long trials_run = 0;
};

/// Lower-bound search: randomized structured trials plus coordinate ascent,
/// with the martingale invariants as hard constraints. Deterministic given
/// the seed, independent of the parallel schedule.
SearchResult search_lower_bound(const BoundaryData& bd, double x1, double x2, int depth,
                                long trials, TransformMode mode, std::uint64_t seed,
                                const SearchParams& p = {});

}  // namespace bellman
