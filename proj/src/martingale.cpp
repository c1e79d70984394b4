#include "bellman/martingale.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "bellman/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace bellman {

namespace {

// --- deterministic RNG (splitmix64), independent of the standard library ----
struct Rng {
  std::uint64_t s;
  explicit Rng(std::uint64_t seed) : s(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (s += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  double uniform() { return double(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int pick(int n) { return int(next() % std::uint64_t(n)); }
};

std::uint64_t trial_seed(std::uint64_t seed, long trial) {
  Rng mix(seed ^ (0x9e3779b97f4a7c15ull * std::uint64_t(trial + 1)));
  mix.next();
  return mix.next();
}

// --- policy tree: absolute split targets, states derived on materialize -----
struct PNode {
  double alpha = 1.0;
  double phiL = -1.0, phiR = 1.0;
  int left = -1, right = -1;  // leaf when left < 0
};

struct PTree {
  TransformMode mode = TransformMode::V;
  double x1 = 0, x2 = 0;
  int depth = 0;
  std::vector<PNode> nodes;
};

struct EvalState {
  double psi, phi, prob;
};

// walks the policy tree accumulating sum p*f(psi) over leaves; returns false
// when a split ordering constraint is violated
bool eval_ptree(const PTree& t, const BoundaryData& bd, double& out) {
  if (t.nodes.empty()) return false;
  long double acc = 0.0L;
  std::vector<std::pair<int, EvalState>> stack;
  stack.push_back({0, {t.x1, t.x2, 1.0}});
  while (!stack.empty()) {
    auto [i, st] = stack.back();
    stack.pop_back();
    const PNode& nd = t.nodes[i];
    if (nd.left < 0) {
      if (t.mode == TransformMode::V && std::fabs(st.phi) != 1.0) return false;
      acc += (long double)st.prob * bd.f(st.psi);
      continue;
    }
    if (!(nd.phiL < st.phi && st.phi < nd.phiR)) return false;
    if (nd.phiL < -1.0 || nd.phiR > 1.0) return false;
    const double q = (nd.phiR - st.phi) / (nd.phiR - nd.phiL);
    stack.push_back({nd.right, {st.psi + nd.alpha * (nd.phiR - st.phi), nd.phiR,
                                st.prob * (1.0 - q)}});
    stack.push_back({nd.left, {st.psi + nd.alpha * (nd.phiL - st.phi), nd.phiL,
                               st.prob * q}});
  }
  out = double(acc);
  return true;
}

// subtree payoff given the state at its root (for incremental ascent)
bool eval_subtree(const PTree& t, const BoundaryData& bd, int root, EvalState st, double& out) {
  long double acc = 0.0L;
  std::vector<std::pair<int, EvalState>> stack{{root, st}};
  while (!stack.empty()) {
    auto [i, s] = stack.back();
    stack.pop_back();
    const PNode& nd = t.nodes[i];
    if (nd.left < 0) {
      if (t.mode == TransformMode::V && std::fabs(s.phi) != 1.0) return false;
      acc += (long double)s.prob * bd.f(s.psi);
      continue;
    }
    if (!(nd.phiL < s.phi && s.phi < nd.phiR)) return false;
    const double q = (nd.phiR - s.phi) / (nd.phiR - nd.phiL);
    stack.push_back({nd.right, {s.psi + nd.alpha * (nd.phiR - s.phi), nd.phiR, s.prob * (1 - q)}});
    stack.push_back({nd.left, {s.psi + nd.alpha * (nd.phiL - s.phi), nd.phiL, s.prob * q}});
  }
  out = double(acc);
  return true;
}

MartingaleTree materialize(const PTree& t) {
  MartingaleTree out;
  out.mode = t.mode;
  out.x1 = t.x1;
  out.x2 = t.x2;
  out.depth = t.depth;
  out.nodes.reserve(t.nodes.size());
  // preorder copy with states
  struct Item {
    int src;
    EvalState st;
    int parent;
    bool right;
  };
  std::vector<Item> stack{{0, {t.x1, t.x2, 1.0}, -1, false}};
  while (!stack.empty()) {
    Item it = stack.back();
    stack.pop_back();
    const PNode& nd = t.nodes[it.src];
    MartingaleTree::Node mn;
    mn.psi = it.st.psi;
    mn.phi = it.st.phi;
    mn.prob = it.st.prob;
    mn.alpha = nd.alpha;
    const int self = int(out.nodes.size());
    out.nodes.push_back(mn);
    if (it.parent >= 0)
      (it.right ? out.nodes[it.parent].right : out.nodes[it.parent].left) = self;
    if (nd.left >= 0) {
      const double q = (nd.phiR - it.st.phi) / (nd.phiR - nd.phiL);
      stack.push_back({nd.right,
                       {it.st.psi + nd.alpha * (nd.phiR - it.st.phi), nd.phiR,
                        it.st.prob * (1 - q)},
                       self, true});
      stack.push_back({nd.left,
                       {it.st.psi + nd.alpha * (nd.phiL - it.st.phi), nd.phiL, it.st.prob * q},
                       self, false});
    }
  }
  return out;
}

// --- structured trial: spine walk along the foliation direction -------------
// From a midline state the walk absorbs one side at phi = dir and leaks a
// short step the other way; two levels advance the drift by 2*delta.
int make_leaf(PTree& t) {
  t.nodes.push_back(PNode{});
  return int(t.nodes.size()) - 1;
}

int make_split(PTree& t, double alpha, double phiL, double phiR, int left, int right) {
  PNode nd;
  nd.alpha = alpha;
  nd.phiL = phiL;
  nd.phiR = phiR;
  nd.left = left;
  nd.right = right;
  t.nodes.push_back(nd);
  return int(t.nodes.size()) - 1;
}

int spine_chain(PTree& t, int level, double phi, double dir, const std::vector<double>& deltas,
                int depth) {
  if (level >= depth || std::fabs(phi) >= 1.0) return make_leaf(t);
  if (level == depth - 1) {
    const int l = make_leaf(t), r = make_leaf(t);
    return make_split(t, -dir, -1.0, 1.0, l, r);
  }
  const double d = std::clamp(deltas[std::min<std::size_t>(level, deltas.size() - 1)], 0.01, 0.95);
  if (phi == 0.0) {
    // peak: absorb at +dir, leak a short step towards -dir
    if (dir > 0) {
      const int l = spine_chain(t, level + 1, -d, dir, deltas, depth);
      const int r = make_leaf(t);
      return make_split(t, -dir, -d, 1.0, l, r);
    }
    const int l = make_leaf(t);
    const int r = spine_chain(t, level + 1, d, dir, deltas, depth);
    return make_split(t, -dir, -1.0, d, l, r);
  }
  // leg: absorb at -dir, return to the midline
  if (dir > 0) {
    const int l = make_leaf(t);
    const int r = spine_chain(t, level + 1, 0.0, dir, deltas, depth);
    return make_split(t, dir, -1.0, 0.0, l, r);
  }
  const int l = spine_chain(t, level + 1, 0.0, dir, deltas, depth);
  const int r = make_leaf(t);
  return make_split(t, dir, 0.0, 1.0, l, r);
}

// root split placed last; children are built first, so indices stay valid
PTree make_spine(double x1, double x2, int depth, const std::vector<double>& deltas, double dir,
                 bool square_entry) {
  PTree t;
  t.mode = TransformMode::V;
  t.x1 = x1;
  t.x2 = x2;
  t.depth = depth;
  if (std::fabs(x2) >= 1.0) {
    make_leaf(t);
    std::swap(t.nodes.front(), t.nodes.back());
    return t;
  }
  int root;
  if (square_entry && depth >= 3 && x2 == 0.0) {
    // symmetric entry through the central bilinear region into both fans
    const int a1 = make_leaf(t);  // (x1, -1)
    const int s1 = spine_chain(t, 2, 0.0, -1.0, deltas, depth);
    const int lo = make_split(t, -1.0, -1.0, 0.0, a1, s1);  // from (x1-1/2, -1/2)
    const int s2 = spine_chain(t, 2, 0.0, +1.0, deltas, depth);
    const int a2 = make_leaf(t);  // (x1, +1)
    const int hi = make_split(t, -1.0, 0.0, 1.0, s2, a2);  // from (x1+1/2, +1/2)
    root = make_split(t, 1.0, -0.5, 0.5, lo, hi);
  } else if (x2 != 0.0) {
    // normalize to the midline, absorbing on the near side
    if (x2 > 0) {
      const int c = spine_chain(t, 1, 0.0, dir, deltas, depth);
      const int a = make_leaf(t);
      root = make_split(t, -dir, 0.0, 1.0, c, a);
    } else {
      const int a = make_leaf(t);
      const int c = spine_chain(t, 1, 0.0, dir, deltas, depth);
      root = make_split(t, -dir, -1.0, 0.0, a, c);
    }
  } else {
    root = spine_chain(t, 0, 0.0, dir, deltas, depth);
  }
  // move the root to slot 0
  if (root != 0) {
    std::swap(t.nodes[0], t.nodes[root]);
    for (auto& nd : t.nodes) {
      if (nd.left == 0)
        nd.left = root;
      else if (nd.left == root)
        nd.left = 0;
      if (nd.right == 0)
        nd.right = root;
      else if (nd.right == root)
        nd.right = 0;
    }
  }
  return t;
}

// --- random trial ------------------------------------------------------------
int random_subtree(PTree& t, Rng& rng, int level, double phi, int depth, TransformMode mode) {
  const int self = int(t.nodes.size());
  t.nodes.push_back(PNode{});
  const bool absorbed = std::fabs(phi) >= 1.0;
  const bool can_stop = mode == TransformMode::U;
  if (level >= depth || absorbed || (can_stop && rng.uniform() < 0.25)) {
    t.nodes[self].left = -1;
    return self;
  }
  PNode nd;
  nd.alpha = mode == TransformMode::V ? (rng.uniform() < 0.5 ? 1.0 : -1.0)
                                      : rng.uniform(-1.0, 1.0);
  const bool last = level == depth - 1 && mode == TransformMode::V;
  if (last) {
    nd.phiL = -1.0;
    nd.phiR = 1.0;
  } else {
    nd.phiL = rng.uniform() < 0.5 ? -1.0 : rng.uniform(-1.0, phi - 1e-6);
    nd.phiR = rng.uniform() < 0.5 ? 1.0 : rng.uniform(phi + 1e-6, 1.0);
    if (!(nd.phiL < phi && phi < nd.phiR)) {
      nd.phiL = -1.0;
      nd.phiR = 1.0;
    }
  }
  t.nodes[self] = nd;
  const int l = random_subtree(t, rng, level + 1, nd.phiL, depth, mode);
  const int r = random_subtree(t, rng, level + 1, nd.phiR, depth, mode);
  t.nodes[self].left = l;
  t.nodes[self].right = r;
  return self;
}

PTree make_random(double x1, double x2, int depth, TransformMode mode, Rng& rng) {
  PTree t;
  t.mode = mode;
  t.x1 = x1;
  t.x2 = x2;
  t.depth = depth;
  random_subtree(t, rng, 0, x2, depth, mode);
  return t;
}

// --- envelope dynamic program seed (V-mode) ----------------------------------
struct DpTables {
  int nphi = 0, npsi = 0, depth = 0;
  double h = 0.01, psi_lo = 0, x1 = 0;
  std::vector<std::vector<float>> W;  // per remaining level
};

void dp_envelope_line(const float* y, int n, float* env) {
  // upper concave envelope on equally spaced abscissae, -inf entries skipped
  static thread_local std::vector<int> hull;
  hull.clear();
  for (int i = 0; i < n; ++i) {
    if (y[i] == -std::numeric_limits<float>::infinity()) continue;
    while (hull.size() >= 2) {
      const int i1 = hull[hull.size() - 2], i2 = hull.back();
      if ((double(y[i2]) - y[i1]) * (i - i2) <= (double(y[i]) - y[i2]) * (i2 - i1))
        hull.pop_back();
      else
        break;
    }
    hull.push_back(i);
  }
  for (int i = 0; i < n; ++i) env[i] = -std::numeric_limits<float>::infinity();
  if (hull.empty()) return;
  int k = 0;
  for (int i = hull.front(); i <= hull.back(); ++i) {
    while (k + 1 < int(hull.size()) && hull[k + 1] <= i) ++k;
    if (hull[k] == i)
      env[i] = y[i];
    else {
      const int i1 = hull[k], i2 = hull[k + 1];
      env[i] = float(y[i1] + (double(y[i2]) - y[i1]) * (i - i1) / (i2 - i1));
    }
  }
}

DpTables dp_compute(const BoundaryData& bd, double x1, int depth, double h) {
  DpTables dp;
  dp.depth = depth;
  dp.h = h;
  dp.x1 = x1;
  dp.nphi = int(std::lround(2.0 / h)) + 1;
  const double span = depth + 2.0;
  const int half = int(std::ceil(span / h));
  dp.npsi = 2 * half + 1;
  dp.psi_lo = x1 - h * half;
  const float ninf = -std::numeric_limits<float>::infinity();
  dp.W.assign(depth + 1, std::vector<float>(std::size_t(dp.nphi) * dp.npsi, ninf));

  auto base = [&](std::vector<float>& W) {
    for (int i = 0; i < dp.npsi; ++i) {
      const double psi = dp.psi_lo + h * i;
      W[std::size_t(i) * dp.nphi + 0] = float(bd.f(psi));
      W[std::size_t(i) * dp.nphi + (dp.nphi - 1)] = float(bd.f(psi));
    }
  };
  base(dp.W[0]);

  std::vector<float> line(dp.nphi), env(dp.nphi);
  for (int l = 1; l <= depth; ++l) {
    const std::vector<float>& Wp = dp.W[l - 1];
    std::vector<float>& Wn = dp.W[l];
    base(Wn);
    for (int al = 0; al < 2; ++al) {
      const int sign = al == 0 ? 1 : -1;
      // lines: psi-index = start + sign * phi-index
      for (int start = -dp.nphi + 1; start < dp.npsi + dp.nphi; ++start) {
        int cnt = 0;
        static thread_local std::vector<int> is, js;
        is.clear();
        js.clear();
        for (int j = 0; j < dp.nphi; ++j) {
          const int i = start + sign * j;
          if (i < 0 || i >= dp.npsi) continue;
          is.push_back(i);
          js.push_back(j);
          line[cnt++] = Wp[std::size_t(i) * dp.nphi + j];
        }
        if (cnt < 2) continue;
        dp_envelope_line(line.data(), cnt, env.data());
        for (int k = 0; k < cnt; ++k) {
          float& w = Wn[std::size_t(is[k]) * dp.nphi + js[k]];
          if (env[k] > w) w = env[k];
        }
      }
    }
  }
  return dp;
}

struct DpExtract {
  const DpTables& dp;
  PTree tree;
  bool overflow = false;

  int state_index_psi(double psi) const {
    return int(std::lround((psi - dp.psi_lo) / dp.h));
  }

  int build(double psi, double phi, int level) {
    const int self = int(tree.nodes.size());
    if (self > 200000) {
      overflow = true;
      return -1;
    }
    tree.nodes.push_back(PNode{});
    if (std::fabs(phi) >= 1.0 || level <= 0) {
      tree.nodes[self].left = -1;
      return self;
    }
    const int i = state_index_psi(psi);
    const int j = int(std::lround((phi + 1.0) / dp.h));
    if (i < 0 || i >= dp.npsi) {
      // off the table: close out with a forced absorb split
      tree.nodes[self].alpha = 1.0;
      tree.nodes[self].phiL = -1.0;
      tree.nodes[self].phiR = 1.0;
      const int l = build(psi + (-1.0 - phi), -1.0, 0);
      const int r = build(psi + (1.0 - phi), 1.0, 0);
      tree.nodes[self].left = l;
      tree.nodes[self].right = r;
      return self;
    }
    const std::vector<float>& Wp = dp.W[level - 1];
    double best = -1e300;
    int bj1 = -1, bj2 = -1, bsign = 1;
    static thread_local std::vector<float> y;
    static thread_local std::vector<int> jj;
    for (int al = 0; al < 2; ++al) {
      const int sign = al == 0 ? 1 : -1;
      y.clear();
      jj.clear();
      int tpos = -1;
      for (int j2 = 0; j2 < dp.nphi; ++j2) {
        const int i2 = i + sign * (j2 - j);
        if (i2 < 0 || i2 >= dp.npsi) continue;
        if (j2 == j) tpos = int(y.size());
        y.push_back(Wp[std::size_t(i2) * dp.nphi + j2]);
        jj.push_back(j2);
      }
      if (tpos < 0 || y.size() < 2) continue;
      // concave hull with support localization around tpos
      static thread_local std::vector<int> hull;
      hull.clear();
      for (int k = 0; k < int(y.size()); ++k) {
        if (y[k] == -std::numeric_limits<float>::infinity()) continue;
        while (hull.size() >= 2) {
          const int i1 = hull[hull.size() - 2], i2h = hull.back();
          if ((double(y[i2h]) - y[i1]) * (k - i2h) <= (double(y[k]) - y[i2h]) * (i2h - i1))
            hull.pop_back();
          else
            break;
        }
        hull.push_back(k);
      }
      if (hull.empty() || hull.front() > tpos || hull.back() < tpos) continue;
      int kk = 0;
      while (kk + 1 < int(hull.size()) && hull[kk + 1] <= tpos) ++kk;
      double val;
      int k1, k2;
      if (hull[kk] == tpos) {
        k1 = k2 = tpos;
        val = y[tpos];
      } else {
        k1 = hull[kk];
        k2 = hull[kk + 1];
        val = y[k1] + (double(y[k2]) - y[k1]) * (tpos - k1) / double(k2 - k1);
      }
      if (val > best) {
        best = val;
        bsign = sign;
        bj1 = jj[k1];
        bj2 = jj[k2];
      }
    }
    if (bj1 < 0 || (bj1 == bj2)) {
      // no profitable split at this state: finish with a forced absorb split
      tree.nodes[self].alpha = 1.0;
      tree.nodes[self].phiL = -1.0;
      tree.nodes[self].phiR = 1.0;
      const int l = build(psi + (-1.0 - phi), -1.0, level - 1);
      const int r = build(psi + (1.0 - phi), 1.0, level - 1);
      tree.nodes[self].left = l;
      tree.nodes[self].right = r;
      return self;
    }
    double phiL = -1.0 + dp.h * bj1;
    double phiR = -1.0 + dp.h * bj2;
    if (bj1 == 0) phiL = -1.0;
    if (bj2 == dp.nphi - 1) phiR = 1.0;
    tree.nodes[self].alpha = bsign;
    tree.nodes[self].phiL = phiL;
    tree.nodes[self].phiR = phiR;
    const int l = build(psi + bsign * (phiL - phi), phiL, level - 1);
    const int r = build(psi + bsign * (phiR - phi), phiR, level - 1);
    tree.nodes[self].left = l;
    tree.nodes[self].right = r;
    return self;
  }
};

// --- coordinate ascent -------------------------------------------------------
struct SubtreeStates {
  // state at each node for the current parameters; rebuilt per accepted move
  std::vector<EvalState> st;
  bool valid = false;
};

void propagate_states(const PTree& t, SubtreeStates& ss) {
  ss.st.assign(t.nodes.size(), {0, 0, 0});
  ss.valid = true;
  std::vector<int> stack{0};
  ss.st[0] = {t.x1, t.x2, 1.0};
  while (!stack.empty()) {
    const int i = stack.back();
    stack.pop_back();
    const PNode& nd = t.nodes[i];
    const EvalState s = ss.st[i];
    if (nd.left < 0) continue;
    if (!(nd.phiL < s.phi && s.phi < nd.phiR)) {
      ss.valid = false;
      return;
    }
    const double q = (nd.phiR - s.phi) / (nd.phiR - nd.phiL);
    ss.st[nd.left] = {s.psi + nd.alpha * (nd.phiL - s.phi), nd.phiL, s.prob * q};
    ss.st[nd.right] = {s.psi + nd.alpha * (nd.phiR - s.phi), nd.phiR, s.prob * (1 - q)};
    stack.push_back(nd.left);
    stack.push_back(nd.right);
  }
}

double ascend(PTree& t, const BoundaryData& bd, int rounds) {
  double best;
  if (!eval_ptree(t, bd, best)) return -1e300;
  SubtreeStates ss;
  propagate_states(t, ss);
  if (!ss.valid) return best;
  const double steps[] = {0.2, 0.05, 0.01};
  for (int round = 0; round < rounds; ++round) {
    bool improved = false;
    for (std::size_t i = 0; i < t.nodes.size(); ++i) {
      PNode& nd = t.nodes[i];
      if (nd.left < 0) continue;
      const EvalState si = ss.st[i];
      if (si.prob < 1e-9) continue;
      double base_sub;
      if (!eval_subtree(t, bd, int(i), si, base_sub)) continue;
      for (int which = 0; which < 2; ++which) {
        double& target = which == 0 ? nd.phiL : nd.phiR;
        const double saved = target;
        for (double s : steps) {
          for (double sgn : {-1.0, 1.0}) {
            double cand = saved + sgn * s;
            cand = std::clamp(cand, -1.0, 1.0);
            if (which == 0 && !(cand < si.phi)) continue;
            if (which == 1 && !(cand > si.phi)) continue;
            if (which == 0 && nd.left >= 0 && t.nodes[nd.left].left >= 0 &&
                !(t.nodes[nd.left].phiL < cand && cand < t.nodes[nd.left].phiR))
              continue;
            if (which == 1 && nd.right >= 0 && t.nodes[nd.right].left >= 0 &&
                !(t.nodes[nd.right].phiL < cand && cand < t.nodes[nd.right].phiR))
              continue;
            target = cand;
            double sub;
            if (eval_subtree(t, bd, int(i), si, sub) && sub > base_sub + 1e-15) {
              base_sub = sub;
              improved = true;
              goto accepted;
            }
            target = saved;
          }
        }
        continue;
      accepted:
        propagate_states(t, ss);
        if (!ss.valid) {  // should not happen; restore
          target = saved;
          propagate_states(t, ss);
        }
      }
    }
    if (!improved) break;
  }
  double out;
  if (!eval_ptree(t, bd, out)) return best;
  propagate_states(t, ss);
  return out;
}

PTree make_trivial(double x1, double x2, int depth, TransformMode mode) {
  PTree t;
  t.mode = mode;
  t.x1 = x1;
  t.x2 = x2;
  t.depth = depth;
  t.nodes.push_back(PNode{});
  if (mode == TransformMode::V && std::fabs(x2) < 1.0) {
    t.nodes[0].alpha = 1.0;
    t.nodes[0].phiL = -1.0;
    t.nodes[0].phiR = 1.0;
    t.nodes[0].left = 1;
    t.nodes[0].right = 2;
    t.nodes.push_back(PNode{});
    t.nodes.push_back(PNode{});
  }
  return t;
}

}  // namespace

// --- public surface ----------------------------------------------------------

double payoff(const MartingaleTree& tree, const BoundaryData& bd) {
  long double acc = 0.0L;
  for (const auto& nd : tree.nodes)
    if (nd.left < 0) acc += (long double)nd.prob * bd.f(nd.psi);
  return double(acc);
}

double check_variance_identity(const MartingaleTree& tree) {
  if (tree.mode != TransformMode::V)
    throw DomainError("variance identity applies to V-mode trees");
  long double acc = 0.0L;
  for (const auto& nd : tree.nodes)
    if (nd.left < 0) acc += (long double)nd.prob * nd.psi * nd.psi;
  const long double target = (long double)tree.x1 * tree.x1 + 1.0L -
                             (long double)tree.x2 * tree.x2;
  return std::fabs(double(acc - target));
}

void MartingaleTree::validate() const {
  if (nodes.empty()) throw DomainError("empty tree");
  long double leaf_prob = 0.0L;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const Node& nd = nodes[i];
    if (std::fabs(nd.phi) > 1.0 + 1e-12) throw DomainError("|phi| exceeds 1");
    if (nd.left < 0) {
      leaf_prob += nd.prob;
      if (mode == TransformMode::V && std::fabs(std::fabs(nd.phi) - 1.0) > 1e-12)
        throw DomainError("V-mode leaf with |phi| != 1");
      continue;
    }
    const Node& L = nodes[nd.left];
    const Node& R = nodes[nd.right];
    if (mode == TransformMode::V && std::fabs(std::fabs(nd.alpha) - 1.0) > 1e-12)
      throw DomainError("V-mode multiplier must be unimodular");
    if (std::fabs(nd.alpha) > 1.0 + 1e-12) throw DomainError("|alpha| exceeds 1");
    if (std::fabs(L.prob + R.prob - nd.prob) > 1e-12 * std::max(1.0, nd.prob))
      throw DomainError("probability flow broken");
    if (std::fabs(L.prob * L.phi + R.prob * R.phi - nd.prob * nd.phi) > 1e-12)
      throw DomainError("martingale property broken in phi");
    if (std::fabs(L.prob * L.psi + R.prob * R.psi - nd.prob * nd.psi) > 1e-11)
      throw DomainError("martingale property broken in psi");
    if (std::fabs((L.psi - nd.psi) - nd.alpha * (L.phi - nd.phi)) > 1e-12)
      throw DomainError("transform rule broken on left edge");
    if (std::fabs((R.psi - nd.psi) - nd.alpha * (R.phi - nd.phi)) > 1e-12)
      throw DomainError("transform rule broken on right edge");
  }
  if (std::fabs(double(leaf_prob) - 1.0) > 1e-12) throw DomainError("leaf mass != 1");
}

void MartingaleTree::save(std::ostream& os) const {
  os << "martingale-tree/1\n";
  os << "mode " << (mode == TransformMode::V ? 'V' : 'U') << '\n';
  char buf[96];
  snprintf(buf, sizeof buf, "x %.17g %.17g", x1, x2);
  os << buf << "\ndepth " << depth << '\n';
  // preorder with indentation
  struct Item {
    int i, ind;
  };
  std::vector<Item> stack{{0, 0}};
  while (!stack.empty()) {
    auto [i, ind] = stack.back();
    stack.pop_back();
    const Node& nd = nodes[i];
    for (int k = 0; k < ind; ++k) os << ' ';
    snprintf(buf, sizeof buf, "node p=%.17g phi=%.17g psi=%.17g", nd.prob, nd.phi, nd.psi);
    os << buf;
    if (nd.left >= 0) {
      snprintf(buf, sizeof buf, " alpha=%.17g", nd.alpha);
      os << buf;
    }
    os << '\n';
    if (nd.left >= 0) {
      stack.push_back({nd.right, ind + 2});
      stack.push_back({nd.left, ind + 2});
    }
  }
}

SearchResult search_lower_bound(const BoundaryData& bd, double x1, double x2, int depth,
                                long trials, TransformMode mode, std::uint64_t seed,
                                const SearchParams& p) {
  if (std::fabs(x2) > 1.0 + 1e-12) throw DomainError("|x2| must be <= 1");
  if (depth < 1) throw DomainError("depth must be >= 1");

  SearchResult res;
  PTree best = make_trivial(x1, x2, depth, mode);
  double best_pay;
  eval_ptree(best, bd, best_pay);

  if (std::fabs(x2) >= 1.0) {
    // forced constant pair
    res.best_payoff = best_pay;
    res.best_tree = materialize(best);
    res.best_tree.validate();
    res.trials_run = 0;
    return res;
  }

  struct Cand {
    double pay;
    long idx;
    PTree tree;
  };
  std::vector<Cand> top;
  auto offer = [&](double pay, long idx, const PTree& t) {
    top.push_back({pay, idx, t});
    std::sort(top.begin(), top.end(), [](const Cand& a, const Cand& b) {
      if (a.pay != b.pay) return a.pay > b.pay;
      return a.idx < b.idx;
    });
    if (int(top.size()) > p.top_candidates) top.resize(p.top_candidates);
  };

  offer(best_pay, -1, best);

#pragma omp parallel
  {
    std::vector<Cand> local;
#pragma omp for schedule(static) nowait
    for (long i = 0; i < trials; ++i) {
      Rng rng(trial_seed(seed, i));
      PTree t;
      const int kind = int(i % 4);
      if (kind == 0 || kind == 1) {
        const double d = rng.uniform(0.08, 0.6);
        const double dir = (kind == 0) ? 1.0 : -1.0;
        std::vector<double> deltas(std::size_t(std::max(1, depth)), d);
        if (kind == 1 && rng.uniform() < 0.5)
          for (auto& dd : deltas) dd = rng.uniform(0.08, 0.7);
        t = make_spine(x1, x2, depth, deltas, dir, rng.uniform() < 0.5);
        t.mode = mode;
      } else {
        t = make_random(x1, x2, depth, mode, rng);
      }
      double pay;
      if (!eval_ptree(t, bd, pay)) continue;
      local.push_back({pay, i, std::move(t)});
      std::sort(local.begin(), local.end(), [](const Cand& a, const Cand& b) {
        if (a.pay != b.pay) return a.pay > b.pay;
        return a.idx < b.idx;
      });
      if (int(local.size()) > p.top_candidates) local.resize(p.top_candidates);
    }
#pragma omp critical
    for (auto& c : local) offer(c.pay, c.idx, c.tree);
  }
  res.trials_run = trials;

  if (p.use_dp_seed && mode == TransformMode::V && depth >= 4) {
    DpTables dp = dp_compute(bd, x1, depth, p.dp_grid);
    DpExtract ex{dp, {}, false};
    ex.tree.mode = mode;
    ex.tree.x1 = x1;
    ex.tree.x2 = x2;
    ex.tree.depth = depth;
    ex.build(x1, x2, depth);
    if (!ex.overflow) {
      double pay;
      if (eval_ptree(ex.tree, bd, pay)) offer(pay, trials, ex.tree);
    }
  }

  // deterministic polish of the leading candidates
  double final_best = -1e300;
  PTree final_tree;
  long final_idx = 0;
  for (auto& c : top) {
    PTree t = c.tree;
    const double pay = ascend(t, bd, p.ascent_rounds);
    const double use = std::max(pay, c.pay);
    const PTree& chosen = pay >= c.pay ? t : c.tree;
    if (use > final_best || (use == final_best && c.idx < final_idx)) {
      final_best = use;
      final_tree = chosen;
      final_idx = c.idx;
    }
  }

  res.best_payoff = final_best;
  res.best_tree = materialize(final_tree);
  res.best_tree.validate();
  return res;
}

}  // namespace bellman
