#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "bellman/chordal.hpp"
#include "bellman/patches.hpp"
#include "bellman/tangent.hpp"

namespace bellman {

enum class RegimeTag { AllRight, AllLeft, AngleSquare, SymmetricChord, CornerRegime, Custom };

std::string to_string(RegimeTag t);

/// Fan of tangent segments covering u (resp. v) in [lo, hi].
struct TangentFigure {
  TangentSolution m;
  double lo = -kInf, hi = kInf;
};

/// Vertical herringbone over a chordal domain.
struct HerringboneFigure {
  ChordalSolution ch;
};

/// Square in the strip / angle in the parabolic strip, vertex at w.
struct SquareFigure {
  double w = 0;
  BilinearPatch v;
  AffinePatch b;
};

/// Corner in the strip / trolleybus in the parabolic strip over chord (a0,b0).
struct CornerFigure {
  Orientation orient = Orientation::Left;
  double a0 = 0, b0 = 0;
  BilinearPatch v;
  AffinePatch b;
};

using Figure = std::variant<TangentFigure, HerringboneFigure, SquareFigure, CornerFigure>;

/// Interface between two figures, sampled for C^1 checks. Segments are given
/// by endpoints; spines sample the herringbone ridge P(l).
struct Interface {
  std::string name;
  bool spine = false;
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // segment endpoints in the strip
  int figure = -1;                        // herringbone index for spine sampling
};

struct BuildParams {
  double window = 16.0;   // covered |x1| range
  TangentParams tangent;
  CupParams cup;
  double balance_scan_step = 1e-2;
};

/// A C^1 assembly of figures tiling the strip |x2| <= 1 over a finite window
/// (and the corresponding parabolic-strip figures). Immutable once built;
/// evaluation is re-entrant.
class FoliationSpec {
 public:
  FoliationSpec(BoundaryData bd, RegimeTag regime, double win_lo, double win_hi)
      : bd_(std::move(bd)), regime_(regime), win_lo_(win_lo), win_hi_(win_hi) {}

  const BoundaryData& boundary() const { return bd_; }
  RegimeTag regime() const { return regime_; }
  double window_lo() const { return win_lo_; }
  double window_hi() const { return win_hi_; }
  const std::vector<Figure>& figures() const { return figures_; }
  const std::vector<Interface>& interfaces() const { return interfaces_; }

  /// Minimal diagonally concave value on the strip; x must satisfy |x2| <= 1
  /// and lie in the window.
  double eval_V(double x1, double x2) const;

  /// Minimal locally concave value on the parabolic strip y1^2 <= y2 <= y1^2+1.
  double eval_B(double y1, double y2) const;

  void save(std::ostream& os) const;
  static FoliationSpec load(std::istream& is);

  // assembly (used by the builder and by custom figure graphs)
  void add_figure(Figure f) { figures_.push_back(std::move(f)); }
  void add_interface(Interface i) { interfaces_.push_back(std::move(i)); }

 private:
  int locate_strip(double x1, double s) const;   // s = |x2|
  int locate_omega(double y1, double y2) const;

  BoundaryData bd_;
  RegimeTag regime_;
  double win_lo_, win_hi_;
  std::vector<Figure> figures_;
  std::vector<Interface> interfaces_;
};

/// Tries the supported regimes in order (AllRight, AllLeft, AngleSquare,
/// SymmetricChord, CornerRegime) and returns the first whose certificates
/// pass. Throws UnsupportedFoliationError when none applies.
FoliationSpec build_foliation_auto(const BoundaryData& bd, const BuildParams& p = {});

struct GluingReport {
  struct Entry {
    std::string name;
    double max_jump;
    double at_x1, at_x2;
  };
  std::vector<Entry> entries;
  double max_jump = 0;
  double at_x1 = 0, at_x2 = 0;
  bool pass = true;
};

/// Samples one-sided transversal derivatives across every interface and
/// reports the largest jump; passes iff <= tol.
GluingReport check_c1_gluing(const FoliationSpec& spec, double tol = 1e-4,
                             int samples_per_interface = 160, double h = 1e-6);

}  // namespace bellman
