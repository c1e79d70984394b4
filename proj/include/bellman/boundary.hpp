#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "bellman/interp.hpp"

namespace bellman {

enum class Family { Exp, NegExp, PMoment, Poly5, Quad, Table };

/// Boundary cost function f with analytic derivatives. Analytic families are
/// exact; tabulated data evaluates through a shape-preserving cubic.
///
/// CLI/config grammar: exp:<lambda>, negexp:<lambda>, pmom:<p>, poly5:<c>,
/// quad, table:<path> (two-column CSV t,f).
class BoundaryData {
 public:
  static BoundaryData exponential(double lambda);      // e^{lambda t}, 0 < lambda < 1
  static BoundaryData neg_exponential(double lambda);  // -e^{lambda t}, 0 < lambda < 1
  static BoundaryData p_moment(double p);              // |t|^p, p >= 1
  static BoundaryData poly5(double c);                 // t^5/60 - c t^3/6
  static BoundaryData quad();                          // t^2
  static BoundaryData table(std::vector<double> t, std::vector<double> v);
  static BoundaryData table_from_csv(const std::string& path);
  static BoundaryData parse(const std::string& spec);

  Family family() const { return family_; }
  double param() const { return param_; }

  double f(double t) const;
  double f1(double t) const;
  double f2(double t) const;

  double domain_lo() const { return dom_lo_; }
  double domain_hi() const { return dom_hi_; }

  /// True when f(-t) == f(t) for the family (sampled for tables).
  bool mirror_symmetric() const;

  /// Canonical spec string, e.g. "exp:0.5".
  std::string spec_string() const;

 private:
  BoundaryData(Family fam, double param) : family_(fam), param_(param) {}
  void check_domain(double t) const;

  Family family_;
  double param_ = 0.0;
  double dom_lo_ = -std::numeric_limits<double>::infinity();
  double dom_hi_ = std::numeric_limits<double>::infinity();
  std::optional<Pchip> tab_;
  std::string table_path_;
};

}  // namespace bellman
