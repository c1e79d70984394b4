#include "bellman/boundary.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "bellman/errors.hpp"

namespace bellman {

BoundaryData BoundaryData::exponential(double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0))
    throw DomainError("exp family requires 0 < lambda < 1 (the value is infinite beyond)");
  return BoundaryData(Family::Exp, lambda);
}

BoundaryData BoundaryData::neg_exponential(double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0))
    throw DomainError("negexp family requires 0 < lambda < 1");
  return BoundaryData(Family::NegExp, lambda);
}

BoundaryData BoundaryData::p_moment(double p) {
  if (!(p >= 1.0)) throw DomainError("pmom family requires p >= 1");
  return BoundaryData(Family::PMoment, p);
}

BoundaryData BoundaryData::poly5(double c) { return BoundaryData(Family::Poly5, c); }

BoundaryData BoundaryData::quad() { return BoundaryData(Family::Quad, 0.0); }

BoundaryData BoundaryData::table(std::vector<double> t, std::vector<double> v) {
  if (t.size() < 4) throw DomainError("table family requires at least 4 samples");
  for (std::size_t i = 0; i + 1 < t.size(); ++i)
    if (!(t[i] < t[i + 1])) throw DomainError("table abscissae must strictly increase");
  BoundaryData bd(Family::Table, 0.0);
  bd.dom_lo_ = t.front();
  bd.dom_hi_ = t.back();
  bd.tab_.emplace(std::move(t), std::move(v));
  return bd;
}

BoundaryData BoundaryData::table_from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open table file: " + path);
  std::vector<double> t, v;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    for (char& ch : line)
      if (ch == ',') ch = ' ';
    std::istringstream ls(line);
    double a, b;
    if (ls >> a >> b) {
      t.push_back(a);
      v.push_back(b);
    }
  }
  auto bd = table(std::move(t), std::move(v));
  bd.table_path_ = path;
  return bd;
}

BoundaryData BoundaryData::parse(const std::string& spec) try {
  const auto colon = spec.find(':');
  const std::string head = spec.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
  auto num = [&](const char* what) {
    try {
      std::size_t used = 0;
      const double x = std::stod(arg, &used);
      if (used != arg.size()) throw std::invalid_argument("");
      return x;
    } catch (const std::exception&) {
      throw ParseError(std::string("family spec '") + spec + "': expected numeric " + what);
    }
  };
  if (head == "quad") {
    if (!arg.empty()) throw ParseError("quad takes no parameter");
    return quad();
  }
  if (head == "exp") return exponential(num("lambda"));
  if (head == "negexp") return neg_exponential(num("lambda"));
  if (head == "pmom") return p_moment(num("p"));
  if (head == "poly5") return poly5(num("c"));
  if (head == "table") {
    if (arg.empty()) throw ParseError("table requires a CSV path");
    return table_from_csv(arg);
  }
  throw ParseError("unknown family '" + head +
                   "'; expected exp:<l>, negexp:<l>, pmom:<p>, poly5:<c>, quad, table:<path>");
} catch (const DomainError& e) {
  // a syntactically valid spec with an inadmissible parameter is still a usage error
  throw ParseError(e.what());
}

void BoundaryData::check_domain(double t) const {
  if (t < dom_lo_ || t > dom_hi_) throw DomainError("argument outside the table's range");
}

double BoundaryData::f(double t) const {
  switch (family_) {
    case Family::Exp: return std::exp(param_ * t);
    case Family::NegExp: return -std::exp(param_ * t);
    case Family::PMoment: return std::pow(std::fabs(t), param_);
    case Family::Poly5: {
      const double t2 = t * t;
      return t2 * t2 * t / 60.0 - param_ * t2 * t / 6.0;
    }
    case Family::Quad: return t * t;
    case Family::Table: check_domain(t); return tab_->value(t);
  }
  throw DomainError("bad family");
}

double BoundaryData::f1(double t) const {
  switch (family_) {
    case Family::Exp: return param_ * std::exp(param_ * t);
    case Family::NegExp: return -param_ * std::exp(param_ * t);
    case Family::PMoment: {
      if (t == 0.0) {
        if (param_ == 1.0) throw NonDifferentiableError("|t| has no derivative at 0");
        return 0.0;
      }
      const double s = t > 0 ? 1.0 : -1.0;
      return s * param_ * std::pow(std::fabs(t), param_ - 1.0);
    }
    case Family::Poly5: {
      const double t2 = t * t;
      return t2 * t2 / 12.0 - param_ * t2 / 2.0;
    }
    case Family::Quad: return 2.0 * t;
    case Family::Table: check_domain(t); return tab_->deriv(t);
  }
  throw DomainError("bad family");
}

double BoundaryData::f2(double t) const {
  switch (family_) {
    case Family::Exp: return param_ * param_ * std::exp(param_ * t);
    case Family::NegExp: return -param_ * param_ * std::exp(param_ * t);
    case Family::PMoment: {
      if (t == 0.0) {
        if (param_ < 2.0)
          throw NonDifferentiableError("|t|^p has a distributional second derivative at 0 for p < 2");
        return param_ == 2.0 ? 2.0 : 0.0;
      }
      return param_ * (param_ - 1.0) * std::pow(std::fabs(t), param_ - 2.0);
    }
    case Family::Poly5: return t * t * t / 3.0 - param_ * t;
    case Family::Quad: return 2.0;
    case Family::Table: check_domain(t); return tab_->deriv2(t);
  }
  throw DomainError("bad family");
}

bool BoundaryData::mirror_symmetric() const {
  switch (family_) {
    case Family::PMoment:
    case Family::Quad: return true;
    case Family::Exp:
    case Family::NegExp:
    case Family::Poly5: return false;
    case Family::Table: {
      if (dom_lo_ != -dom_hi_) return false;
      double scale = 1e-12;
      for (int i = 0; i <= 32; ++i) {
        const double t = dom_hi_ * i / 32.0;
        scale = std::max(scale, std::fabs(f(t)));
        if (std::fabs(f(t) - f(-t)) > 1e-10 * scale) return false;
      }
      return true;
    }
  }
  return false;
}

std::string BoundaryData::spec_string() const {
  std::ostringstream os;
  os.precision(17);
  switch (family_) {
    case Family::Exp: os << "exp:" << param_; break;
    case Family::NegExp: os << "negexp:" << param_; break;
    case Family::PMoment: os << "pmom:" << param_; break;
    case Family::Poly5: os << "poly5:" << param_; break;
    case Family::Quad: os << "quad"; break;
    case Family::Table: os << "table:" << table_path_; break;
  }
  return os.str();
}

}  // namespace bellman
