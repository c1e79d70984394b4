#include <doctest.h>

#include <sstream>

#include "bellman/verify.hpp"

using namespace bellman;

TEST_CASE("quadratic suite is green") {
  SuiteConfig cfg;
  cfg.family = "quad";
  cfg.N = 10;
  cfg.M = 4;
  cfg.tol = 1e-8;
  cfg.window = 8.0;
  cfg.compare_window = 2.0;
  cfg.depth = 6;
  cfg.trials = 300;
  const auto reports = run_suite(cfg);
  CHECK(reports.size() >= 8);
  for (const auto& r : reports) {
    INFO(r.name, " residual ", r.max_residual, " tol ", r.tolerance);
    CHECK(r.pass);
  }
  // sorted by name
  for (std::size_t i = 1; i < reports.size(); ++i) CHECK(reports[i - 1].name <= reports[i].name);
}

TEST_CASE("reports are byte-identical for a fixed config and seed") {
  SuiteConfig cfg;
  cfg.family = "exp:0.5";
  cfg.N = 8;
  cfg.M = 3;
  cfg.window = 8.0;
  cfg.compare_window = 1.5;
  cfg.depth = 6;
  cfg.trials = 400;
  cfg.seed = 77;
  std::ostringstream a, b;
  write_report(a, cfg, run_suite(cfg));
  write_report(b, cfg, run_suite(cfg));
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind("report/1", 0) == 0);
  CHECK(a.str().find("check boundary-condition") != std::string::npos);
  CHECK(a.str().find("status PASS") != std::string::npos);
}

TEST_CASE("diagonal identity check on closed forms") {
  FoliationSpec q = build_foliation_auto(BoundaryData::quad(), {});
  CHECK(check_diagonal(q, -3, 3, 1e-2).max_residual == 0.0);
  FoliationSpec e = build_foliation_auto(BoundaryData::exponential(0.75), {});
  CHECK(check_diagonal(e, -3, 3, 1e-2).max_residual <= 1e-8);
}
