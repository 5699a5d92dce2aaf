#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <string>

#include "aniso/harness.hpp"

using namespace aniso;
using std::numbers::pi;

namespace {

const InequalityRecord &record(const InequalityReport &r, const std::string &id) {
  for (const auto &x : r.records)
    if (x.id == id) return x;
  throw std::out_of_range(id);
}

std::size_t count_lines(const std::filesystem::path &p) {
  std::ifstream in(p);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) ++n;
  return n;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("square case: every inequality is evaluated and holds") {
  const CaseSpec spec{"rect:1,1", "lq:2", 2.0, 1.0 / 32, 1e-8};
  const auto r = run_case(spec, default_tolerances());
  REQUIRE_FALSE(r.inconclusive);
  REQUIRE(r.records.size() == inequality_ids().size());
  for (std::size_t i = 0; i < r.records.size(); ++i) {
    CHECK(r.records[i].id == inequality_ids()[i]);
    CAPTURE(r.records[i].id);
    CHECK(r.records[i].pass);
    CHECK_FALSE(r.records[i].anchor.empty());
  }
  CHECK(r.passed());

  // geometric sides by hand: R_F = 1, |Omega| = 4, P = 8, h = (4 - pi) / (4 - 2 sqrt(pi))
  const double h_square = (4 - pi) / (4 - 2 * std::sqrt(pi));
  CHECK(record(r, "isop").lhs == doctest::Approx(2 * std::sqrt(4 * pi)));
  CHECK(record(r, "isop").rhs == doctest::Approx(8));
  CHECK(record(r, "hrl").lhs == doctest::Approx(1));
  CHECK(record(r, "hrl").rhs == doctest::Approx(h_square).epsilon(1e-6));
  CHECK(record(r, "hru").rhs == doctest::Approx(2));
  CHECK(record(r, "H").lhs == doctest::Approx(pi * pi / 4));
  CHECK(record(r, "pol").rhs == doctest::Approx(pi * pi));
  CHECK(record(r, "stima_max").chain);
  CHECK(record(r, "stima_max").lhs == doctest::Approx(0.25));
  CHECK(record(r, "stima_max").rhs == doctest::Approx(0.5));
  CHECK(record(r, "func").chain);
  // rc uses the estimated Cheeger constant, an upper bound
  CHECK(record(r, "rc").rhs == doctest::Approx(pi * pi / 4 * h_square * h_square).epsilon(1e-5));

  const auto &d = r.diagnostics;
  CHECK(d.lambda == doctest::Approx(pi * pi / 2).epsilon(0.01));
  CHECK(d.inradius_F == doctest::Approx(1));
  CHECK(d.inradius_grid <= 1.0);
  CHECK(d.area == doctest::Approx(4));
  CHECK_FALSE(d.stronger_cheeger.empty());
}

TEST_CASE("corrupted tolerance forces a failure") {
  const CaseSpec spec{"rect:1,1", "lq:2", 2.0, 1.0 / 32, 1e-8};
  auto tol = default_tolerances();
  tol["isop"] = Tolerance{-1.0, 0.0};
  const auto r = run_case(spec, tol);
  CHECK_FALSE(record(r, "isop").pass);
  CHECK(record(r, "hrl").pass);
  CHECK_FALSE(r.passed());
}

TEST_CASE("reports are deterministic and written to disk") {
  const std::vector<CaseSpec> specs{{"rect:1,1", "lq:2", 2.0, 1.0 / 32, 1e-8}, {"regular:6,1", "lq:4", 3.0, 1.0 / 40, 1e-8}};
  const auto a = run_cases(specs, default_tolerances(), 32, 2);
  const auto b = run_cases(specs, default_tolerances(), 32, 1);
  REQUIRE(a.size() == 2);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].spec == specs[i]);
    CHECK(report_json(a[i]) == report_json(b[i]));
  }
  CHECK(report_json(a[0]).find("\"status\": \"pass\"") != std::string::npos);

  const auto dir = std::filesystem::temp_directory_path() / "aniso_harness_reports";
  std::filesystem::remove_all(dir);
  write_reports(a, dir.string());
  CHECK(std::filesystem::exists(dir / "case_000.json"));
  CHECK(std::filesystem::exists(dir / "case_001.json"));
  std::ifstream csv(dir / "inequalities.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header == "case,domain,norm,p,h,status,id,lhs,rhs,slack,tolerance,pass");
  CHECK(count_lines(dir / "inequalities.csv") == 1 + 2 * inequality_ids().size());
  std::filesystem::remove_all(dir);
}

TEST_CASE("unconverged cases are inconclusive but keep the geometric checks") {
  // grid too coarse for the solvers
  const auto r = run_case({"rect:1,1", "lq:2", 2.0, 0.5, 1e-8}, default_tolerances());
  CHECK(r.inconclusive);
  CHECK_FALSE(r.message.empty());
  CHECK_FALSE(r.passed());
  CHECK(r.records.size() == 5);
  for (const auto &x : r.records) CHECK(x.pass);
  CHECK(report_json(r).find("inconclusive") != std::string::npos);
}

TEST_CASE("slab sweep rows") {
  SweepSpec s;
  s.k = {1, 2};
  s.h = 1.0 / 32;
  const auto rows = slab_sweep(s, 2);
  REQUIRE(rows.size() == 2);
  // ]-1,1[ x ]-k,k[: P R / |Omega| = (1 + k) / k, h R from the rectangle closed form
  CHECK(rows[0].r3 == doctest::Approx(2.0));
  CHECK(rows[1].r3 == doctest::Approx(1.5));
  CHECK(rows[0].r2 == doctest::Approx((4 - pi) / (4 - 2 * std::sqrt(pi))).epsilon(1e-6));
  CHECK(rows[0].r1 == doctest::Approx(2.0).epsilon(0.01));
  CHECK(rows[1].r1 < rows[0].r1);
  s.norm = "ellipse:2,0.5,1";
  CHECK_THROWS_AS(slab_sweep(s), std::invalid_argument);

  const auto path = std::filesystem::temp_directory_path() / "aniso_sweep.csv";
  write_sweep_csv(rows, path.string());
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "k,r1,r2,r3,r4");
  std::filesystem::remove(path);
}

TEST_CASE("Richardson extrapolation on synthetic second-order data") {
  const std::vector<double> h{0.4, 0.2, 0.1, 0.05};
  std::vector<double> v;
  for (double x : h) v.push_back(3.0 + 0.7 * x * x);
  const auto s = richardson(h, v);
  CHECK(s.order == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(s.extrapolated == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(s.monotone);
  v[1] = 2.0;
  CHECK_FALSE(richardson(h, v).monotone);
  CHECK_THROWS_AS(richardson({0.4, 0.2}, {1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(richardson({0.4, 0.2, 0.15}, {1, 2, 3}), std::invalid_argument);
  CHECK_THROWS_AS(richardson({0.1, 0.2, 0.4}, {1, 2, 3}), std::invalid_argument);
}

}
