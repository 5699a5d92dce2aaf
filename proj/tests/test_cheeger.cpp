#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <string>

#include "aniso/cheeger.hpp"

using namespace aniso;

namespace {

// Cheeger constant of an a x b rectangle (side lengths), Euclidean norm.
double rectangle_cheeger(double a, double b) {
  return (4 - std::numbers::pi) / (a + b - std::sqrt((a - b) * (a - b) + std::numbers::pi * a * b));
}

}  // namespace

TEST_SUITE("cheeger") {

TEST_CASE("rectangles match the closed form") {
  const auto f = MinkowskiNorm::lq(2);
  for (const auto &[a, k] : {std::pair{0.5, 0.5}, std::pair{1.0, 0.5}, std::pair{1.0, 4.0}, std::pair{0.3, 2.0}}) {
    const auto r = cheeger_estimate(ConvexPolygon::rectangle(a, k), f);
    const double expected = rectangle_cheeger(2 * a, 2 * k);
    CAPTURE(a);
    CAPTURE(k);
    CHECK(r.h_est == doctest::Approx(expected).epsilon(1e-6));
    // in the Euclidean case the optimal rolling radius is 1 / h
    CHECK(r.r_star == doctest::Approx(1 / expected).epsilon(1e-4));
    CHECK_FALSE(r.fallback);
  }
}

TEST_CASE("Wulff shapes are their own Cheeger sets") {
  for (const auto &f : {MinkowskiNorm::lq(2), MinkowskiNorm::lq(4), MinkowskiNorm::ellipse(2, 0.5, 1)}) {
    const double radius = 1.5;
    const auto w = ConvexPolygon::wulff(f, radius, 256);
    const auto r = cheeger_estimate(w, f);
    CAPTURE(f.spec());
    CHECK(r.h_est == doctest::Approx(2 / radius).epsilon(1e-3));
    CHECK(r.h_est <= perimeter_F(w, f) / area(w) + 1e-12);
  }
}

TEST_CASE("estimate sits inside the inradius bounds") {
  const ConvexPolygon pent({{0, 0}, {3, 0.2}, {3.5, 1.5}, {1.5, 2.8}, {-0.4, 1.4}}, "pentagon");
  for (const auto &f : {MinkowskiNorm::lq(2), MinkowskiNorm::lq(1.5), MinkowskiNorm::ellipse(1, 0, 9)}) {
    for (const auto &omega : {pent, ConvexPolygon::rectangle(1, 8), ConvexPolygon::regular(5, 1)}) {
      const auto b = cheeger_bounds(omega, f);
      const auto r = cheeger_estimate(omega, f, 32);
      CHECK(b.lower == doctest::Approx(r.lower));
      CHECK(b.upper == doctest::Approx(r.upper));
      CHECK(r.lower <= r.h_est);
      CHECK(r.h_est <= r.upper);
      CHECK(r.trace.size() == 32);
      CHECK(r.r_star >= 0);
      CHECK(r.r_star < r.inradius);
      for (const auto &[rad, ratio] : r.trace) CHECK(ratio >= r.h_est - 1e-12);
    }
  }
}

TEST_CASE("scaling") {
  const auto f = MinkowskiNorm::lq(3);
  const auto omega = ConvexPolygon::regular(6, 1);
  const double h1 = cheeger_estimate(omega, f).h_est;
  const double h3 = cheeger_estimate(omega.scaled(3), f).h_est;
  CHECK(h3 == doctest::Approx(h1 / 3).epsilon(1e-7));
}

TEST_CASE("trace CSV and argument checks") {
  const auto r = cheeger_estimate(ConvexPolygon::rectangle(1, 1), MinkowskiNorm::lq(2), 8);
  const auto path = std::filesystem::temp_directory_path() / "aniso_cheeger_trace.csv";
  write_trace_csv(r, path.string());
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "r,ratio");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 8);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(cheeger_estimate(ConvexPolygon::rectangle(1, 1), MinkowskiNorm::lq(2), 2), std::invalid_argument);
}

}
