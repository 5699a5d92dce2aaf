#include "doctest.h"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "aniso/geometry.hpp"
#include "aniso/pde.hpp"
#include "quadrature.hpp"

using namespace aniso;
using std::numbers::pi;

namespace {

// Saint-Venant torsion of ]-1,1[^2 by separation of variables.
double square_torsion_series() {
  double s = 0;
  for (int k = 0; k < 50; ++k) {
    const double m = 2 * k + 1;
    s += std::tanh(m * pi / 2) / std::pow(m, 5);
  }
  return 4.0 / 3 - 256 / std::pow(pi, 5) * s;
}

double square_center_series() {
  double s = 0;
  for (int k = 0; k < 50; ++k) {
    const double m = 2 * k + 1;
    s += (k % 2 ? -1.0 : 1.0) / (std::pow(m, 3) * std::cosh(m * pi / 2));
  }
  return 0.5 - 16 / std::pow(pi, 3) * s;
}

double raw_tail(double p, double s) {
  boost::math::quadrature::tanh_sinh<double> ts;
  return ts.integrate(
      [p](double w, double xc) {
        const double gap = xc > 0 ? -std::expm1(p * std::log1p(-xc)) : 1 - std::pow(w, p);
        return std::pow(gap, -1 / p);
      },
      s, 1.0);
}

}  // namespace

TEST_SUITE("pde") {

TEST_CASE("tail integrals against direct quadrature") {
  for (double p : {1.5, 2.0, 3.0, 5.0}) {
    for (double s : {0.0, 0.3, 0.9, 0.999}) {
      CAPTURE(p);
      CAPTURE(s);
      CHECK(detail::singular_tail_integral(p, s) == doctest::Approx(raw_tail(p, s)).epsilon(1e-10));
    }
    // the cumulative evaluation agrees with one-at-a-time integration
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<double> s(300);
    for (auto &x : s) x = u(rng);
    s.push_back(0.0);
    s.push_back(1.0);
    s.push_back(s[4]);
    const auto many = detail::singular_tail_integrals(p, s);
    REQUIRE(many.size() == s.size());
    for (std::size_t i = 0; i < s.size(); i += 13)
      CHECK(many[i] == doctest::Approx(detail::singular_tail_integral(p, s[i])).epsilon(1e-11).scale(1e-12));
    CHECK(many[s.size() - 2] == 0.0);
  }
}

TEST_CASE("Phi endpoints and the quadratic closed form") {
  for (double p : {1.5, 2.0, 3.0}) {
    const double q = p / (p - 1);
    CHECK(phi_function(p, 0.0) == doctest::Approx(0.0).scale(1e-9));
    CHECK(phi_function(p, 1.0) == doctest::Approx(std::pow(pi_p(p) / 2, q)).epsilon(1e-12));
  }
  // p = 2: int_s^1 (1 - w^2)^{-1/2} dw = arccos s
  for (double s : {0.1, 0.5, 0.8}) CHECK(phi_function(2, s) == doctest::Approx(pi * pi / 4 - std::pow(std::acos(s), 2)));
  CHECK_THROWS_AS(phi_function(1, 0.5), std::invalid_argument);
}

TEST_CASE("square: eigenvalue, torsion and maximum against separation of variables") {
  const auto sq = ConvexPolygon::rectangle(1, 1);
  const auto f = MinkowskiNorm::lq(2);
  const double h = 1.0 / 64;
  const auto e = solve_eigen(sq, f, 2, h);
  CHECK(e.lambda == doctest::Approx(pi * pi / 2).epsilon(2e-3));
  CHECK(e.u.max_interior() == doctest::Approx(1.0));
  const auto t = solve_torsion(sq, f, 2, h);
  CHECK(t.torsion == doctest::Approx(square_torsion_series()).epsilon(3e-3));
  CHECK(t.max_value == doctest::Approx(square_center_series()).epsilon(3e-3));
  // at the minimizer the energy identity int F(grad v)^p = int v holds
  CHECK(t.dual_energy == doctest::Approx(t.torsion).epsilon(1e-9));

  const auto pf = p_function(e, f);
  CHECK(pf.evaluated > 10000);
  CHECK(pf.max_interior <= 0.02 * e.lambda);
  CHECK(pf.min_interior >= -e.lambda * 1.01);

  const auto phi = phi_check(e, t);
  CHECK(phi.max_violation <= 0.02 * std::pow(pi_p(2) / 2, 2));
  CHECK(phi.payne_lhs <= phi.payne_rhs);
  CHECK(phi.payne_lhs == doctest::Approx(pi * pi / 8));

  CHECK(mass_bound_check(e, area(sq)) <= 1.0);
}

TEST_CASE("P-function values follow their definition") {
  const auto f = MinkowskiNorm::lq(3);
  const auto e = solve_eigen(ConvexPolygon::rectangle(1, 0.5), f, 3, 1.0 / 48);
  const auto pf = p_function(e, f);
  const auto &g = *e.u.grid;
  const auto &u = e.u.values;
  for (int j = 3; j < g.ny(); j += 9)
    for (int i = 3; i < g.nx(); i += 11) {
      if (!g.deep_interior(i, j)) continue;
      const double gx = (u[g.index(i + 1, j)] - u[g.index(i - 1, j)]) / (2 * g.h());
      const double gy = (u[g.index(i, j + 1)] - u[g.index(i, j - 1)]) / (2 * g.h());
      const double fv = std::pow(std::pow(std::abs(gx), 3) + std::pow(std::abs(gy), 3), 1.0 / 3);
      const double expected = 2 * std::pow(fv, 3) + e.lambda * (std::pow(u[g.index(i, j)], 3) - 1);
      CHECK(pf.values.values[g.index(i, j)] == doctest::Approx(expected).epsilon(1e-12).scale(e.lambda));
    }
}

TEST_CASE("disk eigenvalue against the first Bessel zero") {
  const double j01 = boost::math::cyl_bessel_j_zero(0.0, 1);
  const auto e = solve_eigen(ConvexPolygon::regular(256, 1), MinkowskiNorm::lq(2), 2, 1.0 / 64);
  CHECK(e.lambda == doctest::Approx(j01 * j01).epsilon(0.01));
}

TEST_CASE("Wulff shape torsion has the radial closed form") {
  // v = (R^q - F°(x)^q) / (q 2^{q-1}) solves -Q_p v = 1 on the Wulff shape of radius R
  for (const auto &[spec, p] : {std::pair{"lq:4", 2.0}, std::pair{"ellipse:1,0,2", 3.0}}) {
    const auto f = MinkowskiNorm::parse(spec);
    const double q = p / (p - 1);
    const double r = 1.0;
    const auto w = ConvexPolygon::wulff(f, r, 256);
    const auto t = solve_torsion(w, f, p, 1.0 / 64);
    CAPTURE(spec);
    CHECK(t.max_value == doctest::Approx(std::pow(r, q) / (q * std::pow(2, q - 1))).epsilon(0.01));
    const double kappa = f.wulff_area();
    CHECK(t.torsion == doctest::Approx(kappa * std::pow(r, q + 2) / ((q + 2) * std::pow(2, q - 1))).epsilon(0.015));
  }
}

TEST_CASE("efficiency of the rectangle eigenfunction is (2/pi)^2") {
  const auto rect = ConvexPolygon::rectangle(1, 0.5);
  const auto e = solve_eigen(rect, MinkowskiNorm::lq(2), 2, 1.0 / 64);
  CHECK(efficiency_ratio(e, area(rect)) == doctest::Approx(4 / (pi * pi)).epsilon(5e-3));
}

TEST_CASE("argument validation") {
  const auto sq = ConvexPolygon::rectangle(1, 1);
  CHECK_THROWS_AS(solve_eigen(sq, MinkowskiNorm::lq(2), 1.0, 1.0 / 32), std::invalid_argument);
  CHECK_THROWS_AS(solve_torsion(sq, MinkowskiNorm::lq(2), 2.0, 1.0 / 32, {.tol = 0}), std::invalid_argument);
  CHECK_THROWS_AS(solve_eigen(sq, MinkowskiNorm::lq(2), 2.0, 0.5), GridTooCoarse);
  CHECK_THROWS_AS(solve_eigen(sq, MinkowskiNorm::lq(2), 2.0, 1.0 / 32, {.max_iterations = 2}), ConvergenceError);
}

}
