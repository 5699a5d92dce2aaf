#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "aniso/geometry.hpp"
#include "aniso/grid.hpp"

using namespace aniso;

namespace {

double shoelace(const std::vector<Vec2> &v) {
  double a = 0;
  for (std::size_t i = 0; i < v.size(); ++i) a += cross(v[i], v[(i + 1) % v.size()]);
  return 0.5 * a;
}

// Andrew's monotone chain, CCW.
std::vector<Vec2> hull(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  std::vector<Vec2> h(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(h[k - 1] - h[k - 2], pts[i] - h[k - 2]) <= 0) --k;
    h[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(h[k - 1] - h[k - 2], pts[i] - h[k - 2]) <= 0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  return h;
}

ConvexPolygon pentagon() {
  return ConvexPolygon({{0, 0}, {3, 0}, {3.5, 1.5}, {1.5, 2.8}, {-0.4, 1.4}}, "test pentagon");
}

}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("polygon construction normalizes and validates") {
  // clockwise input with a repeated and a collinear vertex
  ConvexPolygon p({{0, 0}, {0, 1}, {0, 1}, {1, 1}, {1, 0.5}, {1, 0}}, "square");
  CHECK(p.size() == 4);
  CHECK(shoelace(p.vertices()) == doctest::Approx(1.0));
  CHECK(p.provenance() == "square");
  CHECK_THROWS_AS(ConvexPolygon({{0, 0}, {2, 0}, {1, 0.2}, {2, 2}, {0, 2}}, "dent"), std::invalid_argument);
  CHECK_THROWS_AS(ConvexPolygon({{0, 0}, {1, 1}}, "segment"), std::invalid_argument);
  CHECK_THROWS_AS(ConvexPolygon({{0, 0}, {1, 1}, {2, 2}}, "flat"), std::invalid_argument);
  CHECK_THROWS_AS(ConvexPolygon::rectangle(0, 1), std::invalid_argument);
}

TEST_CASE("rectangle measurements") {
  const auto r = ConvexPolygon::rectangle(1, 3);
  CHECK(area(r) == doctest::Approx(12));
  CHECK(perimeter(r) == doctest::Approx(16));
  CHECK(r.diameter() == doctest::Approx(2 * std::sqrt(10.0)));
  CHECK(r.bounds().width() == doctest::Approx(2));
  CHECK(r.bounds().height() == doctest::Approx(6));
  CHECK(euclid(r.centroid()) < 1e-14);
  CHECK(r.contains({0.99, 2.99}));
  CHECK_FALSE(r.contains({1.01, 0}));
  CHECK_FALSE(r.contains({0.99, 0}, 0.02));
  CHECK(area(r.scaled(0.5)) == doctest::Approx(3));
  // F(e1) = 1, F(e2) = 2: horizontal edges weigh twice
  CHECK(perimeter_F(r, MinkowskiNorm::ellipse(1, 0, 4)) == doctest::Approx(2 * 2 * 2 + 2 * 6 * 1));
  CHECK(perimeter_F(r, MinkowskiNorm::lq(2)) == doctest::Approx(16));
  CHECK(perimeter_F(r, MinkowskiNorm::lq(5)) == doctest::Approx(16));
}

TEST_CASE("half-planes describe the polygon") {
  const auto p = pentagon();
  const auto hp = p.half_planes();
  REQUIRE(hp.size() == p.size());
  for (std::size_t i = 0; i < hp.size(); ++i) {
    CHECK(euclid(hp[i].normal) == doctest::Approx(1.0));
    CHECK(dot(hp[i].normal, p.vertices()[i]) == doctest::Approx(hp[i].offset));
    CHECK(dot(hp[i].normal, p.vertices()[(i + 1) % p.size()]) == doctest::Approx(hp[i].offset));
    CHECK(dot(hp[i].normal, p.centroid()) < hp[i].offset);
  }
}

TEST_CASE("slab ratio limit") {
  CHECK(rect_ratio_limit(2, MinkowskiNorm::lq(2)) == doctest::Approx(0.5));
  // F° of ellipse(4,0,1) at e1 is 1/2
  CHECK(rect_ratio_limit(1, MinkowskiNorm::ellipse(4, 0, 1)) == doctest::Approx(2.0));
  // the finite-k ratio approaches it
  const auto f = MinkowskiNorm::lq(3);
  const auto big = ConvexPolygon::rectangle(1, 1e6);
  CHECK(perimeter_F(big, f) / area(big) == doctest::Approx(rect_ratio_limit(1, f)).epsilon(1e-5));
}

TEST_CASE("erosion moves each edge inward by r F(normal)") {
  const auto r = ConvexPolygon::rectangle(1, 3);
  auto e = erode(r, MinkowskiNorm::lq(2), 0.25);
  REQUIRE(e);
  CHECK(area(*e) == doctest::Approx(1.5 * 5.5));
  auto a = erode(r, MinkowskiNorm::ellipse(1, 0, 4), 0.25);
  REQUIRE(a);
  CHECK(a->bounds().width() == doctest::Approx(1.5));
  CHECK(a->bounds().height() == doctest::Approx(5.0));
  CHECK_FALSE(erode(r, MinkowskiNorm::lq(2), 1.01));
  CHECK(area(*erode(r, MinkowskiNorm::lq(2), 0.0)) == doctest::Approx(12));
  CHECK_THROWS_AS(erode(r, MinkowskiNorm::lq(2), -1), std::invalid_argument);
}

TEST_CASE("anisotropic inradius") {
  CHECK(inradius_F(ConvexPolygon::rectangle(1, 3), MinkowskiNorm::lq(2)) == doctest::Approx(1.0).epsilon(1e-12));
  // distance to a line with unit normal n is delta / F(n)
  CHECK(inradius_F(ConvexPolygon::rectangle(1, 3), MinkowskiNorm::ellipse(1, 0, 4)) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(inradius_F(ConvexPolygon::rectangle(1, 3), MinkowskiNorm::ellipse(1, 0, 16)) ==
        doctest::Approx(0.75).epsilon(1e-12));
  CHECK(inradius_F(ConvexPolygon::regular(7, 2), MinkowskiNorm::lq(2)) ==
        doctest::Approx(2 * std::cos(std::numbers::pi / 7)).epsilon(1e-12));
  for (const auto &f : {MinkowskiNorm::lq(4), MinkowskiNorm::ellipse(2, 0.5, 1)}) {
    const auto w = ConvexPolygon::wulff(f, 1.2, 256);
    const double r = inradius_F(w, f);
    CHECK(r < 1.2);
    CHECK(r > 1.2 * (1 - 1e-3));
  }
}

TEST_CASE("rolling body equals the Minkowski sum of erosion and Wulff shape") {
  for (const auto &f : {MinkowskiNorm::lq(2), MinkowskiNorm::lq(4), MinkowskiNorm::ellipse(2, 0.5, 1)}) {
    const auto omega = pentagon();
    const double r = 0.4;
    const auto inner = erode(omega, f, r);
    REQUIRE(inner);
    const int n = 4096;
    const auto w = wulff_polygon(f, r, {}, n);
    std::vector<Vec2> sums;
    for (auto a : inner->vertices())
      for (auto b : w.vertices) sums.push_back(a + b);
    const auto h = hull(sums);
    double pf = 0;
    for (std::size_t i = 0; i < h.size(); ++i) {
      const Vec2 e = h[(i + 1) % h.size()] - h[i];
      pf += f(Vec2{e.y, -e.x});
    }
    const auto body = rolling_body(omega, f, r);
    CAPTURE(f.spec());
    CHECK(body.area == doctest::Approx(shoelace(h)).epsilon(1e-5));
    CHECK(body.perimeter_F == doctest::Approx(pf).epsilon(1e-5));
    CHECK(body.area <= area(omega));
  }
  // Euclidean rectangle by hand: |E| + r P(E) + pi r^2
  const auto rb = rolling_body(ConvexPolygon::rectangle(1, 2), MinkowskiNorm::lq(2), 0.5);
  CHECK(rb.area == doctest::Approx(1 * 3 + 0.5 * 8 + std::numbers::pi * 0.25));
  CHECK(rb.perimeter_F == doctest::Approx(8 + std::numbers::pi));
  CHECK_THROWS_AS(rolling_body(ConvexPolygon::rectangle(1, 2), MinkowskiNorm::lq(2), 1.5), std::domain_error);
}

TEST_CASE("segment distance against dense sampling") {
  const auto f = MinkowskiNorm::ellipse(2, 0.5, 1);
  const auto polar = f.polar();
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int t = 0; t < 20; ++t) {
    const Vec2 x{u(rng), u(rng)}, a{u(rng), u(rng)}, b{u(rng), u(rng)};
    double best = 1e300;
    for (int i = 0; i <= 20000; ++i) best = std::min(best, polar(x - (a + (b - a) * (i / 20000.0))));
    const double d = segment_distance_F(x, a, b, polar);
    CHECK(d <= best + 1e-12);
    CHECK(d == doctest::Approx(best).epsilon(1e-6));
  }
}

TEST_CASE("boundary distance equals the supporting-line distance inside a convex polygon") {
  const auto omega = pentagon();
  const auto hp = omega.half_planes();
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> ux(-0.4, 3.5), uy(0, 2.8);
  for (const auto &f : {MinkowskiNorm::lq(2), MinkowskiNorm::lq(1.5), MinkowskiNorm::ellipse(2, 0.5, 1)}) {
    int tested = 0;
    while (tested < 50) {
      const Vec2 x{ux(rng), uy(rng)};
      if (!omega.contains(x)) continue;
      ++tested;
      double oracle = 1e300;
      for (const auto &h : hp) oracle = std::min(oracle, (h.offset - dot(h.normal, x)) / f(h.normal));
      const auto d = boundary_distance_F(omega, f, x);
      CHECK(d.nearest == doctest::Approx(oracle).epsilon(1e-9));
      CHECK(d.second >= d.nearest);
      CHECK(d.edge >= 0);
    }
  }
}

TEST_CASE("closest boundary point") {
  const auto sq = ConvexPolygon::rectangle(1, 1);
  CHECK(euclid(closest_boundary_point(sq, {2, 0.5}) - Vec2{1, 0.5}) < 1e-15);
  CHECK(euclid(closest_boundary_point(sq, {2, 3}) - Vec2{1, 1}) < 1e-15);
  CHECK(euclid(closest_boundary_point(sq, {0.1, 0.9}) - Vec2{0.1, 1}) < 1e-15);
}

TEST_CASE("distance field is concave, eikonal and attains the inradius") {
  const auto omega = pentagon();
  for (const auto &f : {MinkowskiNorm::lq(2), MinkowskiNorm::ellipse(2, 0.5, 1)}) {
    const double h = 0.02;
    const auto df = distance_field(omega, f, h);
    const auto &g = *df.field.grid;
    const auto &d = df.field.values;
    const double r = inradius_F(omega, f);
    CHECK(df.inradius <= r + 1e-12);
    CHECK(df.inradius >= r - 2 * h);
    std::size_t eikonal_checked = 0;
    for (int j = 1; j + 1 < g.ny(); ++j)
      for (int i = 1; i + 1 < g.nx(); ++i) {
        if (!g.deep_interior(i, j)) continue;
        const auto k = g.index(i, j);
        // midpoint concavity along both axes
        CHECK(2 * d[k] >= d[g.index(i - 1, j)] + d[g.index(i + 1, j)] - 1e-12);
        CHECK(2 * d[k] >= d[g.index(i, j - 1)] + d[g.index(i, j + 1)] - 1e-12);
        if (df.ridge[k]) continue;
        const Vec2 grad{(d[g.index(i + 1, j)] - d[g.index(i - 1, j)]) / (2 * h),
                        (d[g.index(i, j + 1)] - d[g.index(i, j - 1)]) / (2 * h)};
        CHECK(f(grad) == doctest::Approx(1.0).epsilon(1e-9));
        ++eikonal_checked;
      }
    CHECK(eikonal_checked > 1000);
  }
}

}
