#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include "aniso/geometry.hpp"
#include "aniso/grid.hpp"

using namespace aniso;

namespace {

double tri_det(Vec2 a, Vec2 b, Vec2 c) { return cross(b - a, c - a); }

}  // namespace

TEST_SUITE("grid") {

TEST_CASE("rectangle lattice: interior count and interior masses") {
  const auto g = Grid::cover(ConvexPolygon::rectangle(1, 0.5), 1.0 / 32, 8);
  CHECK(g->h() == doctest::Approx(1.0 / 32));
  // 63 x 31 strictly interior nodes
  CHECK(g->interior_count() == 63 * 31);
  CHECK(g->snapped_count() == 0);
  double total = 0;
  for (int j = 0; j < g->ny(); ++j)
    for (int i = 0; i < g->nx(); ++i) {
      const auto k = g->index(i, j);
      if (!g->interior(k)) continue;
      total += g->mass(k);
      CHECK(g->node(i, j).x > -1);
      CHECK(g->node(i, j).x < 1);
      // six right triangles of area h^2/2, one third each
      if (g->deep_interior(i, j)) CHECK(g->mass(k) == doctest::Approx(g->h() * g->h()));
    }
  // the boundary hats are missing: exact total is area minus a perimeter strip
  CHECK(total < 2.0);
  CHECK(total > 2.0 - 6.0 * g->h());
}

TEST_CASE("boundary fitting keeps every triangle valid") {
  const ConvexPolygon omega({{0, 0}, {3, 0.2}, {3.5, 1.5}, {1.5, 2.8}, {-0.4, 1.4}}, "pentagon");
  const double h = 0.05;
  const auto g = Grid::cover(omega, h);
  CHECK(g->snapped_count() > 0);
  double total = 0;
  for (std::size_t k = 0; k < g->size(); ++k) {
    if (g->interior(k)) {
      CHECK(g->position(k) == g->node(static_cast<int>(k % g->nx()), static_cast<int>(k / g->nx())));
      total += g->mass(k);
    }
    if (g->snapped(k)) {
      CHECK_FALSE(g->interior(k));
      const Vec2 x = g->position(k);
      CHECK(euclid(closest_boundary_point(omega, x) - x) < 1e-12);
    }
  }
  for (int j = 0; j + 1 < g->ny(); ++j)
    for (int i = 0; i + 1 < g->nx(); ++i)
      for (const auto &t : g->cell_triangles(i, j)) {
        if (!g->interior(t[0]) && !g->interior(t[1]) && !g->interior(t[2])) continue;
        const double d = std::abs(tri_det(g->position(t[0]), g->position(t[1]), g->position(t[2])));
        CHECK(d >= 0.1 * h * h);
      }
  // fitted triangles cover the polygon up to the boundary hats
  CHECK(total < area(omega));
  CHECK(total > area(omega) - perimeter(omega) * h);
}

TEST_CASE("fitting can be switched off") {
  const ConvexPolygon omega({{0, 0}, {3, 0.2}, {3.5, 1.5}, {1.5, 2.8}, {-0.4, 1.4}}, "pentagon");
  const auto g = Grid::cover(omega, 0.05, 32, false);
  CHECK(g->snapped_count() == 0);
}

TEST_CASE("too coarse grids are rejected") {
  CHECK_THROWS_AS(Grid::cover(ConvexPolygon::rectangle(1, 1), 0.25), GridTooCoarse);
  CHECK_NOTHROW(Grid::cover(ConvexPolygon::rectangle(1, 1), 0.25, 4));
}

TEST_CASE("field integration and CSV output") {
  const auto g = Grid::cover(ConvexPolygon::rectangle(1, 1), 1.0 / 20, 8);
  GridField f{g, std::vector<double>(g->size(), 0.0)};
  for (std::size_t k = 0; k < g->size(); ++k)
    if (g->interior(k)) f.values[k] = 2.0;
  CHECK(f.max_interior() == 2.0);
  double mass = 0;
  for (std::size_t k = 0; k < g->size(); ++k)
    if (g->interior(k)) mass += g->mass(k);
  CHECK(f.integrate([](double v) { return v * v; }) == doctest::Approx(4 * mass));

  const auto path = std::filesystem::temp_directory_path() / "aniso_grid_field.csv";
  write_field_csv(f, path.string());
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "x,y,value");
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == g->interior_count());
  std::filesystem::remove(path);
}

}
