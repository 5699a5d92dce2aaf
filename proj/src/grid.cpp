#include "aniso/grid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <fmt/format.h>
#include <fmt/os.h>

namespace aniso {

std::shared_ptr<const Grid> Grid::cover(const ConvexPolygon &omega, double h, int min_nodes, bool fit_boundary) {
  if (!(h > 0.0)) throw std::invalid_argument("grid spacing must be positive");
  const BoundingBox box = omega.bounds();
  auto g = std::shared_ptr<Grid>(new Grid());
  g->h_ = h;
  g->origin_ = box.min;
  g->nx_ = static_cast<int>(std::ceil(box.width() / h - 1e-9)) + 1;
  g->ny_ = static_cast<int>(std::ceil(box.height() / h - 1e-9)) + 1;
  if (static_cast<double>(g->nx_) * g->ny_ > 5e7) {
    throw std::invalid_argument(fmt::format("grid with spacing {} is too large for {}", h, omega.provenance()));
  }
  g->mask_.assign(g->size(), 0);
  std::vector<std::uint8_t> col(static_cast<std::size_t>(g->nx_), 0);
  std::vector<std::uint8_t> row(static_cast<std::size_t>(g->ny_), 0);
  const double margin = 1e-9 * h;
  for (int j = 0; j < g->ny_; ++j) {
    for (int i = 0; i < g->nx_; ++i) {
      if (omega.contains(g->node(i, j), margin)) {
        g->mask_[g->index(i, j)] = 1;
        ++g->interior_count_;
        col[static_cast<std::size_t>(i)] = 1;
        row[static_cast<std::size_t>(j)] = 1;
      }
    }
  }
  g->position_.resize(g->size());
  for (int j = 0; j < g->ny_; ++j)
    for (int i = 0; i < g->nx_; ++i) g->position_[g->index(i, j)] = g->node(i, j);
  g->snapped_.assign(g->size(), 0);
  if (fit_boundary) g->fit_boundary(omega);
  g->compute_masses();

  const auto span_x = std::count(col.begin(), col.end(), 1);
  const auto span_y = std::count(row.begin(), row.end(), 1);
  if (span_x < min_nodes || span_y < min_nodes) {
    throw GridTooCoarse(fmt::format("grid h={} resolves {} with only {}x{} interior nodes (need {} per axis)", h,
                                    omega.provenance(), span_x, span_y, min_nodes));
  }
  return g;
}

void Grid::fit_boundary(const ConvexPolygon &omega) {
  auto touches_interior = [&](const std::array<std::size_t, 3> &t) {
    return mask_[t[0]] || mask_[t[1]] || mask_[t[2]];
  };
  for (int j = 0; j + 1 < ny_; ++j) {
    for (int i = 0; i + 1 < nx_; ++i) {
      for (const auto &t : cell_triangles(i, j)) {
        if (!touches_interior(t)) continue;
        for (const auto k : t) {
          if (mask_[k] || snapped_[k]) continue;
          const Vec2 y = closest_boundary_point(omega, position_[k]);
          if (euclid(y - position_[k]) > 1e-12 * h_) {
            position_[k] = y;
            snapped_[k] = 1;
          }
        }
      }
    }
  }
  // Undo moves that leave a triangle with less than a tenth of its lattice area.
  const double min_det = 0.1 * h_ * h_;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int j = 0; j + 1 < ny_; ++j) {
      for (int i = 0; i + 1 < nx_; ++i) {
        for (const auto &t : cell_triangles(i, j)) {
          if (!touches_interior(t) || !(snapped_[t[0]] || snapped_[t[1]] || snapped_[t[2]])) continue;
          const double det = cross(position_[t[1]] - position_[t[0]], position_[t[2]] - position_[t[0]]);
          if (det >= min_det) continue;
          for (const auto k : t) {
            if (!snapped_[k]) continue;
            snapped_[k] = 0;
            position_[k] = node(static_cast<int>(k % nx_), static_cast<int>(k / nx_));
          }
          changed = true;
        }
      }
    }
  }
  snapped_count_ = static_cast<std::size_t>(std::count(snapped_.begin(), snapped_.end(), 1));
}

void Grid::compute_masses() {
  mass_.assign(size(), 0.0);
  for (int j = 0; j + 1 < ny_; ++j) {
    for (int i = 0; i + 1 < nx_; ++i) {
      for (const auto &t : cell_triangles(i, j)) {
        const double third =
            std::abs(cross(position_[t[1]] - position_[t[0]], position_[t[2]] - position_[t[0]])) / 6.0;
        for (const auto k : t)
          if (mask_[k]) mass_[k] += third;
      }
    }
  }
}

double GridField::max_interior() const {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < values.size(); ++k)
    if (grid->interior(k)) m = std::max(m, values[k]);
  return m;
}

void write_field_csv(const GridField &field, const std::string &path) {
  auto out = fmt::output_file(path);
  out.print("x,y,value\n");
  const Grid &g = *field.grid;
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      const auto k = g.index(i, j);
      if (!g.interior(k)) continue;
      const Vec2 x = g.node(i, j);
      out.print("{:.12g},{:.12g},{:.12g}\n", x.x, x.y, field.values[k]);
    }
  }
}

DistanceField distance_field(const ConvexPolygon &omega, const MinkowskiNorm &f, double h) {
  DistanceField d;
  d.field.grid = Grid::cover(omega, h);
  const Grid &g = *d.field.grid;
  d.field.values.assign(g.size(), 0.0);
  d.ridge.assign(g.size(), 0);
  d.nearest_edge.assign(g.size(), -1);
  d.inradius = 0.0;
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      const auto k = g.index(i, j);
      if (!g.interior(k)) continue;
      const auto bd = boundary_distance_F(omega, f, g.node(i, j));
      d.field.values[k] = bd.nearest;
      d.nearest_edge[k] = bd.edge;
      d.ridge[k] = bd.second - bd.nearest <= 2.0 * h ? 1 : 0;
      if (bd.nearest > d.inradius) {
        d.inradius = bd.nearest;
        d.argmax = g.node(i, j);
      }
    }
  }
  return d;
}

}  // namespace aniso
