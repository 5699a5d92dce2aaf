#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "aniso/geometry.hpp"

namespace aniso {

class GridTooCoarse : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Uniform node lattice anchored at the lower-left corner of the domain's
/// bounding box. Nodes strictly inside the polygon are unknowns; all others
/// carry homogeneous Dirichlet data.
class Grid {
public:
  /// Throws GridTooCoarse when fewer than `min_nodes` interior nodes span
  /// either axis.
  static std::shared_ptr<const Grid> cover(const ConvexPolygon &omega, double h, int min_nodes = 32,
                                           bool fit_boundary = true);

  /// Vertices of the two triangles of cell (i, j): lower (00, 10, 01) and
  /// upper (11, 01, 10), as node indices.
  std::array<std::array<std::size_t, 3>, 2> cell_triangles(int i, int j) const {
    const auto c = index(i, j);
    const auto n = static_cast<std::size_t>(nx_);
    return {{{c, c + 1, c + n}, {c + n + 1, c + n, c + 1}}};
  }

  double h() const { return h_; }
  Vec2 origin() const { return origin_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  std::size_t size() const { return static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_); }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx_ + i; }
  Vec2 node(int i, int j) const { return {origin_.x + i * h_, origin_.y + j * h_}; }
  bool interior(std::size_t k) const { return mask_[k] != 0; }
  bool interior(int i, int j) const {
    return i >= 0 && j >= 0 && i < nx_ && j < ny_ && mask_[index(i, j)] != 0;
  }
  const std::vector<std::uint8_t> &mask() const { return mask_; }
  /// Node location used by the discretization. Exterior nodes that share a
  /// lattice triangle with the interior are moved onto the boundary (their
  /// nearest boundary point) unless that would flatten or invert a triangle.
  Vec2 position(std::size_t k) const { return position_[k]; }
  bool snapped(std::size_t k) const { return snapped_[k] != 0; }
  std::size_t snapped_count() const { return snapped_count_; }
  /// Lumped P1 mass: one third of the area of the triangles around node k.
  double mass(std::size_t k) const { return mass_[k]; }
  std::size_t interior_count() const { return interior_count_; }
  /// Interior node with all four lattice neighbours interior.
  bool deep_interior(int i, int j) const {
    return interior(i, j) && interior(i - 1, j) && interior(i + 1, j) && interior(i, j - 1) && interior(i, j + 1);
  }

private:
  Grid() = default;
  void fit_boundary(const ConvexPolygon &omega);
  void compute_masses();

  double h_ = 0.0;
  Vec2 origin_;
  int nx_ = 0;
  int ny_ = 0;
  std::vector<std::uint8_t> mask_;
  std::vector<std::uint8_t> snapped_;
  std::vector<Vec2> position_;
  std::vector<double> mass_;
  std::size_t interior_count_ = 0;
  std::size_t snapped_count_ = 0;
};

/// Node values on a grid; non-interior nodes hold 0 for Dirichlet fields.
struct GridField {
  std::shared_ptr<const Grid> grid;
  std::vector<double> values;

  double max_interior() const;
  /// Lumped-mass quadrature of g(value) over the interior nodes.
  template <class Fn> double integrate(Fn &&g) const {
    double s = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k)
      if (grid->interior(k)) s += grid->mass(k) * g(values[k]);
    return s;
  }
};

/// CSV with header `x,y,value`, one row per interior node in lattice order.
void write_field_csv(const GridField &field, const std::string &path);

struct DistanceField {
  GridField field;                  // d_F per node (0 off the interior)
  std::vector<std::uint8_t> ridge;  // two segment distances within 2h
  std::vector<int> nearest_edge;
  Vec2 argmax;
  double inradius = 0.0;            // max of the node values
};

/// Per-node anisotropic distance to the boundary on Grid::cover(omega, h).
DistanceField distance_field(const ConvexPolygon &omega, const MinkowskiNorm &f, double h);

}  // namespace aniso
