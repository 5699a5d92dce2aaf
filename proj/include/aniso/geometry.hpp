#pragma once

#include <optional>
#include <string>
#include <vector>

#include "aniso/norms.hpp"

namespace aniso {

/// {x : <normal, x> <= offset} with a Euclidean unit normal.
struct HalfPlane {
  Vec2 normal;
  double offset = 0.0;
};

struct BoundingBox {
  Vec2 min;
  Vec2 max;
  double width() const { return max.x - min.x; }
  double height() const { return max.y - min.y; }
};

/// Strictly convex polygon with CCW vertices. Construction normalizes the
/// orientation, drops repeated and collinear vertices, and rejects anything
/// that is not strictly convex afterwards.
class ConvexPolygon {
public:
  ConvexPolygon(std::vector<Vec2> vertices, std::string provenance);

  /// ]-a, a[ x ]-k, k[
  static ConvexPolygon rectangle(double a, double k);
  /// Regular n-gon centred at the origin with a vertex on the positive x axis.
  static ConvexPolygon regular(int n, double circumradius);
  static ConvexPolygon wulff(const MinkowskiNorm &f, double r, int n, Vec2 center = {});

  const std::vector<Vec2> &vertices() const { return vertices_; }
  const std::string &provenance() const { return provenance_; }
  std::size_t size() const { return vertices_.size(); }

  /// Edge i runs from vertex i to vertex i+1; its half-plane has the outer normal.
  std::vector<HalfPlane> half_planes() const;
  /// Strict interior test with an absolute margin.
  bool contains(Vec2 x, double margin = 0.0) const;
  BoundingBox bounds() const;
  double diameter() const;
  Vec2 centroid() const;
  ConvexPolygon scaled(double t) const;

private:
  std::vector<Vec2> vertices_;
  std::string provenance_;
};

double area(const ConvexPolygon &omega);
double perimeter(const ConvexPolygon &omega);
/// Sum over edges of length * F(outer unit normal).
double perimeter_F(const ConvexPolygon &omega, const MinkowskiNorm &f);

/// lim_{k->inf} P_F(Omega_{a,k}) / |Omega_{a,k}| = 1 / (a F°(e1)). Emits a
/// warning on stderr when F(e1) F°(e1) = 1 fails beyond 1e-9.
double rect_ratio_limit(double a, const MinkowskiNorm &f);

/// Inner parallel body Omega minus rW: every edge half-plane is moved inward
/// by r F(n). Returns nullopt when the intersection has no interior.
std::optional<ConvexPolygon> erode(const ConvexPolygon &omega, const MinkowskiNorm &f, double r);

struct RollingBody {
  double area = 0.0;
  double perimeter_F = 0.0;
};

/// Area and anisotropic perimeter of (Omega minus rW) plus rW via the planar
/// mixed-volume identities. Throws std::domain_error on an empty erosion.
RollingBody rolling_body(const ConvexPolygon &omega, const MinkowskiNorm &f, double r);

/// Exact anisotropic inradius: the largest r with a nonempty erosion.
double inradius_F(const ConvexPolygon &omega, const MinkowskiNorm &f);

/// min over the segment [a, b] of F°(x - y), by golden-section search on
/// the convex restriction.
double segment_distance_F(Vec2 x, Vec2 a, Vec2 b, const MinkowskiNorm &polar);

/// Euclidean nearest point of the boundary.
Vec2 closest_boundary_point(const ConvexPolygon &omega, Vec2 x);

struct BoundaryDistance {
  double nearest = 0.0;
  double second = 0.0;  // next-nearest segment distance (+inf for none)
  int edge = -1;
};

/// d_F(x) = inf over the boundary of F°(x - y), minimized segment by segment.
/// Segments whose supporting-line distance already exceeds the running
/// second-best value are skipped; that bound is exact.
BoundaryDistance boundary_distance_F(const ConvexPolygon &omega, const MinkowskiNorm &f, Vec2 x);

}  // namespace aniso
