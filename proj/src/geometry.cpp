#include "aniso/geometry.hpp"

#include <algorithm>
#include <iostream>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

namespace aniso {
namespace {

double signed_area(const std::vector<Vec2> &v) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += cross(v[i], v[(i + 1) % v.size()]);
  return 0.5 * s;
}

double coordinate_scale(const std::vector<Vec2> &v) {
  double s = 1.0;
  for (const auto &p : v) s = std::max({s, std::abs(p.x), std::abs(p.y)});
  return s;
}

// Drops repeated and (numerically) collinear or reflex vertices until stable.
std::vector<Vec2> clean(std::vector<Vec2> v, double scale) {
  const double dup_tol = 1e-12 * scale;
  const double turn_tol = 1e-15 * scale * scale;
  bool changed = true;
  while (changed && v.size() >= 3) {
    changed = false;
    for (std::size_t i = 0; i < v.size() && v.size() >= 3; ++i) {
      const std::size_t n = v.size();
      const Vec2 prev = v[(i + n - 1) % n];
      const Vec2 cur = v[i];
      const Vec2 next = v[(i + 1) % n];
      if (euclid(cur - prev) <= dup_tol || cross(cur - prev, next - cur) <= turn_tol) {
        v.erase(v.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
        --i;
      }
    }
  }
  return v;
}

std::vector<Vec2> clip(const std::vector<Vec2> &poly, Vec2 normal, double offset) {
  std::vector<Vec2> out;
  out.reserve(poly.size() + 1);
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2 a = poly[i];
    const Vec2 b = poly[(i + 1) % poly.size()];
    const double da = dot(normal, a) - offset;
    const double db = dot(normal, b) - offset;
    if (da <= 0.0) out.push_back(a);
    if ((da < 0.0 && db > 0.0) || (da > 0.0 && db < 0.0)) {
      const double t = da / (da - db);
      out.push_back(a + (b - a) * t);
    }
  }
  return out;
}

}  // namespace

ConvexPolygon::ConvexPolygon(std::vector<Vec2> vertices, std::string provenance)
    : provenance_(std::move(provenance)) {
  if (vertices.size() < 3) throw std::invalid_argument("polygon needs at least 3 vertices");
  for (const auto &v : vertices) {
    if (!std::isfinite(v.x) || !std::isfinite(v.y)) throw std::invalid_argument("polygon vertex is not finite");
  }
  if (signed_area(vertices) < 0.0) std::reverse(vertices.begin(), vertices.end());
  const double scale = coordinate_scale(vertices);
  // Convexity is checked on the raw list first so that a reflex vertex is
  // reported rather than silently dropped by the cleanup pass.
  const std::size_t n = vertices.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 e0 = vertices[i] - vertices[(i + n - 1) % n];
    const Vec2 e1 = vertices[(i + 1) % n] - vertices[i];
    if (cross(e0, e1) < -1e-12 * scale * scale) {
      throw std::invalid_argument(fmt::format("polygon is not convex at vertex {}", i));
    }
  }
  vertices_ = clean(std::move(vertices), scale);
  if (vertices_.size() < 3 || signed_area(vertices_) <= 1e-14 * scale * scale) {
    throw std::invalid_argument("polygon is degenerate");
  }
}

ConvexPolygon ConvexPolygon::rectangle(double a, double k) {
  if (!(a > 0.0) || !(k > 0.0)) throw std::invalid_argument("rectangle needs a, k > 0");
  return ConvexPolygon({{-a, -k}, {a, -k}, {a, k}, {-a, k}}, fmt::format("rect:{},{}", a, k));
}

ConvexPolygon ConvexPolygon::regular(int n, double circumradius) {
  if (n < 3 || !(circumradius > 0.0)) throw std::invalid_argument("regular polygon needs n >= 3, R > 0");
  std::vector<Vec2> v;
  v.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double t = 2.0 * std::numbers::pi * i / n;
    v.push_back({circumradius * std::cos(t), circumradius * std::sin(t)});
  }
  return ConvexPolygon(std::move(v), fmt::format("regular:{},{}", n, circumradius));
}

ConvexPolygon ConvexPolygon::wulff(const MinkowskiNorm &f, double r, int n, Vec2 center) {
  auto w = wulff_polygon(f, r, center, n);
  return ConvexPolygon(std::move(w.vertices), fmt::format("wulff:{},{}", r, n));
}

std::vector<HalfPlane> ConvexPolygon::half_planes() const {
  std::vector<HalfPlane> out;
  out.reserve(vertices_.size());
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    const Vec2 a = vertices_[i];
    const Vec2 e = vertices_[(i + 1) % vertices_.size()] - a;
    const Vec2 n = Vec2{e.y, -e.x} / euclid(e);
    out.push_back({n, dot(n, a)});
  }
  return out;
}

bool ConvexPolygon::contains(Vec2 x, double margin) const {
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = vertices_[i];
    const Vec2 e = vertices_[(i + 1) % n] - a;
    // cross(e, x - a) / |e| is the signed distance to the left of the edge.
    if (cross(e, x - a) <= margin * euclid(e)) return false;
  }
  return true;
}

BoundingBox ConvexPolygon::bounds() const {
  BoundingBox b{vertices_.front(), vertices_.front()};
  for (const auto &v : vertices_) {
    b.min = {std::min(b.min.x, v.x), std::min(b.min.y, v.y)};
    b.max = {std::max(b.max.x, v.x), std::max(b.max.y, v.y)};
  }
  return b;
}

double ConvexPolygon::diameter() const {
  double d = 0.0;
  for (std::size_t i = 0; i < vertices_.size(); ++i)
    for (std::size_t j = i + 1; j < vertices_.size(); ++j) d = std::max(d, euclid(vertices_[i] - vertices_[j]));
  return d;
}

Vec2 ConvexPolygon::centroid() const {
  double a = 0.0;
  Vec2 c;
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    const Vec2 p = vertices_[i];
    const Vec2 q = vertices_[(i + 1) % vertices_.size()];
    const double w = cross(p, q);
    a += w;
    c = c + (p + q) * w;
  }
  return c / (3.0 * a);
}

ConvexPolygon ConvexPolygon::scaled(double t) const {
  if (!(t > 0.0)) throw std::invalid_argument("scale factor must be positive");
  std::vector<Vec2> v = vertices_;
  for (auto &p : v) p = p * t;
  return ConvexPolygon(std::move(v), fmt::format("{}*{}", provenance_, t));
}

double area(const ConvexPolygon &omega) { return signed_area(omega.vertices()); }

double perimeter(const ConvexPolygon &omega) {
  const auto &v = omega.vertices();
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += euclid(v[(i + 1) % v.size()] - v[i]);
  return s;
}

double perimeter_F(const ConvexPolygon &omega, const MinkowskiNorm &f) {
  const auto &v = omega.vertices();
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec2 e = v[(i + 1) % v.size()] - v[i];
    // length * F(e_perp / length) = F(e_perp) by homogeneity
    s += f.eval({e.y, -e.x});
  }
  return s;
}

double rect_ratio_limit(double a, const MinkowskiNorm &f) {
  const Vec2 e1{1.0, 0.0};
  const double polar_e1 = f.polar_eval(e1);
  const double alignment = f.eval(e1) * polar_e1;
  if (std::abs(alignment - 1.0) > 1e-9) {
    std::cerr << fmt::format("warning: F(e1)F°(e1) = {:.12g} != 1 for {}; slab limit is not 1/(aF°(e1))\n",
                             alignment, f.spec());
  }
  return 1.0 / (a * polar_e1);
}

std::optional<ConvexPolygon> erode(const ConvexPolygon &omega, const MinkowskiNorm &f, double r) {
  if (r < 0.0) throw std::invalid_argument("erosion radius must be nonnegative");
  if (r == 0.0) return omega;
  std::vector<Vec2> poly = omega.vertices();
  for (const auto &hp : omega.half_planes()) {
    poly = clip(poly, hp.normal, hp.offset - r * f.eval(hp.normal));
    if (poly.size() < 3) return std::nullopt;
  }
  const double scale = coordinate_scale(omega.vertices());
  poly = clean(std::move(poly), scale);
  if (poly.size() < 3 || signed_area(poly) <= 1e-13 * scale * scale) return std::nullopt;
  try {
    return ConvexPolygon(std::move(poly), fmt::format("erode({},{})", omega.provenance(), r));
  } catch (const std::invalid_argument &) {
    return std::nullopt;
  }
}

RollingBody rolling_body(const ConvexPolygon &omega, const MinkowskiNorm &f, double r) {
  const auto inner = erode(omega, f, r);
  if (!inner) throw std::domain_error(fmt::format("erosion of {} by {} is empty", omega.provenance(), r));
  const double kappa = f.wulff_area();
  const double inner_area = area(*inner);
  const double inner_per = perimeter_F(*inner, f);
  return {inner_area + r * inner_per + r * r * kappa, inner_per + 2.0 * r * kappa};
}

double inradius_F(const ConvexPolygon &omega, const MinkowskiNorm &f) {
  // Feasibility without erode()'s sliver rejection, which would bias R_F low
  // wherever the erosion collapses to a point.
  const auto planes = omega.half_planes();
  auto nonempty = [&](double r) {
    std::vector<Vec2> poly = omega.vertices();
    for (const auto &hp : planes) {
      poly = clip(poly, hp.normal, hp.offset - r * f.eval(hp.normal));
      if (poly.size() < 3) return false;
    }
    return signed_area(poly) > 0.0;
  };
  double lo = 0.0;
  double hi = omega.diameter() / f.coercivity().first;
  while (hi - lo > 1e-14 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (nonempty(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

double segment_distance_F(Vec2 x, Vec2 a, Vec2 b, const MinkowskiNorm &polar) {
  const Vec2 e = b - a;
  auto phi = [&](double t) { return polar.eval(x - (a + e * t)); };
  constexpr double inv_phi = 0.6180339887498949;
  double lo = 0.0;
  double hi = 1.0;
  double t1 = hi - inv_phi * (hi - lo);
  double t2 = lo + inv_phi * (hi - lo);
  double f1 = phi(t1);
  double f2 = phi(t2);
  while (hi - lo > 1e-12) {
    if (f1 <= f2) {
      hi = t2;
      t2 = t1;
      f2 = f1;
      t1 = hi - inv_phi * (hi - lo);
      f1 = phi(t1);
    } else {
      lo = t1;
      t1 = t2;
      f1 = f2;
      t2 = lo + inv_phi * (hi - lo);
      f2 = phi(t2);
    }
  }
  return std::min({f1, f2, phi(0.0), phi(1.0)});
}

Vec2 closest_boundary_point(const ConvexPolygon &omega, Vec2 x) {
  const auto &v = omega.vertices();
  Vec2 best = v.front();
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec2 a = v[i];
    const Vec2 e = v[(i + 1) % v.size()] - a;
    const double t = std::clamp(dot(x - a, e) / dot(e, e), 0.0, 1.0);
    const Vec2 y = a + e * t;
    const double d = euclid(x - y);
    if (d < best_d) {
      best_d = d;
      best = y;
    }
  }
  return best;
}

BoundaryDistance boundary_distance_F(const ConvexPolygon &omega, const MinkowskiNorm &f, Vec2 x) {
  const auto &v = omega.vertices();
  const std::size_t n = v.size();
  const MinkowskiNorm polar = f.polar();
  // Distance to each supporting line is a lower bound for the segment distance.
  std::vector<double> line(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 e = v[(i + 1) % n] - v[i];
    const Vec2 nrm{e.y, -e.x};
    line[i] = dot(nrm, v[i] - x) / f.eval(nrm);
  }
  BoundaryDistance out;
  out.nearest = std::numeric_limits<double>::infinity();
  out.second = std::numeric_limits<double>::infinity();
  auto consider = [&](std::size_t i) {
    const double d = segment_distance_F(x, v[i], v[(i + 1) % n], polar);
    if (d < out.nearest) {
      out.second = out.nearest;
      out.nearest = d;
      out.edge = static_cast<int>(i);
    } else if (d < out.second) {
      out.second = d;
    }
  };
  std::size_t first = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (line[i] < line[first]) first = i;
  std::size_t runner = first == 0 ? 1 : 0;
  for (std::size_t i = 0; i < n; ++i)
    if (i != first && line[i] < line[runner]) runner = i;
  consider(first);
  consider(runner);
  for (std::size_t i = 0; i < n; ++i) {
    if (i != first && i != runner && line[i] < out.second) consider(i);
  }
  return out;
}

}  // namespace aniso
