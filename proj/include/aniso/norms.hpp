#pragma once

#include <cmath>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace aniso {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
  constexpr bool operator==(const Vec2 &) const = default;
};

constexpr Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double euclid(Vec2 v) { return std::hypot(v.x, v.y); }

/// Symmetric 2x2 matrix [[a11, a12], [a12, a22]].
struct Sym2 {
  double a11 = 1.0;
  double a12 = 0.0;
  double a22 = 1.0;

  double det() const { return a11 * a22 - a12 * a12; }
  Vec2 apply(Vec2 v) const { return {a11 * v.x + a12 * v.y, a12 * v.x + a22 * v.y}; }
  double quad(Vec2 v) const { return dot(v, apply(v)); }
  Sym2 inverse() const {
    const double d = det();
    return {a22 / d, -a12 / d, a11 / d};
  }
  bool operator==(const Sym2 &) const = default;
};

/// Even, convex, 1-homogeneous gauge on R^2. Two closed-form families are
/// supported: the l^q norms and the quadratic (ellipse) norms sqrt(<A xi, xi>).
/// Both have closed-form polars, so F° never needs a numeric sup.
class MinkowskiNorm {
public:
  enum class Family { lq, ellipse };

  static MinkowskiNorm lq(double q);
  static MinkowskiNorm ellipse(double a11, double a12, double a22);
  static MinkowskiNorm ellipse(Sym2 a) { return ellipse(a.a11, a.a12, a.a22); }
  /// Parses `lq:<q>` or `ellipse:<a11>,<a12>,<a22>`.
  static MinkowskiNorm parse(std::string_view text);

  Family family() const { return family_; }
  /// Exponent q of the l^q family (0 for ellipses).
  double exponent() const { return q_; }
  /// Matrix of the ellipse family (identity for l^q).
  const Sym2 &matrix() const { return a_; }

  /// Canonical textual form; `parse(spec())` reproduces this norm exactly.
  std::string spec() const;

  double operator()(Vec2 xi) const { return eval(xi); }
  double eval(Vec2 xi) const;
  /// Gradient F_xi. Throws std::invalid_argument at xi = 0.
  Vec2 grad(Vec2 xi) const;

  double polar_eval(Vec2 eta) const { return polar().eval(eta); }
  Vec2 polar_grad(Vec2 eta) const { return polar().grad(eta); }
  /// F° as a norm of the same family.
  MinkowskiNorm polar() const;

  /// Constants a, b with a|xi| <= F(xi) <= b|xi|.
  std::pair<double, double> coercivity() const;

  /// kappa_2 = |W|, the area of {F° < 1}.
  double wulff_area() const;

  /// True when F(e1)F°(e1) = 1 and F(e2)F°(e2) = 1 hold exactly, i.e. the
  /// coordinate axes are principal directions of the gauge.
  bool axis_aligned() const;

  /// F_eps(g)^p with F_eps = sqrt(F^2 + eps^2) - eps, and its gradient in g.
  /// Returns zero gradient at g = 0. This is the inner kernel of the solvers.
  double power_and_grad(Vec2 g, double p, double eps, Vec2 &grad_out) const;
  double power(Vec2 g, double p, double eps) const;

  bool operator==(const MinkowskiNorm &o) const {
    return family_ == o.family_ && q_ == o.q_ && a_ == o.a_;
  }

private:
  MinkowskiNorm(Family f, double q, Sym2 a) : family_(f), q_(q), a_(a) {}

  // F(g) and grad F(g); grad is zero at g = 0.
  double value_and_grad(Vec2 g, Vec2 &grad_out) const;

  Family family_;
  double q_;
  Sym2 a_;
};

/// Generalized pi: 2 pi (p-1)^{1/p} / (p sin(pi/p)). Throws for p <= 1.
double pi_p(double p);

/// Integral 2 * int_0^{(p-1)^{1/p}} [1 - t^p/(p-1)]^{-1/p} dt evaluated by
/// adaptive Gauss-Kronrod after removing the endpoint singularity.
double pi_p_quadrature(double p);

struct WulffPolygon {
  std::vector<Vec2> vertices;  // CCW, on {F°(x - center) = radius}
  double radius = 1.0;
  Vec2 center{};
};

/// Polygon with n vertices at angles 2 pi i / n, each scaled onto the
/// boundary of the Wulff shape of radius r. Requires n >= 16 and r > 0.
WulffPolygon wulff_polygon(const MinkowskiNorm &f, double r, Vec2 center, int n);

}  // namespace aniso
