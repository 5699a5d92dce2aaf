#include "aniso/norms.hpp"

#include <algorithm>
#include <charconv>
#include <numbers>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

#include "quadrature.hpp"
#include "text.hpp"

namespace aniso {

MinkowskiNorm MinkowskiNorm::lq(double q) {
  if (!(q > 1.0) || !std::isfinite(q)) {
    throw std::invalid_argument(fmt::format("lq norm needs 1 < q < inf, got {}", q));
  }
  return MinkowskiNorm(Family::lq, q, Sym2{});
}

MinkowskiNorm MinkowskiNorm::ellipse(double a11, double a12, double a22) {
  const Sym2 a{a11, a12, a22};
  if (!(a11 > 0.0) || !(a.det() > 0.0)) {
    throw std::invalid_argument(
        fmt::format("ellipse norm needs a positive-definite matrix, got ({}, {}, {})", a11, a12, a22));
  }
  return MinkowskiNorm(Family::ellipse, 0.0, a);
}

MinkowskiNorm MinkowskiNorm::parse(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw std::invalid_argument(fmt::format("bad norm spec '{}'", text));
  }
  const auto kind = text.substr(0, colon);
  const auto args = detail::parse_numbers(text.substr(colon + 1), ',');
  if (kind == "lq" && args.size() == 1) return lq(args[0]);
  if (kind == "ellipse" && args.size() == 3) return ellipse(args[0], args[1], args[2]);
  throw std::invalid_argument(fmt::format("bad norm spec '{}'", text));
}

std::string MinkowskiNorm::spec() const {
  if (family_ == Family::lq) return fmt::format("lq:{}", q_);
  return fmt::format("ellipse:{},{},{}", a_.a11, a_.a12, a_.a22);
}

double MinkowskiNorm::value_and_grad(Vec2 g, Vec2 &grad_out) const {
  if (family_ == Family::ellipse || q_ == 2.0) {
    const Vec2 ag = family_ == Family::ellipse ? a_.apply(g) : g;
    const double s = dot(g, ag);
    if (s <= 0.0) {
      grad_out = {};
      return 0.0;
    }
    const double f = std::sqrt(s);
    grad_out = ag / f;
    return f;
  }
  const double ax = std::abs(g.x);
  const double ay = std::abs(g.y);
  if (ax == 0.0 && ay == 0.0) {
    grad_out = {};
    return 0.0;
  }
  if (q_ == 4.0) {
    const double x3 = g.x * g.x * g.x;
    const double y3 = g.y * g.y * g.y;
    const double f = std::sqrt(std::sqrt(x3 * g.x + y3 * g.y));
    const double f3 = f * f * f;
    grad_out = {x3 / f3, y3 / f3};
    return f;
  }
  // Scale by the larger component to keep pow() in range.
  const double m = std::max(ax, ay);
  const double rx = ax / m;
  const double ry = ay / m;
  const double px = std::pow(rx, q_);
  const double py = std::pow(ry, q_);
  const double s = px + py;
  const double fr = std::pow(s, 1.0 / q_);
  // d/dx_i = sign(x_i) (|x_i| / F)^{q-1}
  const double gx = rx > 0.0 ? std::copysign(std::pow(rx / fr, q_ - 1.0), g.x) : 0.0;
  const double gy = ry > 0.0 ? std::copysign(std::pow(ry / fr, q_ - 1.0), g.y) : 0.0;
  grad_out = {gx, gy};
  return m * fr;
}

double MinkowskiNorm::eval(Vec2 xi) const {
  Vec2 unused;
  return value_and_grad(xi, unused);
}

Vec2 MinkowskiNorm::grad(Vec2 xi) const {
  if (xi.x == 0.0 && xi.y == 0.0) {
    throw std::invalid_argument("norm gradient is undefined at the origin");
  }
  Vec2 g;
  value_and_grad(xi, g);
  return g;
}

MinkowskiNorm MinkowskiNorm::polar() const {
  if (family_ == Family::lq) return MinkowskiNorm(Family::lq, q_ / (q_ - 1.0), Sym2{});
  return MinkowskiNorm(Family::ellipse, 0.0, a_.inverse());
}

std::pair<double, double> MinkowskiNorm::coercivity() const {
  if (family_ == Family::lq) {
    const double c = std::pow(2.0, 1.0 / q_ - 0.5);
    return q_ >= 2.0 ? std::pair{c, 1.0} : std::pair{1.0, c};
  }
  const double mean = 0.5 * (a_.a11 + a_.a22);
  const double disc = std::sqrt(0.25 * (a_.a11 - a_.a22) * (a_.a11 - a_.a22) + a_.a12 * a_.a12);
  return {std::sqrt(mean - disc), std::sqrt(mean + disc)};
}

double MinkowskiNorm::wulff_area() const {
  if (family_ == Family::ellipse) return std::numbers::pi * std::sqrt(a_.det());
  // Unit ball of l^s with s the conjugate exponent.
  const double s = q_ / (q_ - 1.0);
  const double g1 = std::tgamma(1.0 + 1.0 / s);
  return 4.0 * g1 * g1 / std::tgamma(1.0 + 2.0 / s);
}

bool MinkowskiNorm::axis_aligned() const {
  return family_ == Family::lq || a_.a12 == 0.0;
}

double MinkowskiNorm::power_and_grad(Vec2 g, double p, double eps, Vec2 &grad_out) const {
  Vec2 dn;
  const double f = value_and_grad(g, dn);
  if (f == 0.0) {
    grad_out = {};
    return 0.0;
  }
  double fe = f;
  double chain = 1.0;
  if (eps > 0.0) {
    const double r = std::sqrt(f * f + eps * eps);
    fe = r - eps;
    chain = f / r;
  }
  double fp;
  double fp1;
  if (p == 2.0) {
    fp1 = fe;
    fp = fe * fe;
  } else {
    fp1 = std::pow(fe, p - 1.0);
    fp = fp1 * fe;
  }
  grad_out = dn * (p * fp1 * chain);
  return fp;
}

double MinkowskiNorm::power(Vec2 g, double p, double eps) const {
  double f = eval(g);
  if (eps > 0.0) f = std::sqrt(f * f + eps * eps) - eps;
  return p == 2.0 ? f * f : std::pow(f, p);
}

double pi_p(double p) {
  if (!(p > 1.0)) throw std::invalid_argument(fmt::format("pi_p needs p > 1, got {}", p));
  if (p == 2.0) return std::numbers::pi;
  return 2.0 * std::numbers::pi * std::pow(p - 1.0, 1.0 / p) / (p * std::sin(std::numbers::pi / p));
}

double pi_p_quadrature(double p) {
  if (!(p > 1.0)) throw std::invalid_argument(fmt::format("pi_p needs p > 1, got {}", p));
  return 2.0 * std::pow(p - 1.0, 1.0 / p) * detail::singular_tail_integral(p, 0.0);
}

namespace detail {

namespace {

struct TailIntegrand {
  double p;
  double q;
  double operator()(double z) const {
    if (z <= 0.0) return q * std::pow(p, -1.0 / p);
    const double zq = std::pow(z, q);
    // 1 - (1 - z^q)^p without cancellation
    const double gap = -std::expm1(p * std::log1p(-zq));
    return q * std::pow(z, q - 1.0) * std::pow(gap, -1.0 / p);
  }
};

// Adaptive refinement is only needed on pieces touching z = 0, where the
// integrand is a non-smooth function of z^q. Short interior pieces get a
// single 31-point rule (adaptive refinement stalls on them).
double integrate_z(double p, double a, double b, bool adaptive) {
  using boost::math::quadrature::gauss_kronrod;
  return gauss_kronrod<double, 31>::integrate(TailIntegrand{p, p / (p - 1.0)}, a, b, adaptive ? 15 : 0, 1e-12);
}

double z_of(double p, double s) { return std::pow(1.0 - std::clamp(s, 0.0, 1.0), (p - 1.0) / p); }

}  // namespace

double singular_tail_integral(double p, double s) {
  if (s >= 1.0) return 0.0;
  return integrate_z(p, 0.0, z_of(p, s), true);
}

std::vector<double> singular_tail_integrals(double p, const std::vector<double> &s) {
  std::vector<std::size_t> order(s.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return s[a] > s[b]; });
  std::vector<double> out(s.size(), 0.0);
  double z_prev = 0.0;
  double acc = 0.0;
  for (const auto i : order) {
    const double z = z_of(p, s[i]);
    if (z > z_prev) {
      acc += integrate_z(p, z_prev, z, z_prev == 0.0 || z - z_prev > 0.05);
      z_prev = z;
    }
    out[i] = acc;
  }
  return out;
}

}  // namespace detail

WulffPolygon wulff_polygon(const MinkowskiNorm &f, double r, Vec2 center, int n) {
  if (n < 16) throw std::invalid_argument(fmt::format("wulff polygon needs n >= 16, got {}", n));
  if (!(r > 0.0)) throw std::invalid_argument(fmt::format("wulff radius must be positive, got {}", r));
  WulffPolygon w;
  w.radius = r;
  w.center = center;
  w.vertices.reserve(static_cast<std::size_t>(n));
  const MinkowskiNorm polar = f.polar();
  for (int i = 0; i < n; ++i) {
    const double theta = 2.0 * std::numbers::pi * i / n;
    const Vec2 dir{std::cos(theta), std::sin(theta)};
    w.vertices.push_back(center + dir * (r / polar.eval(dir)));
  }
  return w;
}

}  // namespace aniso
