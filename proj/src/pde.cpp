#include "aniso/pde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "quadrature.hpp"

namespace aniso {
namespace {

std::vector<std::shared_ptr<const Grid>> grid_hierarchy(const ConvexPolygon &omega, double h, bool multilevel) {
  std::vector<std::shared_ptr<const Grid>> levels{Grid::cover(omega, h)};
  if (!multilevel) return levels;
  const BoundingBox box = omega.bounds();
  const double short_side = std::min(box.width(), box.height());
  double hc = 2.0 * h;
  while (levels.size() < 6 && short_side / hc >= 16.0) {
    levels.push_back(Grid::cover(omega, hc, 8));
    hc *= 2.0;
  }
  std::reverse(levels.begin(), levels.end());
  return levels;
}

// Product of distances to the bounding box: positive inside, zero on its edges.
std::vector<double> box_seed(const Grid &g, const BoundingBox &box) {
  std::vector<double> u(g.size(), 0.0);
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) {
      const auto k = g.index(i, j);
      if (!g.interior(k)) continue;
      const Vec2 x = g.node(i, j);
      u[k] = (x.x - box.min.x) * (box.max.x - x.x) * (x.y - box.min.y) * (box.max.y - x.y);
    }
  return u;
}

struct LevelSolve {
  std::shared_ptr<const Grid> grid;
  QuotientResult result;
  int iterations = 0;
};

LevelSolve solve_levels(const ConvexPolygon &omega, const MinkowskiNorm &f, double p, double h, Denominator kind,
                        const SolveOptions &opts, const char *what) {
  const auto levels = grid_hierarchy(omega, h, opts.multilevel);
  const double eps = 1e-8 / omega.diameter();
  std::vector<double> u = box_seed(*levels.front(), omega.bounds());
  LevelSolve out;
  for (std::size_t l = 0; l < levels.size(); ++l) {
    const bool finest = l + 1 == levels.size();
    if (l > 0) u = prolongate(*levels[l - 1], u, *levels[l]);
    P1Energy energy(levels[l], f, p, eps);
    QuotientOptions qo;
    qo.tol = finest ? opts.tol : std::max(opts.tol, 1e-6);
    qo.max_iterations = opts.max_iterations;
    auto r = minimize_quotient(energy, kind, std::move(u), qo);
    out.iterations += r.iterations;
    if (!r.converged) {
      throw ConvergenceError(fmt::format("{} solver did not converge on {} (p={}, {}, h={}) after {} iterations; "
                                         "window decrease {:.3g}",
                                         what, omega.provenance(), p, f.spec(), levels[l]->h(), r.iterations,
                                         r.residual));
    }
    u = std::move(r.u);
    if (finest) {
      out.result = std::move(r);
      out.result.u = std::move(u);
      out.grid = levels[l];
    }
  }
  return out;
}

}  // namespace

EigenResult solve_eigen(const ConvexPolygon &omega, const MinkowskiNorm &f, double p, double h,
                        const SolveOptions &opts) {
  if (!(p > 1.0)) throw std::invalid_argument(fmt::format("exponent p must exceed 1, got {}", p));
  if (!(opts.tol > 0.0)) throw std::invalid_argument("solver tolerance must be positive");
  auto solved = solve_levels(omega, f, p, h, Denominator::lp_mass, opts, "eigenvalue");
  auto &u = solved.result.u;
  const Grid &g = *solved.grid;
  double m = 0.0;
  for (double v : u) m = std::max(m, v);
  for (auto &v : u) v /= m;

  EigenResult e;
  const P1Energy energy(solved.grid, f, p, 0.0);
  e.lambda = energy.value(u) / denominator_value(g, Denominator::lp_mass, p, u);
  e.u = GridField{solved.grid, std::move(u)};
  e.iterations = solved.iterations;
  e.residual = solved.result.residual;
  e.p = p;
  e.h = h;
  e.norm = f.spec();
  e.domain = omega.provenance();
  return e;
}

TorsionResult solve_torsion(const ConvexPolygon &omega, const MinkowskiNorm &f, double p, double h,
                            const SolveOptions &opts) {
  if (!(p > 1.0)) throw std::invalid_argument(fmt::format("exponent p must exceed 1, got {}", p));
  if (!(opts.tol > 0.0)) throw std::invalid_argument("solver tolerance must be positive");
  auto solved = solve_levels(omega, f, p, h, Denominator::l1_power, opts, "torsion");
  auto &psi = solved.result.u;
  const Grid &g = *solved.grid;
  const P1Energy energy(solved.grid, f, p, 0.0);
  const double e = energy.value(psi);
  double l = 0.0;
  for (std::size_t k = 0; k < psi.size(); ++k)
    if (g.interior(k)) l += g.mass(k) * psi[k];
  // argmin_t (t^p/p) E - t L
  const double scale = std::pow(l / e, 1.0 / (p - 1.0));
  for (auto &v : psi) v *= scale;

  TorsionResult t;
  t.torsion = scale * l;
  t.dual_energy = std::pow(scale, p) * e;
  t.v = GridField{solved.grid, std::move(psi)};
  t.max_value = t.v.max_interior();
  t.iterations = solved.iterations;
  t.residual = solved.result.residual;
  t.p = p;
  t.h = h;
  return t;
}

PFunction p_function(const EigenResult &e, const MinkowskiNorm &f) {
  const Grid &g = *e.u.grid;
  const auto &u = e.u.values;
  const double p = e.p;
  const double m = e.u.max_interior();
  PFunction out;
  out.values = GridField{e.u.grid, std::vector<double>(g.size(), 0.0)};
  out.max_interior = -std::numeric_limits<double>::infinity();
  out.min_interior = std::numeric_limits<double>::infinity();
  const double inv_2h = 0.5 / g.h();
  for (int j = 1; j + 1 < g.ny(); ++j) {
    for (int i = 1; i + 1 < g.nx(); ++i) {
      if (!g.deep_interior(i, j)) continue;
      const auto k = g.index(i, j);
      const Vec2 grad{(u[g.index(i + 1, j)] - u[g.index(i - 1, j)]) * inv_2h,
                      (u[g.index(i, j + 1)] - u[g.index(i, j - 1)]) * inv_2h};
      const double val =
          (p - 1.0) * f.power(grad, p, 0.0) + e.lambda * (std::pow(u[k] / m, p) - 1.0) * std::pow(m, p);
      out.values.values[k] = val;
      out.max_interior = std::max(out.max_interior, val);
      out.min_interior = std::min(out.min_interior, val);
      ++out.evaluated;
    }
  }
  return out;
}

double phi_function(double p, double s) {
  if (!(p > 1.0)) throw std::invalid_argument("phi needs p > 1");
  const double q = p / (p - 1.0);
  s = std::clamp(s, 0.0, 1.0);
  const double inner = std::pow(p - 1.0, 1.0 / p) * detail::singular_tail_integral(p, s);
  return std::pow(0.5 * pi_p(p), q) - std::pow(inner, q);
}

PhiCheck phi_check(const EigenResult &e, const TorsionResult &t) {
  if (e.u.grid.get() != t.v.grid.get() &&
      (e.u.grid->nx() != t.v.grid->nx() || e.u.grid->ny() != t.v.grid->ny() || e.u.grid->h() != t.v.grid->h())) {
    throw std::invalid_argument("phi_check needs eigenfunction and torsion function on the same grid");
  }
  const double p = e.p;
  const double q = p / (p - 1.0);
  const double coef = q * std::pow(e.lambda, 1.0 / (p - 1.0));
  const Grid &g = *e.u.grid;
  std::vector<double> s;
  std::vector<std::size_t> nodes;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (!g.interior(k)) continue;
    s.push_back(e.u.values[k]);
    nodes.push_back(k);
  }
  const auto tails = detail::singular_tail_integrals(p, s);
  const double scale = std::pow(p - 1.0, 1.0 / p);
  const double top = std::pow(0.5 * pi_p(p), q);
  PhiCheck out;
  out.max_violation = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double lhs = top - std::pow(scale * tails[i], q);
    out.max_violation = std::max(out.max_violation, lhs - coef * t.v.values[nodes[i]]);
  }
  out.payne_lhs = std::pow((p - 1.0) / p, p - 1.0) * std::pow(0.5 * pi_p(p), p);
  out.payne_rhs = e.lambda * std::pow(t.max_value, p - 1.0);
  return out;
}

double efficiency_ratio(const EigenResult &e, double domain_area) {
  const double p = e.p;
  const double integral = e.u.integrate([p](double v) { return std::pow(std::max(v, 0.0), p - 1.0); });
  return std::pow(integral / domain_area, 1.0 / (p - 1.0)) / e.u.max_interior();
}

double mass_bound_check(const EigenResult &e, double domain_area) {
  const double p = e.p;
  const double integral = e.u.integrate([p](double v) { return std::pow(std::abs(v), p); });
  return p * integral / (std::pow(e.u.max_interior(), p) * domain_area);
}

}  // namespace aniso
