#include "aniso/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>

#include <fftw3.h>
#include <fmt/format.h>

namespace aniso {

P1Energy::P1Energy(std::shared_ptr<const Grid> grid, MinkowskiNorm norm, double p, double eps)
    : grid_(std::move(grid)), norm_(std::move(norm)), p_(p), eps_(eps) {
  if (!(p > 1.0)) throw std::invalid_argument(fmt::format("exponent p must exceed 1, got {}", p));
  const Grid &g = *grid_;
  for (int j = 0; j + 1 < g.ny(); ++j) {
    for (int i = 0; i + 1 < g.nx(); ++i) {
      if (!(g.interior(i, j) || g.interior(i + 1, j) || g.interior(i, j + 1) || g.interior(i + 1, j + 1))) continue;
      const auto tris = g.cell_triangles(i, j);
      bool moved = false;
      for (const auto &t : tris)
        for (const auto k : t) moved = moved || g.snapped(k);
      if (!moved) {
        cells_.push_back(static_cast<std::uint32_t>(g.index(i, j)));
        continue;
      }
      for (const auto &t : tris) {
        if (!(g.interior(t[0]) || g.interior(t[1]) || g.interior(t[2]))) continue;
        const Vec2 e1 = g.position(t[1]) - g.position(t[0]);
        const Vec2 e2 = g.position(t[2]) - g.position(t[0]);
        const double det = cross(e1, e2);
        Triangle tri;
        for (int a = 0; a < 3; ++a) tri.v[a] = static_cast<std::uint32_t>(t[a]);
        tri.c1 = Vec2{e2.y, -e2.x} / det;
        tri.c2 = Vec2{-e1.y, e1.x} / det;
        tri.area = 0.5 * det;
        deformed_.push_back(tri);
      }
    }
  }
}

std::pair<double, double> P1Energy::axis_weights() const {
  const double fx = norm_.eval({1.0, 0.0});
  const double fy = norm_.eval({0.0, 1.0});
  return {fx * fx, fy * fy};
}

double P1Energy::value_with_eps(const std::vector<double> &u, double eps) const {
  const Grid &g = *grid_;
  const std::size_t nx = static_cast<std::size_t>(g.nx());
  const double inv_h = 1.0 / g.h();
  double e = 0.0;
  for (const auto c : cells_) {
    const double u00 = u[c];
    const double u10 = u[c + 1];
    const double u01 = u[c + nx];
    const double u11 = u[c + nx + 1];
    e += norm_.power({(u10 - u00) * inv_h, (u01 - u00) * inv_h}, p_, eps);
    e += norm_.power({(u11 - u01) * inv_h, (u11 - u10) * inv_h}, p_, eps);
  }
  e *= 0.5 * g.h() * g.h();
  for (const auto &t : deformed_) {
    const double u0 = u[t.v[0]];
    e += t.area * norm_.power(t.c1 * (u[t.v[1]] - u0) + t.c2 * (u[t.v[2]] - u0), p_, eps);
  }
  return e;
}

double P1Energy::value(const std::vector<double> &u) const { return value_with_eps(u, eps_); }

double P1Energy::value_and_gradient(const std::vector<double> &u, std::vector<double> &grad) const {
  const Grid &g = *grid_;
  const std::size_t nx = static_cast<std::size_t>(g.nx());
  const double inv_h = 1.0 / g.h();
  const double area = 0.5 * g.h() * g.h();
  const double w = area * inv_h;
  grad.assign(u.size(), 0.0);
  double e = 0.0;
  Vec2 d;
  for (const auto c : cells_) {
    const double u00 = u[c];
    const double u10 = u[c + 1];
    const double u01 = u[c + nx];
    const double u11 = u[c + nx + 1];
    e += norm_.power_and_grad({(u10 - u00) * inv_h, (u01 - u00) * inv_h}, p_, eps_, d);
    grad[c] -= w * (d.x + d.y);
    grad[c + 1] += w * d.x;
    grad[c + nx] += w * d.y;
    e += norm_.power_and_grad({(u11 - u01) * inv_h, (u11 - u10) * inv_h}, p_, eps_, d);
    grad[c + nx + 1] += w * (d.x + d.y);
    grad[c + nx] -= w * d.x;
    grad[c + 1] -= w * d.y;
  }
  e *= area;
  for (const auto &t : deformed_) {
    const double u0 = u[t.v[0]];
    e += t.area * norm_.power_and_grad(t.c1 * (u[t.v[1]] - u0) + t.c2 * (u[t.v[2]] - u0), p_, eps_, d);
    const double g1 = t.area * dot(d, t.c1);
    const double g2 = t.area * dot(d, t.c2);
    grad[t.v[0]] -= g1 + g2;
    grad[t.v[1]] += g1;
    grad[t.v[2]] += g2;
  }
  const auto &mask = g.mask();
  for (std::size_t k = 0; k < grad.size(); ++k)
    if (!mask[k]) grad[k] = 0.0;
  return e;
}

double denominator_value(const Grid &g, Denominator kind, double p, const std::vector<double> &u) {
  double s = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (!g.interior(k)) continue;
    s += g.mass(k) * (kind == Denominator::lp_mass ? std::pow(std::abs(u[k]), p) : u[k]);
  }
  return kind == Denominator::lp_mass ? s : std::pow(std::max(s, 0.0), p);
}

namespace {

std::mutex &fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

struct BoxPreconditioner::Impl {
  std::shared_ptr<const Grid> grid;
  int mx = 0;  // interior box nodes per row
  int my = 0;
  double *buf = nullptr;
  fftw_plan plan = nullptr;
  std::vector<double> inv_symbol;

  ~Impl() {
    std::lock_guard lock(fftw_planner_mutex());
    if (plan) fftw_destroy_plan(plan);
    if (buf) fftw_free(buf);
  }
};

BoxPreconditioner::BoxPreconditioner(std::shared_ptr<const Grid> grid, double wx, double wy)
    : impl_(std::make_unique<Impl>()) {
  impl_->grid = std::move(grid);
  const Grid &g = *impl_->grid;
  impl_->mx = g.nx() - 2;
  impl_->my = g.ny() - 2;
  if (impl_->mx < 1 || impl_->my < 1) throw std::invalid_argument("grid too small for the preconditioner");
  const std::size_t n = static_cast<std::size_t>(impl_->mx) * impl_->my;
  {
    std::lock_guard lock(fftw_planner_mutex());
    impl_->buf = fftw_alloc_real(n);
    impl_->plan = fftw_plan_r2r_2d(impl_->my, impl_->mx, impl_->buf, impl_->buf, FFTW_RODFT00, FFTW_RODFT00,
                                   FFTW_ESTIMATE);
  }
  // Unnormalized RODFT00 applied twice scales by 2(m+1) per axis.
  const double norm = 4.0 * (impl_->mx + 1) * (impl_->my + 1);
  impl_->inv_symbol.resize(n);
  for (int l = 0; l < impl_->my; ++l) {
    const double sy = 2.0 - 2.0 * std::cos(std::numbers::pi * (l + 1) / (impl_->my + 1));
    for (int k = 0; k < impl_->mx; ++k) {
      const double sx = 2.0 - 2.0 * std::cos(std::numbers::pi * (k + 1) / (impl_->mx + 1));
      impl_->inv_symbol[static_cast<std::size_t>(l) * impl_->mx + k] = 1.0 / ((wx * sx + wy * sy) * norm);
    }
  }
}

BoxPreconditioner::~BoxPreconditioner() = default;

void BoxPreconditioner::apply(const std::vector<double> &r, std::vector<double> &z) {
  const Grid &g = *impl_->grid;
  const int mx = impl_->mx;
  const int my = impl_->my;
  double *buf = impl_->buf;
  for (int j = 0; j < my; ++j)
    for (int i = 0; i < mx; ++i) {
      const auto k = g.index(i + 1, j + 1);
      buf[static_cast<std::size_t>(j) * mx + i] = g.interior(k) ? r[k] : 0.0;
    }
  fftw_execute_r2r(impl_->plan, buf, buf);
  const std::size_t n = impl_->inv_symbol.size();
  for (std::size_t k = 0; k < n; ++k) buf[k] *= impl_->inv_symbol[k];
  fftw_execute_r2r(impl_->plan, buf, buf);
  z.assign(r.size(), 0.0);
  for (int j = 0; j < my; ++j)
    for (int i = 0; i < mx; ++i) {
      const auto k = g.index(i + 1, j + 1);
      if (g.interior(k)) z[k] = buf[static_cast<std::size_t>(j) * mx + i];
    }
}

namespace {

double dot_interior(const std::vector<double> &a, const std::vector<double> &b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

double max_abs(const std::vector<double> &a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

// Quotient Q = E/D and its gradient (E' - Q D')/D.
class Quotient {
public:
  Quotient(const P1Energy &energy, Denominator kind) : energy_(energy), kind_(kind) {}

  double operator()(const std::vector<double> &u, std::vector<double> &grad) {
    const Grid &g = energy_.grid();
    const double p = energy_.p();
    const double e = energy_.value_and_gradient(u, grad);
    double s = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
      if (!g.interior(k)) continue;
      s += g.mass(k) * (kind_ == Denominator::lp_mass ? std::pow(std::abs(u[k]), p) : u[k]);
    }
    if (!(s > 0.0)) return std::numeric_limits<double>::infinity();
    const double d = kind_ == Denominator::lp_mass ? s : std::pow(s, p);
    const double q = e / d;
    const double inv_d = 1.0 / d;
    if (kind_ == Denominator::lp_mass) {
      const double c = q * p;
      for (std::size_t k = 0; k < u.size(); ++k) {
        if (!g.interior(k)) continue;
        const double a = std::abs(u[k]);
        const double dd = p == 2.0 ? u[k] : std::copysign(std::pow(a, p - 1.0), u[k]);
        grad[k] = (grad[k] - c * g.mass(k) * dd) * inv_d;
      }
    } else {
      const double dd = p * std::pow(s, p - 1.0);
      for (std::size_t k = 0; k < u.size(); ++k) {
        if (!g.interior(k)) continue;
        grad[k] = (grad[k] - q * dd * g.mass(k)) * inv_d;
      }
    }
    return q;
  }

private:
  const P1Energy &energy_;
  Denominator kind_;
};

struct Point {
  std::vector<double> u;
  std::vector<double> grad;
  double q = 0.0;
};

}  // namespace

QuotientResult minimize_quotient(const P1Energy &energy, Denominator kind, std::vector<double> start,
                                 const QuotientOptions &opts) {
  const Grid &g = energy.grid();
  const auto [wx, wy] = energy.axis_weights();
  BoxPreconditioner precond(energy.grid_ptr(), wx, wy);
  Quotient quotient(energy, kind);

  for (std::size_t k = 0; k < start.size(); ++k) {
    if (!g.interior(k)) start[k] = 0.0;
    else if (opts.clamp_nonnegative) start[k] = std::max(start[k], 0.0);
  }
  {
    const double m = max_abs(start);
    if (!(m > 0.0)) throw std::invalid_argument("quotient minimization needs a nonzero start");
    for (auto &v : start) v /= m;
  }

  Point cur;
  cur.u = std::move(start);
  cur.q = quotient(cur.u, cur.grad);
  std::vector<double> z;
  precond.apply(cur.grad, z);
  std::vector<double> dir(z.size());
  for (std::size_t k = 0; k < z.size(); ++k) dir[k] = -z[k];
  double gz = dot_interior(cur.grad, z);

  std::vector<double> history{cur.q};
  QuotientResult res;
  double prev_q = std::numeric_limits<double>::quiet_NaN();
  double last_step = 0.0;
  Point trial;
  Point best;

  for (int it = 1; it <= opts.max_iterations; ++it) {
    double slope = dot_interior(cur.grad, dir);
    if (!(slope < 0.0)) {
      for (std::size_t k = 0; k < z.size(); ++k) dir[k] = -z[k];
      slope = -gz;
      if (!(slope < 0.0)) {
        res.converged = true;
        break;
      }
    }
    // Initial step from the quadratic model of the last decrease.
    double t;
    const double dmax = max_abs(dir);
    // Trust region: one step may not move any node by more than max |u|.
    // Besides safety, this keeps the iterate away from the scale where the
    // eps-regularization stops being negligible.
    const double t_max = max_abs(cur.u) / dmax;
    if (std::isnan(prev_q) || !(prev_q > cur.q)) {
      t = last_step > 0.0 ? last_step : 0.05 / dmax;
    } else {
      t = std::min(2.02 * (cur.q - prev_q) / slope, 0.5 / dmax);
      if (!(t > 0.0)) t = last_step > 0.0 ? last_step : 0.05 / dmax;
    }
    t = std::min(t, t_max);

    // Bracketing secant search on phi'(t) = grad Q(u + t d) . d.
    double lo = 0.0;
    double dlo = slope;
    double hi = -1.0;
    double dhi = 0.0;
    bool hi_from_armijo = false;
    bool accepted = false;
    // Decreases below this are rounding noise in the energy sums.
    const double noise = 64.0 * std::numeric_limits<double>::epsilon() * std::abs(cur.q);
    best.q = cur.q - noise;
    bool have_best = false;
    double best_t = 0.0;
    for (int ls = 0; ls < 30; ++ls) {
      if (-t * slope < noise) break;
      trial.u.resize(cur.u.size());
      for (std::size_t k = 0; k < cur.u.size(); ++k) trial.u[k] = cur.u[k] + t * dir[k];
      trial.q = quotient(trial.u, trial.grad);
      const double dt = std::isfinite(trial.q) ? dot_interior(trial.grad, dir) : 0.0;
      const bool armijo = std::isfinite(trial.q) && trial.q <= cur.q + 1e-4 * t * slope;
      if (armijo && trial.q < best.q) {
        std::swap(best, trial);
        have_best = true;
        best_t = t;
        if (std::abs(dt) <= 0.1 * std::abs(slope)) {
          accepted = true;
          break;
        }
      }
      if (!armijo) {
        hi = t;
        hi_from_armijo = true;
      } else if (dt > 0.0) {
        hi = t;
        dhi = dt;
        hi_from_armijo = false;
      } else {
        lo = t;
        dlo = dt;
      }
      if (hi < 0.0) {
        if (t >= t_max) break;
        t = std::min(4.0 * t, t_max);
      } else if (!hi_from_armijo && dhi > 0.0 && dlo < 0.0) {
        const double width = hi - lo;
        const double sec = lo - dlo * width / (dhi - dlo);
        t = std::clamp(sec, lo + 0.05 * width, hi - 0.05 * width);
      } else {
        t = 0.5 * (lo + hi);
      }
      if (hi > 0.0 && hi - lo <= 1e-14 * hi) break;
    }
    if (!accepted && !have_best) {
      // Direction gave no decrease: fall back to steepest descent once, then stop.
      bool was_steepest = true;
      for (std::size_t k = 0; k < z.size(); ++k)
        if (dir[k] != -z[k]) {
          was_steepest = false;
          break;
        }
      if (was_steepest) {
        res.converged = true;
        break;
      }
      for (std::size_t k = 0; k < z.size(); ++k) dir[k] = -z[k];
      prev_q = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    last_step = best_t;

    prev_q = cur.q;
    std::swap(cur, best);
    bool restart = false;
    if (opts.clamp_nonnegative) {
      bool clipped = false;
      for (std::size_t k = 0; k < cur.u.size(); ++k) {
        if (cur.u[k] < 0.0) {
          cur.u[k] = 0.0;
          clipped = true;
        }
      }
      if (clipped) {
        cur.q = quotient(cur.u, cur.grad);
        restart = true;
      }
    }
    // Keep the iterate O(1); Q is 0-homogeneous, so gradients scale inversely.
    const double m = max_abs(cur.u);
    if (m > 4.0 || m < 0.25) {
      for (auto &v : cur.u) v /= m;
      for (auto &v : cur.grad) v *= m;
      for (auto &v : dir) v /= m;
      restart = true;
    }

    std::vector<double> z_new;
    precond.apply(cur.grad, z_new);
    const double gz_new = dot_interior(cur.grad, z_new);
    double beta = 0.0;
    if (!restart && gz > 0.0) {
      double num = 0.0;
      for (std::size_t k = 0; k < z_new.size(); ++k) num += cur.grad[k] * (z_new[k] - z[k]);
      beta = std::max(0.0, num / gz);
    }
    for (std::size_t k = 0; k < dir.size(); ++k) dir[k] = -z_new[k] + beta * dir[k];
    z = std::move(z_new);
    gz = gz_new;

    history.push_back(cur.q);
    res.iterations = it;
    if (static_cast<int>(history.size()) > opts.window) {
      const double old = history[history.size() - 1 - static_cast<std::size_t>(opts.window)];
      res.residual = (old - cur.q) / std::abs(cur.q);
      if (res.residual < opts.tol) {
        res.converged = true;
        break;
      }
    }
  }
  if (res.converged && static_cast<int>(history.size()) <= opts.window) {
    // Stopped because no step decreased Q beyond rounding: report the last decrease.
    res.residual = history.size() > 1 ? (history[history.size() - 2] - cur.q) / std::abs(cur.q) : 0.0;
  }
  res.u = std::move(cur.u);
  res.value = cur.q;
  return res;
}

std::vector<double> prolongate(const Grid &coarse, const std::vector<double> &values, const Grid &fine) {
  std::vector<double> out(fine.size(), 0.0);
  auto at = [&](int i, int j) {
    if (i < 0 || j < 0 || i >= coarse.nx() || j >= coarse.ny()) return 0.0;
    return values[coarse.index(i, j)];
  };
  for (int j = 0; j < fine.ny(); ++j) {
    for (int i = 0; i < fine.nx(); ++i) {
      const auto k = fine.index(i, j);
      if (!fine.interior(k)) continue;
      const Vec2 x = fine.node(i, j);
      const double sx = (x.x - coarse.origin().x) / coarse.h();
      const double sy = (x.y - coarse.origin().y) / coarse.h();
      const int i0 = static_cast<int>(std::floor(sx));
      const int j0 = static_cast<int>(std::floor(sy));
      const double fx = sx - i0;
      const double fy = sy - j0;
      out[k] = (1 - fx) * (1 - fy) * at(i0, j0) + fx * (1 - fy) * at(i0 + 1, j0) + (1 - fx) * fy * at(i0, j0 + 1) +
               fx * fy * at(i0 + 1, j0 + 1);
    }
  }
  return out;
}

}  // namespace aniso
