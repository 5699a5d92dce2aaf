#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <vector>

#include "aniso/grid.hpp"
#include "aniso/norms.hpp"

namespace aniso {

class ConvergenceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Piecewise-linear energy sum_T |T| F_eps(grad u|_T)^p on the lattice
/// triangulation (every cell split along its (i+1,j)-(i,j+1) diagonal), with
/// the grid's boundary-fitted node positions.
/// For F = |.| and p = 2 the stiffness matrix is the 5-point Laplacian.
class P1Energy {
public:
  P1Energy(std::shared_ptr<const Grid> grid, MinkowskiNorm norm, double p, double eps);

  const Grid &grid() const { return *grid_; }
  const std::shared_ptr<const Grid> &grid_ptr() const { return grid_; }
  const MinkowskiNorm &norm() const { return norm_; }
  /// F(e1)^2 and F(e2)^2: the diagonal of the p = 2 quadratic model.
  std::pair<double, double> axis_weights() const;
  double p() const { return p_; }
  double eps() const { return eps_; }

  double value(const std::vector<double> &u) const;
  /// Writes dE/du_k into `grad` (zero on non-interior nodes) and returns E.
  double value_and_gradient(const std::vector<double> &u, std::vector<double> &grad) const;
  /// Same energy with a different regularization; used for reporting at eps = 0.
  double value_with_eps(const std::vector<double> &u, double eps) const;

private:
  std::shared_ptr<const Grid> grid_;
  MinkowskiNorm norm_;
  double p_;
  double eps_;
  struct Triangle {
    std::uint32_t v[3];
    Vec2 c1, c2;  // grad u = c1 (u1 - u0) + c2 (u2 - u0)
    double area;
  };
  std::vector<std::uint32_t> cells_;  // lower-left node of every undeformed cell touching the interior
  std::vector<Triangle> deformed_;    // triangles with a vertex moved onto the boundary
};

/// Denominators of the two homogeneous quotients minimized by the solvers.
enum class Denominator {
  lp_mass,    // sum m_k |u_k|^p          (eigenvalue)
  l1_power,   // (sum m_k u_k)^p          (torsion)
};

double denominator_value(const Grid &g, Denominator kind, double p, const std::vector<double> &u);

/// Inverse of the constant-coefficient lattice operator
/// -wx d_xx - wy d_yy on the bounding box (Dirichlet), restricted to the
/// interior mask. Diagonalized by a 2-D type-I sine transform.
class BoxPreconditioner {
public:
  BoxPreconditioner(std::shared_ptr<const Grid> grid, double wx, double wy);
  ~BoxPreconditioner();
  BoxPreconditioner(const BoxPreconditioner &) = delete;
  BoxPreconditioner &operator=(const BoxPreconditioner &) = delete;

  void apply(const std::vector<double> &r, std::vector<double> &z);

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct QuotientOptions {
  double tol = 1e-8;
  int window = 25;
  int max_iterations = 50000;
  bool clamp_nonnegative = true;
};

struct QuotientResult {
  std::vector<double> u;
  double value = 0.0;
  int iterations = 0;
  double residual = 0.0;  // relative decrease over the last window (last step if stopped earlier)
  bool converged = false;
};

/// Minimizes E(u)/D(u) over interior nodal values with preconditioned
/// Polak-Ribiere nonlinear CG, a bracketing secant line search, and
/// projection onto u >= 0. Converged when the quotient decreases by less
/// than tol (relative) over `window` iterations.
QuotientResult minimize_quotient(const P1Energy &energy, Denominator kind, std::vector<double> start,
                                 const QuotientOptions &opts);

/// Bilinear interpolation of a field on `coarse` onto the nodes of `fine`;
/// non-interior fine nodes get 0.
std::vector<double> prolongate(const Grid &coarse, const std::vector<double> &values, const Grid &fine);

}  // namespace aniso
