#pragma once

#include <string>

#include "aniso/geometry.hpp"
#include "aniso/grid.hpp"
#include "aniso/norms.hpp"
#include "aniso/solver.hpp"

namespace aniso {

struct SolveOptions {
  double tol = 1e-8;
  int max_iterations = 50000;
  /// Solve on successively halved grids, each seeding the next.
  bool multilevel = true;
};

struct EigenResult {
  double lambda = 0.0;
  GridField u;  // normalized to max u = 1
  int iterations = 0;
  double residual = 0.0;
  double p = 2.0;
  double h = 0.0;
  std::string norm;
  std::string domain;
};

struct TorsionResult {
  GridField v;
  double torsion = 0.0;      // T = int v
  double max_value = 0.0;    // M_v
  double dual_energy = 0.0;  // int F(grad v)^p
  int iterations = 0;
  double residual = 0.0;
  double p = 2.0;
  double h = 0.0;
};

/// First Dirichlet eigenpair of the anisotropic p-Laplacian: minimizes the
/// discrete Rayleigh quotient int F(grad u)^p / int |u|^p. Throws
/// ConvergenceError or GridTooCoarse.
EigenResult solve_eigen(const ConvexPolygon &omega, const MinkowskiNorm &f, double p, double h,
                        const SolveOptions &opts = {});

/// Torsion function -Q_p v = 1, v = 0 on the boundary. The minimizer of
/// (1/p) int F(grad v)^p - int v is found along the ray of the maximizer of
/// (int psi)^p / int F(grad psi)^p, then scaled optimally.
TorsionResult solve_torsion(const ConvexPolygon &omega, const MinkowskiNorm &f, double p, double h,
                            const SolveOptions &opts = {});

struct PFunction {
  GridField values;           // (p-1) F(grad u)^p + lambda (u^p - 1); 0 off the evaluated set
  double max_interior = 0.0;  // over nodes whose four neighbours are interior
  double min_interior = 0.0;
  std::size_t evaluated = 0;
};

/// Node-wise P-function of a normalized eigenfunction (M = 1), gradients by
/// central differences. The one-node collar next to the boundary is skipped.
PFunction p_function(const EigenResult &e, const MinkowskiNorm &f);

/// Phi(s) for M = 1 and s in [0, 1].
double phi_function(double p, double s);

struct PhiCheck {
  double max_violation = 0.0;  // max over nodes of Phi(u) - q lambda^{1/(p-1)} v
  double payne_lhs = 0.0;      // ((p-1)/p)^{p-1} (pi_p/2)^p
  double payne_rhs = 0.0;      // lambda M_v^{p-1}
};

/// Requires e and t on the same grid.
PhiCheck phi_check(const EigenResult &e, const TorsionResult &t);

/// (int u^{p-1})^{1/(p-1)} / (|Omega|^{1/(p-1)} max u).
double efficiency_ratio(const EigenResult &e, double domain_area);

/// p int u^p / (M^p |Omega|); at most 1 on convex domains.
double mass_bound_check(const EigenResult &e, double domain_area);

}  // namespace aniso
