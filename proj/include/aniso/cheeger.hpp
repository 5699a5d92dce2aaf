#pragma once

#include <string>
#include <utility>
#include <vector>

#include "aniso/geometry.hpp"
#include "aniso/norms.hpp"

namespace aniso {

struct CheegerBounds {
  double lower = 0.0;  // 1 / R_F
  double upper = 0.0;  // min(2 / R_F, P_F / |Omega|)
};

CheegerBounds cheeger_bounds(const ConvexPolygon &omega, const MinkowskiNorm &f);

struct CheegerResult {
  double h_est = 0.0;
  double r_star = 0.0;  // rolling radius of the best candidate
  double lower = 0.0;
  double upper = 0.0;
  double inradius = 0.0;
  std::vector<std::pair<double, double>> trace;  // coarse sweep (r, ratio)
  bool fallback = false;  // no nonempty erosion was found; h_est is the upper bound
};

/// Minimizes P_F(K_r) / |K_r| over the rolling bodies K_r = (Omega - rW) + rW,
/// r in [0, R_F): an m-point sweep followed by golden-section refinement.
CheegerResult cheeger_estimate(const ConvexPolygon &omega, const MinkowskiNorm &f, int m = 64);

/// CSV with header `r,ratio`.
void write_trace_csv(const CheegerResult &result, const std::string &path);

}  // namespace aniso
