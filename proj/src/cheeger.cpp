#include "aniso/cheeger.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/os.h>

namespace aniso {

CheegerBounds cheeger_bounds(const ConvexPolygon &omega, const MinkowskiNorm &f) {
  const double r = inradius_F(omega, f);
  return {1.0 / r, std::min(2.0 / r, perimeter_F(omega, f) / area(omega))};
}

namespace {

double rolling_ratio(const ConvexPolygon &omega, const MinkowskiNorm &f, double r) {
  if (!erode(omega, f, r)) return std::numeric_limits<double>::infinity();
  const RollingBody k = rolling_body(omega, f, r);
  return k.perimeter_F / k.area;
}

}  // namespace

CheegerResult cheeger_estimate(const ConvexPolygon &omega, const MinkowskiNorm &f, int m) {
  if (m < 3) throw std::invalid_argument(fmt::format("cheeger sweep needs at least 3 points, got {}", m));
  CheegerResult out;
  out.inradius = inradius_F(omega, f);
  out.lower = 1.0 / out.inradius;
  out.upper = std::min(2.0 / out.inradius, perimeter_F(omega, f) / area(omega));

  // Stay just below R_F, where the erosion degenerates to a segment or a point.
  const double r_max = out.inradius * (1.0 - 1e-7);
  out.trace.reserve(static_cast<std::size_t>(m));
  int best = -1;
  double best_ratio = std::numeric_limits<double>::infinity();
  for (int i = 0; i < m; ++i) {
    const double r = r_max * i / (m - 1);
    const double ratio = rolling_ratio(omega, f, r);
    out.trace.emplace_back(r, ratio);
    if (ratio < best_ratio) {
      best_ratio = ratio;
      best = i;
    }
  }
  if (best < 0) {
    out.fallback = true;
    out.h_est = out.upper;
    return out;
  }

  double lo = r_max * std::max(best - 1, 0) / (m - 1);
  double hi = r_max * std::min(best + 1, m - 1) / (m - 1);
  constexpr double inv_phi = 0.6180339887498949;
  double t1 = hi - inv_phi * (hi - lo);
  double t2 = lo + inv_phi * (hi - lo);
  double f1 = rolling_ratio(omega, f, t1);
  double f2 = rolling_ratio(omega, f, t2);
  while (hi - lo > 1e-6 * out.inradius) {
    if (f1 <= f2) {
      hi = t2;
      t2 = t1;
      f2 = f1;
      t1 = hi - inv_phi * (hi - lo);
      f1 = rolling_ratio(omega, f, t1);
    } else {
      lo = t1;
      t1 = t2;
      f1 = f2;
      t2 = lo + inv_phi * (hi - lo);
      f2 = rolling_ratio(omega, f, t2);
    }
  }
  out.r_star = r_max * best / (m - 1);
  out.h_est = best_ratio;
  for (const auto &[r, ratio] : {std::pair{t1, f1}, std::pair{t2, f2}}) {
    if (ratio < out.h_est) {
      out.h_est = ratio;
      out.r_star = r;
    }
  }
  return out;
}

void write_trace_csv(const CheegerResult &result, const std::string &path) {
  auto file = fmt::output_file(path);
  file.print("r,ratio\n");
  for (const auto &[r, ratio] : result.trace) file.print("{:.17g},{:.17g}\n", r, ratio);
}

}  // namespace aniso
