#pragma once

#include <vector>

namespace aniso::detail {

/// int_s^1 (1 - w^p)^{-1/p} dw for s in [0, 1]. The (1 - w)^{-1/p}
/// singularity is removed by the substitution 1 - w = z^{p/(p-1)}.
double singular_tail_integral(double p, double s);

/// The same integral for many lower limits at once, accumulated over the
/// gaps between consecutive limits.
std::vector<double> singular_tail_integrals(double p, const std::vector<double> &s);

}  // namespace aniso::detail
