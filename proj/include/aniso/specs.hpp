#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "aniso/geometry.hpp"
#include "aniso/norms.hpp"

namespace aniso {

/// `rect:<a>,<k>` | `regular:<n>,<R>` | `wulff:<r>,<n>` | `poly:<x1>,<y1>;<x2>,<y2>;...`.
/// Wulff domains are built from the norm they are paired with.
ConvexPolygon parse_domain(std::string_view text, const MinkowskiNorm &f);

/// Grid spacing used when none is given: diameter / 128, refined so the
/// shorter side of the bounding box spans at least 48 intervals.
double default_spacing(const ConvexPolygon &omega);

struct CaseSpec {
  std::string domain;
  std::string norm;
  double p = 2.0;
  double h = 0.0;  // 0: default_spacing
  double tol = 1e-8;

  /// "domain|norm|p=..": stable key used for ordering and file names.
  std::string id() const;
  bool operator==(const CaseSpec &) const = default;
};

/// Throws std::invalid_argument on an unparseable domain or norm, p <= 1 or h < 0.
void validate(const CaseSpec &spec);

/// Acceptance band for one inequality: slack >= -(relative + grid * h / diameter) * |rhs|.
struct Tolerance {
  double relative = 1e-6;
  double grid = 0.0;
  bool operator==(const Tolerance &) const = default;
};

struct SweepSpec {
  double a = 1.0;
  std::vector<double> k{1, 2, 4, 8, 16};
  std::string norm = "lq:2";
  double p = 2.0;
  double h = 1.0 / 64;
  bool operator==(const SweepSpec &) const = default;
};

struct RunConfig {
  std::string command = "verify";
  std::vector<CaseSpec> cases;
  std::string out = "results";
  int jobs = 1;
  bool strict = false;
  int cheeger_m = 64;
  std::map<std::string, Tolerance> tolerances;  // keyed by inequality id
  SweepSpec sweep;

  bool operator==(const RunConfig &) const = default;
};

/// The ids of the checked inequalities, in report order.
const std::vector<std::string> &inequality_ids();
std::map<std::string, Tolerance> default_tolerances();

/// Catalog used when no case is given: 4 domains x 3 norms x 3 exponents.
std::vector<CaseSpec> default_catalog();

/// Sectioned key-value text (see configs/default_catalog.ini); a document
/// whose first non-blank character is '{' is read as JSON instead.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string &path);
/// Key-value text that parse_config turns back into an equal RunConfig.
std::string dump_config(const RunConfig &config);

}  // namespace aniso
