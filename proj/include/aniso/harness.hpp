#pragma once

#include <map>
#include <string>
#include <vector>

#include "aniso/specs.hpp"

namespace aniso {

/// One checked inequality, oriented as lhs <= rhs. Two-sided chains
/// (lower <= middle <= upper) store the middle term and use the smaller gap.
struct InequalityRecord {
  std::string id;
  double lhs = 0.0;
  double rhs = 0.0;
  double middle = 0.0;
  bool chain = false;
  double slack = 0.0;      // >= 0 means the inequality holds
  double tolerance = 0.0;  // pass iff slack >= -tolerance
  bool pass = false;
  std::string anchor;      // statement in words
};

struct CaseDiagnostics {
  double h = 0.0;
  double area = 0.0;
  double perimeter_F = 0.0;
  double inradius_F = 0.0;       // exact, by erosion
  double inradius_grid = 0.0;    // max of the distance field
  double lambda = 0.0;
  int eigen_iterations = 0;
  double eigen_residual = 0.0;
  double torsion = 0.0;
  double max_v = 0.0;
  double dual_energy = 0.0;
  int torsion_iterations = 0;
  double torsion_residual = 0.0;
  double h_est = 0.0;
  double r_star = 0.0;
  double cheeger_lower = 0.0;
  double cheeger_upper = 0.0;
  bool cheeger_fallback = false;
  double efficiency = 0.0;
  double p_max = 0.0;
  double p_min = 0.0;
  double phi_violation = 0.0;
  /// Which lower bound on lambda in terms of h_F has the larger constant.
  std::string stronger_cheeger;
};

struct InequalityReport {
  CaseSpec spec;
  bool inconclusive = false;
  std::string message;  // solver failure text when inconclusive
  CaseDiagnostics diagnostics;
  std::vector<InequalityRecord> records;

  bool passed() const;  // converged and every record passes
};

/// Solves eigenvalue, torsion, distance and Cheeger problems once and
/// evaluates every inequality. Solver non-convergence yields an
/// inconclusive report instead of an exception.
InequalityReport run_case(const CaseSpec &spec, const std::map<std::string, Tolerance> &tolerances,
                          int cheeger_m = 64);

/// Runs cases on up to `jobs` threads; reports come back in input order.
std::vector<InequalityReport> run_cases(const std::vector<CaseSpec> &specs,
                                        const std::map<std::string, Tolerance> &tolerances, int cheeger_m, int jobs);

std::string report_json(const InequalityReport &report);
/// `<out>/<index>.json` per case, `<out>/inequalities.csv` aggregate.
void write_reports(const std::vector<InequalityReport> &reports, const std::string &out_dir);

struct SlabRow {
  double k = 0.0;
  double r1 = 0.0;  // lambda R_F^p / (pi_p/2)^p
  double r2 = 0.0;  // h_F R_F
  double r3 = 0.0;  // P_F R_F / |Omega|
  double r4 = 0.0;  // lambda M_v^{p-1} / (((p-1)/p)^{p-1} (pi_p/2)^p)
};

/// Rectangles ]-a,a[ x ]-k,k[ for each k of the sweep. Requires an
/// axis-aligned norm.
std::vector<SlabRow> slab_sweep(const SweepSpec &sweep, int jobs = 1);
/// CSV with header `k,r1,r2,r3,r4`.
void write_sweep_csv(const std::vector<SlabRow> &rows, const std::string &path);

struct ConvergenceStudy {
  std::vector<double> h;       // coarse to fine
  std::vector<double> values;
  double extrapolated = 0.0;   // Richardson value from the three finest levels
  double order = 0.0;          // observed order from the same levels
  bool monotone = true;        // successive differences keep one sign
};

/// Needs at least three levels with a constant refinement ratio.
ConvergenceStudy richardson(std::vector<double> h, std::vector<double> values);

enum class StudyQuantity { lambda, torsion, max_v };
ConvergenceStudy convergence_study(const CaseSpec &spec, std::vector<double> h, StudyQuantity quantity);

}  // namespace aniso
