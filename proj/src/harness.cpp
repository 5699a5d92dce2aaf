#include "aniso/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <thread>

#include <fmt/format.h>
#include <fmt/os.h>
#include <nlohmann/json.hpp>

#include "aniso/cheeger.hpp"
#include "aniso/pde.hpp"

namespace aniso {

namespace {

constexpr double kDim = 2.0;

struct Evaluator {
  const std::map<std::string, Tolerance> &tolerances;
  double h_over_diameter;
  std::vector<InequalityRecord> records;

  Tolerance tolerance_for(const std::string &id) const {
    const auto it = tolerances.find(id);
    return it == tolerances.end() ? Tolerance{} : it->second;
  }

  void finish(InequalityRecord &r, double scale) {
    const Tolerance t = tolerance_for(r.id);
    r.tolerance = std::abs(scale) * (t.relative + t.grid * h_over_diameter);
    r.pass = std::isfinite(r.slack) && r.slack >= -r.tolerance;
    records.push_back(std::move(r));
  }

  void at_most(const std::string &id, double lhs, double rhs, std::string anchor) {
    InequalityRecord r{id, lhs, rhs, 0.0, false, rhs - lhs, 0.0, false, std::move(anchor)};
    finish(r, rhs);
  }

  void chain(const std::string &id, double lower, double middle, double upper, std::string anchor) {
    InequalityRecord r{id, lower, upper, middle, true, std::min(middle - lower, upper - middle), 0.0, false,
                       std::move(anchor)};
    finish(r, middle);
  }
};

}  // namespace

bool InequalityReport::passed() const {
  if (inconclusive) return false;
  return std::all_of(records.begin(), records.end(), [](const auto &r) { return r.pass; });
}

InequalityReport run_case(const CaseSpec &spec, const std::map<std::string, Tolerance> &tolerances,
                          int cheeger_m) {
  validate(spec);
  const auto f = MinkowskiNorm::parse(spec.norm);
  const auto omega = parse_domain(spec.domain, f);
  const double p = spec.p;
  const double q = p / (p - 1.0);
  const double h = spec.h > 0.0 ? spec.h : default_spacing(omega);

  InequalityReport report;
  report.spec = spec;
  auto &d = report.diagnostics;
  d.h = h;
  d.area = area(omega);
  d.perimeter_F = perimeter_F(omega, f);
  d.inradius_F = inradius_F(omega, f);
  const auto cheeger = cheeger_estimate(omega, f, cheeger_m);
  d.h_est = cheeger.h_est;
  d.r_star = cheeger.r_star;
  d.cheeger_lower = cheeger.lower;
  d.cheeger_upper = cheeger.upper;
  d.cheeger_fallback = cheeger.fallback;
  const double pi_half = 0.5 * pi_p(p);
  d.stronger_cheeger = std::pow(pi_half / kDim, p) > std::pow(1.0 / p, p) ? "bettercheeger" : "cheeger";

  Evaluator ev{tolerances, h / omega.diameter(), {}};
  const double r_f = d.inradius_F;
  const double kappa = f.wulff_area();
  const double r_vol = std::sqrt(d.area / kappa);
  const double hw = kDim / r_vol;  // Cheeger constant of the Wulff shape of equal area

  try {
    d.inradius_grid = distance_field(omega, f, h).inradius;
    const SolveOptions opts{spec.tol, 50000, true};
    const auto e = solve_eigen(omega, f, p, h, opts);
    const auto t = solve_torsion(omega, f, p, h, opts);
    d.lambda = e.lambda;
    d.eigen_iterations = e.iterations;
    d.eigen_residual = e.residual;
    d.torsion = t.torsion;
    d.max_v = t.max_value;
    d.dual_energy = t.dual_energy;
    d.torsion_iterations = t.iterations;
    d.torsion_residual = t.residual;
    d.efficiency = efficiency_ratio(e, d.area);
    const auto pf = p_function(e, f);
    d.p_max = pf.max_interior;
    d.p_min = pf.min_interior;
    const auto phi = phi_check(e, t);
    d.phi_violation = phi.max_violation;

    const double lam = d.lambda;
    const double mv = d.max_v;
    ev.at_most("H", std::pow(pi_half / r_f, p), lam, "Hersch: lambda >= (pi_p/2)^p / R_F^p");
    ev.at_most("cheeger", std::pow(d.h_est / p, p), lam, "Cheeger: lambda >= (h_F/p)^p");
    ev.at_most("bettercheeger", std::pow(pi_half / kDim * d.h_est, p), lam,
               "lambda >= (pi_p/(2N))^p h_F^p");
    ev.at_most("rc", lam, std::pow(pi_half * d.h_est, p), "reverse Cheeger: lambda <= (pi_p/2)^p h_F^p");
    ev.at_most("pol", lam, std::pow(pi_half * d.perimeter_F / d.area, p),
               "lambda <= (pi_p/2)^p (P_F/|Omega|)^p");
    ev.at_most("payneineq", std::pow((p - 1.0) / p, p - 1.0) * std::pow(pi_half, p), lam * std::pow(mv, p - 1.0),
               "Payne: ((p-1)/p)^{p-1} (pi_p/2)^p <= lambda M_v^{p-1}");
    ev.chain("func", lam * std::pow(d.torsion / d.area, p - 1.0), lam * std::pow(mv, p - 1.0),
             std::pow(d.area * mv / d.torsion, p - 1.0),
             "lambda (T/|Omega|)^{p-1} <= lambda M_v^{p-1} <= (|Omega| M_v / T)^{p-1}");
    ev.at_most("ue", std::pow(d.efficiency, p), 1.0 / p, "E_F^p <= 1/p");
    ev.at_most("ue2", d.efficiency, std::pow(p - 1.0, -1.0 / p) * std::pow(1.0 / pi_half, 1.0 / (p - 1.0)),
               "Payne-Stakgold: E_F <= (p-1)^{-1/p} (2/pi_p)^{1/(p-1)}");
    ev.at_most("hrl", 1.0 / r_f, d.h_est, "1/R_F <= h_F");
    ev.at_most("hru", d.h_est, kDim / r_f, "h_F <= N/R_F");
    ev.at_most("fkh", hw, d.h_est, "h_F >= h_F(W_R) with |W_R| = |Omega|");
    ev.at_most("stab", d.h_est - hw, kDim * (1.0 / r_f - 1.0 / r_vol), "h_F - h_F(W_R) <= N (1/R_F - 1/R)");
    ev.chain("stima_max", std::pow(r_f, q) / (q * std::pow(kDim, q - 1.0)), mv, std::pow(r_f, q) / q,
             "R_F^q/(q N^{q-1}) <= M_v <= R_F^q/q");
    ev.at_most("isop", kDim * std::sqrt(kappa * d.area), d.perimeter_F,
               "isoperimetric: P_F >= N kappa^{1/N} |Omega|^{1-1/N}");
    ev.at_most("mp", mass_bound_check(e, d.area), 1.0, "p int u^p <= M^p |Omega|");
  } catch (const ConvergenceError &err) {
    report.inconclusive = true;
    report.message = err.what();
  } catch (const GridTooCoarse &err) {
    report.inconclusive = true;
    report.message = err.what();
  }
  if (report.inconclusive) {
    // Purely geometric statements are still checked.
    ev.at_most("hrl", 1.0 / r_f, d.h_est, "1/R_F <= h_F");
    ev.at_most("hru", d.h_est, kDim / r_f, "h_F <= N/R_F");
    ev.at_most("fkh", hw, d.h_est, "h_F >= h_F(W_R) with |W_R| = |Omega|");
    ev.at_most("stab", d.h_est - hw, kDim * (1.0 / r_f - 1.0 / r_vol), "h_F - h_F(W_R) <= N (1/R_F - 1/R)");
    ev.at_most("isop", kDim * std::sqrt(kappa * d.area), d.perimeter_F,
               "isoperimetric: P_F >= N kappa^{1/N} |Omega|^{1-1/N}");
  }
  report.records = std::move(ev.records);
  return report;
}

namespace {

template <class Fn> void parallel_for(std::size_t n, int jobs, Fn &&fn) {
  const auto workers = static_cast<std::size_t>(std::clamp<long>(jobs, 1, static_cast<long>(std::max<std::size_t>(n, 1))));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto &t : pool) t.join();
  for (auto &e : errors)
    if (e) std::rethrow_exception(e);
}

nlohmann::ordered_json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

std::string csv_quote(const std::string &s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::vector<InequalityReport> run_cases(const std::vector<CaseSpec> &specs,
                                        const std::map<std::string, Tolerance> &tolerances, int cheeger_m,
                                        int jobs) {
  std::vector<InequalityReport> out(specs.size());
  parallel_for(specs.size(), jobs, [&](std::size_t i) { out[i] = run_case(specs[i], tolerances, cheeger_m); });
  return out;
}

std::string report_json(const InequalityReport &r) {
  using json = nlohmann::ordered_json;
  const auto &d = r.diagnostics;
  json j;
  j["case"] = {{"domain", r.spec.domain}, {"norm", r.spec.norm}, {"p", r.spec.p}, {"h", d.h}, {"tol", r.spec.tol}};
  j["status"] = r.inconclusive ? "inconclusive" : (r.passed() ? "pass" : "fail");
  if (r.inconclusive) j["message"] = r.message;
  j["geometry"] = {{"area", number(d.area)},
                   {"perimeter_F", number(d.perimeter_F)},
                   {"inradius_F", number(d.inradius_F)},
                   {"inradius_grid", number(d.inradius_grid)}};
  j["cheeger"] = {{"h_est", number(d.h_est)},
                  {"r_star", number(d.r_star)},
                  {"lower", number(d.cheeger_lower)},
                  {"upper", number(d.cheeger_upper)},
                  {"fallback", d.cheeger_fallback},
                  {"stronger_bound", d.stronger_cheeger}};
  if (!r.inconclusive) {
    j["eigen"] = {{"lambda", number(d.lambda)},
                  {"iterations", d.eigen_iterations},
                  {"residual", number(d.eigen_residual)},
                  {"efficiency", number(d.efficiency)},
                  {"p_function_max", number(d.p_max)},
                  {"p_function_min", number(d.p_min)}};
    j["torsion"] = {{"T", number(d.torsion)},
                    {"Mv", number(d.max_v)},
                    {"dual_energy", number(d.dual_energy)},
                    {"iterations", d.torsion_iterations},
                    {"residual", number(d.torsion_residual)},
                    {"phi_violation", number(d.phi_violation)}};
  }
  json recs = json::array();
  for (const auto &rec : r.records) {
    json x;
    x["id"] = rec.id;
    x["lhs"] = number(rec.lhs);
    if (rec.chain) x["middle"] = number(rec.middle);
    x["rhs"] = number(rec.rhs);
    x["slack"] = number(rec.slack);
    x["tolerance"] = number(rec.tolerance);
    x["pass"] = rec.pass;
    x["statement"] = rec.anchor;
    recs.push_back(std::move(x));
  }
  j["inequalities"] = std::move(recs);
  return j.dump(2) + "\n";
}

void write_reports(const std::vector<InequalityReport> &reports, const std::string &out_dir) {
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);
  auto csv = fmt::output_file((dir / "inequalities.csv").string());
  csv.print("case,domain,norm,p,h,status,id,lhs,rhs,slack,tolerance,pass\n");
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto &r = reports[i];
    auto file = fmt::output_file((dir / fmt::format("case_{:03d}.json", i)).string());
    file.print("{}", report_json(r));
    const char *status = r.inconclusive ? "inconclusive" : (r.passed() ? "pass" : "fail");
    for (const auto &rec : r.records) {
      csv.print("{},{},{},{},{},{},{},{:.17g},{:.17g},{:.17g},{:.17g},{}\n", i, csv_quote(r.spec.domain),
                csv_quote(r.spec.norm), r.spec.p, r.diagnostics.h, status, rec.id, rec.lhs, rec.rhs, rec.slack,
                rec.tolerance, rec.pass ? 1 : 0);
    }
  }
}

std::vector<SlabRow> slab_sweep(const SweepSpec &sweep, int jobs) {
  const auto f = MinkowskiNorm::parse(sweep.norm);
  if (!f.axis_aligned()) {
    throw std::invalid_argument(fmt::format("slab sweep needs an axis-aligned norm, got {}", sweep.norm));
  }
  if (!(sweep.a > 0.0) || !(sweep.p > 1.0) || !(sweep.h > 0.0)) {
    throw std::invalid_argument("slab sweep needs a > 0, p > 1 and h > 0");
  }
  const double p = sweep.p;
  const double pi_half = 0.5 * pi_p(p);
  const double payne = std::pow((p - 1.0) / p, p - 1.0) * std::pow(pi_half, p);
  std::vector<SlabRow> rows(sweep.k.size());
  parallel_for(rows.size(), jobs, [&](std::size_t i) {
    const double k = sweep.k[i];
    if (!(k > 0.0)) throw std::invalid_argument("slab sweep needs positive k");
    const auto omega = ConvexPolygon::rectangle(sweep.a, k);
    const double r_f = inradius_F(omega, f);
    const auto e = solve_eigen(omega, f, p, sweep.h);
    const auto t = solve_torsion(omega, f, p, sweep.h);
    const auto c = cheeger_estimate(omega, f);
    rows[i] = SlabRow{k, e.lambda * std::pow(r_f / pi_half, p), c.h_est * r_f,
                      perimeter_F(omega, f) * r_f / area(omega), e.lambda * std::pow(t.max_value, p - 1.0) / payne};
  });
  return rows;
}

void write_sweep_csv(const std::vector<SlabRow> &rows, const std::string &path) {
  auto file = fmt::output_file(path);
  file.print("k,r1,r2,r3,r4\n");
  for (const auto &r : rows) file.print("{},{:.17g},{:.17g},{:.17g},{:.17g}\n", r.k, r.r1, r.r2, r.r3, r.r4);
}

ConvergenceStudy richardson(std::vector<double> h, std::vector<double> values) {
  if (h.size() != values.size() || h.size() < 3) {
    throw std::invalid_argument("convergence study needs at least three grid levels");
  }
  ConvergenceStudy s;
  s.h = std::move(h);
  s.values = std::move(values);
  const std::size_t n = s.h.size();
  const double ratio = s.h[n - 3] / s.h[n - 2];
  for (std::size_t i = 1; i < n; ++i) {
    if (!(s.h[i - 1] > s.h[i])) throw std::invalid_argument("grid levels must be ordered coarse to fine");
    if (std::abs(s.h[i - 1] / s.h[i] - ratio) > 1e-9 * ratio) {
      throw std::invalid_argument("grid levels need a constant refinement ratio");
    }
  }
  for (std::size_t i = 2; i < n; ++i) {
    const double d0 = s.values[i - 1] - s.values[i - 2];
    const double d1 = s.values[i] - s.values[i - 1];
    if (d0 * d1 <= 0.0) s.monotone = false;
  }
  const double d0 = s.values[n - 2] - s.values[n - 3];
  const double d1 = s.values[n - 1] - s.values[n - 2];
  s.order = std::log(std::abs(d0 / d1)) / std::log(ratio);
  s.extrapolated = s.values[n - 1] + d1 / (std::pow(ratio, s.order) - 1.0);
  return s;
}

ConvergenceStudy convergence_study(const CaseSpec &spec, std::vector<double> h, StudyQuantity quantity) {
  validate(spec);
  const auto f = MinkowskiNorm::parse(spec.norm);
  const auto omega = parse_domain(spec.domain, f);
  std::sort(h.begin(), h.end(), std::greater<>());
  std::vector<double> values;
  const SolveOptions opts{spec.tol, 50000, true};
  for (double hi : h) {
    if (quantity == StudyQuantity::lambda) {
      values.push_back(solve_eigen(omega, f, spec.p, hi, opts).lambda);
    } else {
      const auto t = solve_torsion(omega, f, spec.p, hi, opts);
      values.push_back(quantity == StudyQuantity::torsion ? t.torsion : t.max_value);
    }
  }
  return richardson(std::move(h), std::move(values));
}

}  // namespace aniso
