#include "aniso/cli.hpp"

#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "aniso/cheeger.hpp"
#include "aniso/harness.hpp"
#include "aniso/pde.hpp"
#include "aniso/specs.hpp"
#include "text.hpp"

namespace aniso {

namespace {

struct Flags {
  std::string domain;
  std::string norm = "lq:2";
  double p = 2.0;
  double h = 0.0;
  double tol = 1e-8;
  std::string out;
  int jobs = 1;
  bool strict = false;
  std::string dump_config;
  std::string config;
  int m = 64;
  std::vector<std::string> tolerance_overrides;
  std::string family = "slab";
  double a = 1.0;
  std::string k = "1,2,4,8,16";
  std::string h_list;
  std::string quantity = "lambda";
  int max_iter = 50000;
  // set when given on the command line, so config values are not overwritten by defaults
  bool jobs_given = false;
  bool m_given = false;
};

std::string out_path(const Flags &fl, const std::string &name) {
  std::filesystem::create_directories(fl.out);
  return (std::filesystem::path(fl.out) / name).string();
}

void write_text(const std::string &path, const std::string &text) {
  std::ofstream f(path);
  if (!f) throw std::invalid_argument(fmt::format("cannot write '{}'", path));
  f << text;
}

CaseSpec single_case(const Flags &fl) {
  CaseSpec s{fl.domain, fl.norm, fl.p, fl.h, fl.tol};
  validate(s);
  return s;
}

RunConfig config_from_flags(const std::string &command, const Flags &fl) {
  RunConfig c;
  if (!fl.config.empty()) c = load_config(fl.config);
  else c.tolerances = default_tolerances();
  c.command = command;
  if (!fl.out.empty()) c.out = fl.out;
  if (fl.jobs_given || fl.config.empty()) c.jobs = fl.jobs;
  if (fl.strict) c.strict = true;
  if (fl.m_given || fl.config.empty()) c.cheeger_m = fl.m;
  if (command == "sweep") {
    c.sweep.a = fl.a;
    c.sweep.k = detail::parse_numbers(fl.k, ',');
    c.sweep.norm = fl.norm;
    c.sweep.p = fl.p;
    if (fl.h > 0.0) c.sweep.h = fl.h;
  } else if (!fl.domain.empty()) {
    c.cases = {single_case(fl)};
  } else if (command == "verify" && fl.config.empty()) {
    c.cases = default_catalog();
  }
  for (const auto &o : fl.tolerance_overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw std::invalid_argument(fmt::format("tolerance override '{}' needs id=rel,grid", o));
    const auto id = std::string(detail::trim(std::string_view(o).substr(0, eq)));
    const auto v = detail::parse_numbers(std::string_view(o).substr(eq + 1), ',');
    if (v.size() != 2) throw std::invalid_argument(fmt::format("tolerance override '{}' needs id=rel,grid", o));
    const auto &ids = inequality_ids();
    if (std::find(ids.begin(), ids.end(), id) == ids.end())
      throw std::invalid_argument(fmt::format("unknown inequality id '{}'", id));
    c.tolerances[id] = Tolerance{v[0], v[1]};
  }
  return c;
}

int cmd_eigen(const Flags &fl, std::ostream &out) {
  const auto s = single_case(fl);
  const auto f = MinkowskiNorm::parse(s.norm);
  const auto omega = parse_domain(s.domain, f);
  const double h = s.h > 0.0 ? s.h : default_spacing(omega);
  const auto e = solve_eigen(omega, f, s.p, h, {s.tol, fl.max_iter, true});
  fmt::print(out, "domain {}\nnorm {}\np {}\nh {}\nlambda {:.10g}\niterations {}\nresidual {:.3g}\n", s.domain, s.norm,
             s.p, h, e.lambda, e.iterations, e.residual);
  if (!fl.out.empty()) write_field_csv(e.u, out_path(fl, "eigenfunction.csv"));
  return exit_ok;
}

int cmd_torsion(const Flags &fl, std::ostream &out) {
  const auto s = single_case(fl);
  const auto f = MinkowskiNorm::parse(s.norm);
  const auto omega = parse_domain(s.domain, f);
  const double h = s.h > 0.0 ? s.h : default_spacing(omega);
  const auto t = solve_torsion(omega, f, s.p, h, {s.tol, fl.max_iter, true});
  fmt::print(out, "domain {}\nnorm {}\np {}\nh {}\nT {:.10g}\nMv {:.10g}\ndual_energy {:.10g}\niterations {}\nresidual {:.3g}\n",
             s.domain, s.norm, s.p, h, t.torsion, t.max_value, t.dual_energy, t.iterations, t.residual);
  if (!fl.out.empty()) write_field_csv(t.v, out_path(fl, "torsion.csv"));
  return exit_ok;
}

int cmd_cheeger(const Flags &fl, std::ostream &out) {
  const auto f = MinkowskiNorm::parse(fl.norm);
  const auto omega = parse_domain(fl.domain, f);
  const auto c = cheeger_estimate(omega, f, fl.m);
  fmt::print(out, "domain {}\nnorm {}\nh_est {:.10g}\nr_star {:.10g}\nlower {:.10g}\nupper {:.10g}\nfallback {}\n",
             fl.domain, fl.norm, c.h_est, c.r_star, c.lower, c.upper, c.fallback);
  if (!fl.out.empty()) write_trace_csv(c, out_path(fl, "cheeger_trace.csv"));
  return exit_ok;
}

int cmd_verify(const RunConfig &c, std::ostream &out, std::ostream &err) {
  if (c.cases.empty()) {
    fmt::print(err, "error: the case catalog is empty\n");
    return exit_usage;
  }
  const auto reports = run_cases(c.cases, c.tolerances, c.cheeger_m, c.jobs);
  write_reports(reports, c.out);
  int failed = 0;
  int inconclusive = 0;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto &r = reports[i];
    const auto passing = std::count_if(r.records.begin(), r.records.end(), [](const auto &x) { return x.pass; });
    const char *status = r.inconclusive ? "INCONCLUSIVE" : (r.passed() ? "PASS" : "FAIL");
    fmt::print(out, "{:03d} {:<14} {:<14} p={:<4} {} ({}/{} records)\n", i, r.spec.domain, r.spec.norm, r.spec.p,
               status, passing, r.records.size());
    for (const auto &x : r.records)
      if (!x.pass)
        fmt::print(out, "    {} failed: lhs {:.10g} rhs {:.10g} slack {:.3g} tolerance {:.3g}\n", x.id, x.lhs, x.rhs,
                   x.slack, x.tolerance);
    if (r.inconclusive) {
      ++inconclusive;
      fmt::print(out, "    {}\n", r.message);
    }
    if (passing != static_cast<long>(r.records.size())) ++failed;
  }
  fmt::print(out, "{} cases, {} with failures, {} inconclusive; reports in {}\n", reports.size(), failed, inconclusive,
             c.out);
  if (failed > 0) return exit_inequality_failed;
  if (inconclusive > 0 && c.strict) return exit_not_converged;
  return exit_ok;
}

int cmd_sweep(const Flags &fl, const RunConfig &c, std::ostream &out) {
  if (fl.family != "slab") throw std::invalid_argument(fmt::format("unknown sweep family '{}'", fl.family));
  const auto rows = slab_sweep(c.sweep, c.jobs);
  fmt::print(out, "k,r1,r2,r3,r4\n");
  for (const auto &r : rows) fmt::print(out, "{},{:.10g},{:.10g},{:.10g},{:.10g}\n", r.k, r.r1, r.r2, r.r3, r.r4);
  if (!fl.out.empty()) write_sweep_csv(rows, out_path(fl, "sweep.csv"));
  return exit_ok;
}

int cmd_study(const Flags &fl, std::ostream &out) {
  const auto s = single_case(fl);
  StudyQuantity q;
  if (fl.quantity == "lambda") q = StudyQuantity::lambda;
  else if (fl.quantity == "T") q = StudyQuantity::torsion;
  else if (fl.quantity == "Mv") q = StudyQuantity::max_v;
  else throw std::invalid_argument(fmt::format("unknown quantity '{}' (lambda, T, Mv)", fl.quantity));
  const auto study = convergence_study(s, detail::parse_numbers(fl.h_list, ','), q);
  fmt::print(out, "h,{}\n", fl.quantity);
  for (std::size_t i = 0; i < study.h.size(); ++i) fmt::print(out, "{},{:.12g}\n", study.h[i], study.values[i]);
  fmt::print(out, "extrapolated {:.12g}\norder {:.4g}\nmonotone {}\n", study.extrapolated, study.order,
             study.monotone);
  return exit_ok;
}

}  // namespace

int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Anisotropic p-Laplacian eigenvalues, torsion, Cheeger constants and inequality checks", "aniso"};
  app.set_help_flag("--help", "print this help and exit");
  app.require_subcommand(1);
  Flags fl;

  auto add_case = [&fl](CLI::App *sub, bool domain_required) {
    auto *d = sub->add_option("--domain", fl.domain, "rect:a,k | regular:n,R | wulff:r,n | poly:x1,y1;...");
    if (domain_required) d->required();
    sub->add_option("--norm", fl.norm, "lq:q | ellipse:a11,a12,a22")->capture_default_str();
    sub->add_option("--p", fl.p, "exponent p > 1")->capture_default_str();
    sub->add_option("--h", fl.h, "grid spacing (0: diameter/128, at least 48 intervals across)")
        ->capture_default_str();
    sub->add_option("--tol", fl.tol, "relative quotient decrease over 25 iterations")->capture_default_str();
  };
  auto add_common = [&fl](CLI::App *sub) {
    sub->add_option("--out", fl.out, "output directory");
    sub->add_option("--dump-config", fl.dump_config, "write the effective configuration here and exit");
  };

  auto *eigen = app.add_subcommand("eigen", "first eigenvalue and eigenfunction");
  add_case(eigen, true);
  eigen->add_option("--max-iter", fl.max_iter, "iteration cap per grid level")->capture_default_str();
  add_common(eigen);
  auto *torsion = app.add_subcommand("torsion", "torsion function, T and M_v");
  add_case(torsion, true);
  torsion->add_option("--max-iter", fl.max_iter, "iteration cap per grid level")->capture_default_str();
  add_common(torsion);
  auto *cheeger = app.add_subcommand("cheeger", "Cheeger constant estimate and bounds");
  cheeger->add_option("--domain", fl.domain, "rect:a,k | regular:n,R | wulff:r,n | poly:x1,y1;...")->required();
  cheeger->add_option("--norm", fl.norm, "lq:q | ellipse:a11,a12,a22")->capture_default_str();
  cheeger->add_option("--m", fl.m, "coarse sweep points")->capture_default_str();
  add_common(cheeger);
  auto *verify = app.add_subcommand("verify", "check every inequality on a case catalog");
  verify->add_option("--config", fl.config, "catalog file (key-value sections or JSON)");
  add_case(verify, false);
  add_common(verify);
  verify->add_option("--jobs", fl.jobs, "cases solved concurrently")->capture_default_str();
  verify->add_flag("--strict", fl.strict, "treat non-converged cases as an error (exit 3)");
  verify->add_option("--m", fl.m, "Cheeger sweep points")->capture_default_str();
  verify->add_option("--tolerance", fl.tolerance_overrides, "override one band: id=relative,grid");
  auto *sweep = app.add_subcommand("sweep", "optimality ratios along rectangles ]-a,a[ x ]-k,k[");
  sweep->add_option("--family", fl.family, "rectangle family (slab)")->capture_default_str();
  sweep->add_option("--a", fl.a, "half-width a")->capture_default_str();
  sweep->add_option("--k", fl.k, "comma-separated list")->capture_default_str();
  sweep->add_option("--norm", fl.norm, "lq:q | ellipse:a11,a12,a22")->capture_default_str();
  sweep->add_option("--p", fl.p, "exponent p > 1")->capture_default_str();
  sweep->add_option("--h", fl.h, "grid spacing (default 1/64)");
  sweep->add_option("--jobs", fl.jobs, "rows solved concurrently")->capture_default_str();
  add_common(sweep);
  auto *study = app.add_subcommand("study", "grid convergence with Richardson extrapolation");
  add_case(study, true);
  study->add_option("--levels", fl.h_list, "comma-separated spacings, constant ratio")->required();
  study->add_option("--quantity", fl.quantity, "lambda | T | Mv")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp &) {
    fmt::print(out, "{}", app.help());
    return exit_ok;
  } catch (const CLI::CallForAllHelp &) {
    fmt::print(out, "{}", app.help("", CLI::AppFormatMode::All));
    return exit_ok;
  } catch (const CLI::ParseError &e) {
    fmt::print(err, "error: {}\n", e.what());
    return exit_usage;
  }

  const CLI::App *sub = app.get_subcommands().front();
  const std::string command = sub->get_name();
  auto given = [sub](const char *name) {
    const auto *opt = sub->get_option_no_throw(name);
    return opt != nullptr && opt->count() > 0;
  };
  fl.jobs_given = given("--jobs");
  fl.m_given = given("--m");
  try {
    if (fl.jobs < 1) throw std::invalid_argument("--jobs must be at least 1");
    const RunConfig config = command == "study" ? RunConfig{} : config_from_flags(command, fl);
    if (!fl.dump_config.empty()) {
      write_text(fl.dump_config, dump_config(config));
      return exit_ok;
    }
    if (command == "eigen") return cmd_eigen(fl, out);
    if (command == "torsion") return cmd_torsion(fl, out);
    if (command == "cheeger") return cmd_cheeger(fl, out);
    if (command == "verify") return cmd_verify(config, out, err);
    if (command == "sweep") return cmd_sweep(fl, config, out);
    return cmd_study(fl, out);
  } catch (const ConvergenceError &e) {
    fmt::print(err, "error: {}\n", e.what());
    return exit_not_converged;
  } catch (const std::invalid_argument &e) {
    fmt::print(err, "error: {}\n", e.what());
    return exit_usage;
  } catch (const GridTooCoarse &e) {
    fmt::print(err, "error: {}\n", e.what());
    return exit_usage;
  }
}

}  // namespace aniso
