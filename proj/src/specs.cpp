#include "aniso/specs.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <nlohmann/json.hpp>

#include "text.hpp"

namespace aniso {

using detail::parse_number;
using detail::parse_numbers;
using detail::split;
using detail::trim;

namespace {

int parse_int(std::string_view s) {
  const double v = parse_number(s);
  if (v != std::floor(v) || std::abs(v) > 1e9) throw std::invalid_argument(fmt::format("not an integer: '{}'", s));
  return static_cast<int>(v);
}

bool parse_bool(std::string_view s) {
  s = trim(s);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw std::invalid_argument(fmt::format("not a boolean: '{}'", s));
}

}  // namespace

ConvexPolygon parse_domain(std::string_view text, const MinkowskiNorm &f) {
  text = trim(text);
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw std::invalid_argument(fmt::format("bad domain spec '{}'", text));
  const auto kind = text.substr(0, colon);
  const auto body = text.substr(colon + 1);
  if (kind == "poly") {
    std::vector<Vec2> v;
    for (auto pt : split(body, ';')) {
      const auto xy = parse_numbers(pt, ',');
      if (xy.size() != 2) throw std::invalid_argument(fmt::format("bad vertex '{}' in '{}'", pt, text));
      v.push_back({xy[0], xy[1]});
    }
    return ConvexPolygon(std::move(v), std::string(text));
  }
  const auto args = parse_numbers(body, ',');
  if (args.size() == 2) {
    if (kind == "rect") {
      if (!(args[0] > 0.0 && args[1] > 0.0)) throw std::invalid_argument("rect needs positive a and k");
      return ConvexPolygon::rectangle(args[0], args[1]);
    }
    if (kind == "regular") return ConvexPolygon::regular(parse_int(trim(split(body, ',')[0])), args[1]);
    if (kind == "wulff") return ConvexPolygon::wulff(f, args[0], parse_int(trim(split(body, ',')[1])));
  }
  throw std::invalid_argument(fmt::format("bad domain spec '{}'", text));
}

double default_spacing(const ConvexPolygon &omega) {
  const BoundingBox box = omega.bounds();
  return std::min(omega.diameter() / 128.0, std::min(box.width(), box.height()) / 48.0);
}

std::string CaseSpec::id() const { return fmt::format("{}|{}|p={}", domain, norm, p); }

void validate(const CaseSpec &spec) {
  const auto f = MinkowskiNorm::parse(spec.norm);
  parse_domain(spec.domain, f);
  if (!(spec.p > 1.0)) throw std::invalid_argument(fmt::format("exponent p must exceed 1, got {}", spec.p));
  if (!(spec.h >= 0.0)) throw std::invalid_argument(fmt::format("grid spacing must be nonnegative, got {}", spec.h));
  if (!(spec.tol > 0.0)) throw std::invalid_argument(fmt::format("tolerance must be positive, got {}", spec.tol));
}

const std::vector<std::string> &inequality_ids() {
  static const std::vector<std::string> ids{"H",   "cheeger", "bettercheeger", "rc",  "pol",  "payneineq",
                                            "func", "ue",     "ue2",           "hrl", "hru",  "fkh",
                                            "stab", "stima_max", "isop",       "mp"};
  return ids;
}

std::map<std::string, Tolerance> default_tolerances() {
  std::map<std::string, Tolerance> t;
  for (const auto &id : inequality_ids()) t[id] = Tolerance{};
  // Solver-dependent sides carry a discretization allowance.
  for (const char *id : {"H", "cheeger", "bettercheeger", "rc", "pol", "payneineq", "func", "ue", "ue2",
                         "stima_max", "mp"})
    t[id].grid = 1.0;
  t["fkh"].relative = 1e-3;
  return t;
}

std::vector<CaseSpec> default_catalog() {
  std::vector<CaseSpec> out;
  for (const char *d : {"rect:1,1", "rect:1,4", "regular:6,1", "wulff:1,256"})
    for (const char *n : {"lq:2", "lq:4", "ellipse:4,0,1"})
      for (double p : {1.5, 2.0, 3.0}) out.push_back(CaseSpec{d, n, p, 0.0, 1e-8});
  return out;
}

namespace {

struct Catalog {
  std::vector<std::string> domains;
  std::vector<std::string> norms;
  std::vector<double> ps;
  double h = 0.0;
  double tol = 1e-8;
  bool present = false;

  void expand(std::vector<CaseSpec> &out) const {
    if (!present) return;
    for (const auto &d : domains)
      for (const auto &n : norms)
        for (double p : ps) out.push_back(CaseSpec{d, n, p, h, tol});
  }
};

Tolerance parse_tolerance(std::string_view value) {
  const auto v = parse_numbers(value, ',');
  if (v.size() != 2 || !(v[0] >= 0.0) || !(v[1] >= 0.0)) {
    throw std::invalid_argument(fmt::format("tolerance needs '<relative>, <grid>', got '{}'", value));
  }
  return {v[0], v[1]};
}

void check_tolerance_id(const std::string &id) {
  const auto &ids = inequality_ids();
  if (std::find(ids.begin(), ids.end(), id) == ids.end()) {
    throw std::invalid_argument(fmt::format("unknown inequality id '{}'", id));
  }
}

RunConfig parse_json(std::string_view text) {
  using nlohmann::json;
  const json doc = json::parse(text);
  RunConfig c;
  c.tolerances = default_tolerances();
  if (doc.contains("run")) {
    const auto &r = doc.at("run");
    c.command = r.value("command", c.command);
    c.out = r.value("out", c.out);
    c.jobs = r.value("jobs", c.jobs);
    c.strict = r.value("strict", c.strict);
    c.cheeger_m = r.value("cheeger_m", c.cheeger_m);
  }
  if (doc.contains("tolerance")) {
    for (const auto &[id, t] : doc.at("tolerance").items()) {
      check_tolerance_id(id);
      c.tolerances[id] = Tolerance{t.at("relative").get<double>(), t.at("grid").get<double>()};
    }
  }
  if (doc.contains("catalog")) {
    const auto &j = doc.at("catalog");
    Catalog cat;
    cat.present = true;
    cat.domains = j.at("domain").get<std::vector<std::string>>();
    cat.norms = j.at("norm").get<std::vector<std::string>>();
    cat.ps = j.at("p").get<std::vector<double>>();
    cat.h = j.value("h", 0.0);
    cat.tol = j.value("tol", 1e-8);
    cat.expand(c.cases);
  }
  if (doc.contains("cases")) {
    for (const auto &j : doc.at("cases")) {
      c.cases.push_back(CaseSpec{j.at("domain").get<std::string>(), j.at("norm").get<std::string>(),
                                 j.at("p").get<double>(), j.value("h", 0.0), j.value("tol", 1e-8)});
    }
  }
  if (doc.contains("sweep")) {
    const auto &j = doc.at("sweep");
    c.sweep.a = j.value("a", c.sweep.a);
    c.sweep.k = j.value("k", c.sweep.k);
    c.sweep.norm = j.value("norm", c.sweep.norm);
    c.sweep.p = j.value("p", c.sweep.p);
    c.sweep.h = j.value("h", c.sweep.h);
  }
  return c;
}

}  // namespace

RunConfig parse_config(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  RunConfig c;
  if (first != std::string_view::npos && text[first] == '{') {
    try {
      c = parse_json(text);
    } catch (const nlohmann::json::exception &e) {
      throw std::invalid_argument(fmt::format("bad JSON config: {}", e.what()));
    }
  } else {
    c.tolerances = default_tolerances();
    std::string section;
    Catalog cat;
    int line_no = 0;
    for (auto raw : split(text, '\n')) {
      ++line_no;
      auto line = trim(raw.substr(0, raw.find('#')));
      if (line.empty()) continue;
      try {
        if (line.front() == '[') {
          if (line.back() != ']') throw std::invalid_argument("unterminated section header");
          section = std::string(trim(line.substr(1, line.size() - 2)));
          if (section == "case") {
            c.cases.push_back(CaseSpec{});
          } else if (section == "catalog") {
            if (cat.present) throw std::invalid_argument("only one [catalog] section is allowed");
            cat.present = true;
          } else if (section != "run" && section != "tolerance" && section != "sweep") {
            throw std::invalid_argument(fmt::format("unknown section [{}]", section));
          }
          continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw std::invalid_argument("expected 'key = value'");
        const std::string key(trim(line.substr(0, eq)));
        const auto value = trim(line.substr(eq + 1));
        auto unknown = [&] { return std::invalid_argument(fmt::format("unknown key '{}' in [{}]", key, section)); };
        if (section == "run") {
          if (key == "command") c.command = std::string(value);
          else if (key == "out") c.out = std::string(value);
          else if (key == "jobs") c.jobs = parse_int(value);
          else if (key == "strict") c.strict = parse_bool(value);
          else if (key == "cheeger_m") c.cheeger_m = parse_int(value);
          else throw unknown();
        } else if (section == "tolerance") {
          check_tolerance_id(key);
          c.tolerances[key] = parse_tolerance(value);
        } else if (section == "catalog") {
          if (key == "domain") cat.domains.emplace_back(value);
          else if (key == "norm") cat.norms.emplace_back(value);
          else if (key == "p") {
            for (double p : parse_numbers(value, ',')) cat.ps.push_back(p);
          } else if (key == "h") cat.h = parse_number(value);
          else if (key == "tol") cat.tol = parse_number(value);
          else throw unknown();
        } else if (section == "case") {
          CaseSpec *current = &c.cases.back();
          if (key == "domain") current->domain = std::string(value);
          else if (key == "norm") current->norm = std::string(value);
          else if (key == "p") current->p = parse_number(value);
          else if (key == "h") current->h = parse_number(value);
          else if (key == "tol") current->tol = parse_number(value);
          else throw unknown();
        } else if (section == "sweep") {
          if (key == "a") c.sweep.a = parse_number(value);
          else if (key == "k") c.sweep.k = parse_numbers(value, ',');
          else if (key == "norm") c.sweep.norm = std::string(value);
          else if (key == "p") c.sweep.p = parse_number(value);
          else if (key == "h") c.sweep.h = parse_number(value);
          else throw unknown();
        } else {
          throw std::invalid_argument("key outside of a section");
        }
      } catch (const std::invalid_argument &e) {
        throw std::invalid_argument(fmt::format("config line {}: {}", line_no, e.what()));
      }
    }
    // Catalog cases come first, explicit [case] sections after.
    std::vector<CaseSpec> expanded;
    cat.expand(expanded);
    c.cases.insert(c.cases.begin(), expanded.begin(), expanded.end());
  }
  if (c.jobs < 1) throw std::invalid_argument("jobs must be at least 1");
  if (c.cheeger_m < 3) throw std::invalid_argument("cheeger_m must be at least 3");
  for (const auto &s : c.cases) validate(s);
  return c;
}

RunConfig load_config(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument(fmt::format("cannot read config '{}'", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string dump_config(const RunConfig &c) {
  std::string s;
  auto out = std::back_inserter(s);
  fmt::format_to(out, "[run]\ncommand = {}\nout = {}\njobs = {}\nstrict = {}\ncheeger_m = {}\n\n", c.command, c.out,
                 c.jobs, c.strict, c.cheeger_m);
  fmt::format_to(out, "[tolerance]\n");
  for (const auto &[id, t] : c.tolerances) fmt::format_to(out, "{} = {}, {}\n", id, t.relative, t.grid);
  fmt::format_to(out, "\n[sweep]\na = {}\nk = {}\nnorm = {}\np = {}\nh = {}\n", c.sweep.a,
                 fmt::join(c.sweep.k, ", "), c.sweep.norm, c.sweep.p, c.sweep.h);
  for (const auto &cs : c.cases) {
    fmt::format_to(out, "\n[case]\ndomain = {}\nnorm = {}\np = {}\nh = {}\ntol = {}\n", cs.domain, cs.norm, cs.p,
                   cs.h, cs.tol);
  }
  return s;
}

}  // namespace aniso
