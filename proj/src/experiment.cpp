#include "sglab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include <yaml-cpp/yaml.h>

#include "sglab/bounds.hpp"
#include "sglab/holo.hpp"
#include "sglab/lps.hpp"
#include "sglab/markov.hpp"

namespace sglab {

void Tolerances::set_all(double tol) {
  hille_yosida = contour = rota = subordination = identity = hn = lps = tol;
}

const std::vector<std::string>& task_names() {
  static const std::vector<std::string> names = {
      "validate",     "hille-yosida", "sector-scan", "contour-check", "kato",
      "rota",         "subordination", "g-function", "lps-ratio",     "hn-difference",
      "fractional",   "analyticity",  "bounds-table"};
  return names;
}

// ---------------------------------------------------------------------------
// Spec parsing.

namespace {

const std::map<std::string, std::set<std::string>>& task_params() {
  static const std::map<std::string, std::set<std::string>> params = {
      {"validate", {"t"}},
      {"hille-yosida", {"re", "im", "n_max"}},
      {"sector-scan", {"r", "s", "q_param"}},
      {"contour-check", {"z", "C", "q_param"}},
      {"kato", {"t"}},
      {"rota", {"t"}},
      {"subordination", {"t"}},
      {"g-function", {"q_time", "k", "samples"}},
      {"lps-ratio", {"q_time", "k", "restarts", "m"}},
      {"hn-difference", {"alpha", "q_time", "samples", "m"}},
      {"fractional", {"t", "alpha"}},
      {"analyticity", {"beta0", "angles", "radii"}},
      {"bounds-table", {"q", "m"}},
  };
  return params;
}

int line_of(const YAML::Node& node) {
  const YAML::Mark m = node.Mark();
  return m.line >= 0 ? m.line + 1 : 0;
}

/// Parses "1", "-2.5", "0.1i", "1+0.1i", "1-2i".
std::optional<complex> parse_complex_text(const std::string& raw) {
  std::string s;
  for (char c : raw)
    if (c != ' ') s += c;
  if (s.empty()) return std::nullopt;
  const char* b = s.c_str();
  char* end = nullptr;
  const double first = std::strtod(b, &end);
  if (end == b) {
    if (s == "i" || s == "+i") return complex(0.0, 1.0);
    if (s == "-i") return complex(0.0, -1.0);
    return std::nullopt;
  }
  if (*end == '\0') return complex(first, 0.0);
  if (*end == 'i' && end[1] == '\0') return complex(0.0, first);
  if (*end != '+' && *end != '-') return std::nullopt;
  const char* rest = end;
  char* end2 = nullptr;
  double second = std::strtod(rest, &end2);
  if (end2 == rest) {
    // "a+i" / "a-i"
    if ((rest[0] == '+' || rest[0] == '-') && rest[1] == 'i' && rest[2] == '\0')
      return complex(first, rest[0] == '+' ? 1.0 : -1.0);
    return std::nullopt;
  }
  if (*end2 == 'i' && end2[1] == '\0') return complex(first, second);
  return std::nullopt;
}

complex scalar_value(const YAML::Node& node, const std::string& key) {
  if (!node.IsScalar()) throw SpecError("'" + key + "' entries must be numbers", line_of(node));
  const auto v = parse_complex_text(node.Scalar());
  if (!v) throw SpecError("'" + key + "': cannot parse '" + node.Scalar() + "' as a number",
                          line_of(node));
  return *v;
}

std::vector<complex> param_values(const YAML::Node& node, const std::string& key) {
  std::vector<complex> out;
  if (node.IsScalar()) {
    out.push_back(scalar_value(node, key));
  } else if (node.IsSequence()) {
    for (const auto& item : node) {
      if (item.IsSequence()) {
        if (item.size() != 2) throw SpecError("'" + key + "': complex pairs need [re, im]", line_of(item));
        const complex re = scalar_value(item[0], key), im = scalar_value(item[1], key);
        if (re.imag() != 0.0 || im.imag() != 0.0)
          throw SpecError("'" + key + "': pair entries must be real", line_of(item));
        out.emplace_back(re.real(), im.real());
      } else {
        out.push_back(scalar_value(item, key));
      }
    }
    if (out.empty()) throw SpecError("'" + key + "' must not be empty", line_of(node));
  } else {
    throw SpecError("'" + key + "' must be a number or a list", line_of(node));
  }
  return out;
}

double real_scalar(const YAML::Node& node, const std::string& key) {
  const complex v = scalar_value(node, key);
  if (v.imag() != 0.0) throw SpecError("'" + key + "' must be real", line_of(node));
  return v.real();
}

void check_keys(const YAML::Node& map, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& kv : map) {
    const std::string k = kv.first.as<std::string>();
    if (!allowed.count(k)) throw SpecError("unknown key '" + k + "' in " + where, line_of(kv.first));
  }
}

int int_value(const YAML::Node& node, const std::string& key, int lo) {
  const double v = real_scalar(node, key);
  if (v != std::floor(v) || v < lo || v > 1e9)
    throw SpecError("'" + key + "' must be an integer >= " + std::to_string(lo), line_of(node));
  return static_cast<int>(v);
}

}  // namespace

ExperimentSpec parse_spec(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw SpecError(e.msg, e.mark.line >= 0 ? e.mark.line + 1 : 0);
  }
  if (!root.IsMap()) throw SpecError("the spec file must be a mapping", line_of(root));
  check_keys(root, {"instance", "norms", "seed", "tolerances", "grids", "tasks"}, "spec");

  ExperimentSpec spec;
  if (const auto inst = root["instance"]) {
    if (!inst.IsMap()) throw SpecError("'instance' must be a mapping", line_of(inst));
    check_keys(inst, {"kind", "n", "seed", "rate"}, "instance");
    if (inst["kind"]) spec.instance.kind = inst["kind"].as<std::string>();
    static const std::set<std::string> kinds = {"two_point", "cycle", "complete", "random", "zero"};
    if (!kinds.count(spec.instance.kind))
      throw SpecError("unknown instance kind '" + spec.instance.kind + "'", line_of(inst["kind"]));
    if (inst["n"]) spec.instance.n = int_value(inst["n"], "n", 1);
    if (inst["seed"]) spec.instance.seed = static_cast<std::uint64_t>(int_value(inst["seed"], "seed", 0));
    if (inst["rate"]) {
      spec.instance.rate = real_scalar(inst["rate"], "rate");
      if (!(spec.instance.rate > 0.0)) throw SpecError("'rate' must be positive", line_of(inst["rate"]));
    }
    const std::string& k = spec.instance.kind;
    if (k == "two_point" && inst["n"] && spec.instance.n != 2)
      throw SpecError("two_point instances have n = 2", line_of(inst["n"]));
    if (k == "two_point") spec.instance.n = 2;
    if ((k == "cycle" || k == "complete" || k == "random") && spec.instance.n < 2)
      throw SpecError("'n' must be at least 2 for " + k, line_of(inst));
  }
  if (const auto norms = root["norms"]) {
    if (!norms.IsMap()) throw SpecError("'norms' must be a mapping", line_of(norms));
    check_keys(norms, {"p", "q", "d"}, "norms");
    if (norms["p"]) spec.p = real_scalar(norms["p"], "p");
    if (norms["q"]) spec.q = real_scalar(norms["q"], "q");
    if (norms["d"]) spec.d = int_value(norms["d"], "d", 1);
    try {
      MixedNormConfig(spec.p, spec.q, spec.d);
    } catch (const Error& e) {
      throw SpecError(e.what(), line_of(norms));
    }
  }
  if (const auto s = root["seed"]) spec.seed = static_cast<std::uint64_t>(int_value(s, "seed", 0));
  if (const auto tol = root["tolerances"]) {
    if (!tol.IsMap()) throw SpecError("'tolerances' must be a mapping", line_of(tol));
    check_keys(tol, {"hille_yosida", "contour", "rota", "subordination", "identity", "hn", "lps"},
               "tolerances");
    const auto set = [&](const char* key, double& field) {
      if (!tol[key]) return;
      field = real_scalar(tol[key], key);
      if (!(field > 0.0)) throw SpecError(std::string("'") + key + "' must be positive", line_of(tol[key]));
    };
    set("hille_yosida", spec.tolerances.hille_yosida);
    set("contour", spec.tolerances.contour);
    set("rota", spec.tolerances.rota);
    set("subordination", spec.tolerances.subordination);
    set("identity", spec.tolerances.identity);
    set("hn", spec.tolerances.hn);
    set("lps", spec.tolerances.lps);
  }
  if (const auto grids = root["grids"]) {
    if (!grids.IsMap()) throw SpecError("'grids' must be a mapping", line_of(grids));
    check_keys(grids, {"time_points", "restarts"}, "grids");
    if (grids["time_points"]) spec.time_points = int_value(grids["time_points"], "time_points", 2);
    if (grids["restarts"]) spec.restarts = int_value(grids["restarts"], "restarts", 1);
  }
  const auto tasks = root["tasks"];
  if (!tasks || !tasks.IsSequence() || tasks.size() == 0)
    throw SpecError("'tasks' must be a non-empty list", tasks ? line_of(tasks) : 0);
  for (const auto& t : tasks) {
    TaskSpec task;
    task.line = line_of(t);
    if (t.IsScalar()) {
      task.name = t.Scalar();
    } else if (t.IsMap()) {
      if (!t["name"]) throw SpecError("task entries need a 'name'", task.line);
      task.name = t["name"].as<std::string>();
      const auto it = task_params().find(task.name);
      if (it == task_params().end()) throw SpecError("unknown task '" + task.name + "'", task.line);
      std::set<std::string> allowed = it->second;
      allowed.insert("name");
      check_keys(t, allowed, "task '" + task.name + "'");
      for (const auto& kv : t) {
        const std::string key = kv.first.as<std::string>();
        if (key != "name") task.params[key] = param_values(kv.second, key);
      }
    } else {
      throw SpecError("task entries must be a name or a mapping", task.line);
    }
    if (!task_params().count(task.name)) throw SpecError("unknown task '" + task.name + "'", task.line);
    spec.tasks.push_back(std::move(task));
  }
  return spec;
}

ExperimentSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecError("cannot open spec file '" + path + "'", 0);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_spec(buf.str());
}

// ---------------------------------------------------------------------------
// Bounds table.

std::vector<BoundsTableRow> bounds_table(const std::vector<double>& q_list,
                                         const std::vector<double>& m_list) {
  std::vector<BoundsTableRow> rows;
  for (const double q : q_list)
    for (const double m : m_list) {
      BoundsTableRow r;
      r.q = q;
      r.m = m;
      r.epsilon = epsilon_from_delta(1.0, q);
      r.B = B_constant(q, m);
      const SectorBound sb = analytic_sector_bound_cotype(q, m);
      r.angle = sb.angle;
      r.Tz_bound = sb.Tz_bound;
      r.heat_general = theorem_heat_constant(1, q, q, m, false);
      r.heat_sharp = theorem_heat_constant(1, q, q, m, true);
      r.xu_specialized = xu_specialized(q, m);
      r.ratio = r.xu_specialized / r.heat_sharp;
      rows.push_back(r);
    }
  return rows;
}

// ---------------------------------------------------------------------------
// Task execution.

namespace {

struct Context {
  const ExperimentSpec& spec;
  const DiffusionSemigroup& G;
  MixedNormConfig cfg;
  AscentOptions ascent;
  Tolerances tol;
  std::uint64_t seed;
};

std::vector<complex> param(const TaskSpec& t, const std::string& key, std::vector<complex> fallback) {
  const auto it = t.params.find(key);
  return it == t.params.end() ? std::move(fallback) : it->second;
}

std::vector<double> real_param(const TaskSpec& t, const std::string& key, std::vector<double> fallback) {
  const auto it = t.params.find(key);
  if (it == t.params.end()) return fallback;
  std::vector<double> out;
  for (const complex v : it->second) {
    if (v.imag() != 0.0) throw DomainError("parameter '" + key + "' must be real");
    out.push_back(v.real());
  }
  return out;
}

double real_scalar_param(const TaskSpec& t, const std::string& key, double fallback) {
  const auto v = real_param(t, key, {fallback});
  if (v.size() != 1) throw DomainError("parameter '" + key + "' must be a single value");
  return v.front();
}

int int_param(const TaskSpec& t, const std::string& key, int fallback, int lo) {
  const double v = real_scalar_param(t, key, fallback);
  if (v != std::floor(v) || v < lo) throw DomainError("parameter '" + key + "' must be an integer >= " + std::to_string(lo));
  return static_cast<int>(v);
}

std::string fmt(double x) { return format_number(x); }

std::string fmt(complex z) {
  if (z.imag() == 0.0) return fmt(z.real());
  return fmt(z.real()) + (z.imag() < 0 ? "-" : "+") + fmt(std::abs(z.imag())) + "i";
}

std::vector<double> logspace(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = std::pow(10.0, lo + (hi - lo) * i / (n - 1));
  return v;
}

ReportRow make_row(const std::string& task, const std::string& name, std::string provenance) {
  ReportRow r;
  r.task = task;
  r.name = name;
  r.provenance = std::move(provenance);
  return r;
}

RowStatus check(bool ok) { return ok ? RowStatus::pass : RowStatus::fail; }

FunctionField random_field(int n, int d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  FunctionField f(n, d);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < n; ++i) f(i, j) = normal(rng);
  return f;
}

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

using Rows = std::vector<ReportRow>;

Rows task_validate(const Context& c, const TaskSpec& t) {
  Rows rows;
  const std::string prov = "S >= 0, S1 = 1, mu_i S_ij = mu_j S_ji, ||S||_1 = ||S||_inf = 1";
  for (const double time : real_param(t, "t", {1.0})) {
    if (!(time > 0.0)) throw DomainError("validate: t must be positive");
    const MarkovDiagnostics diag = validate_markov(markov_at(c.G, time), 1e-10);
    const std::vector<std::pair<std::string, double>> measures = {
        {"min_entry", diag.min_entry},
        {"row_sum_defect", diag.max_row_sum_defect},
        {"detailed_balance_defect", diag.max_detailed_balance_defect},
        {"norm_1", diag.norm_1},
        {"norm_inf", diag.norm_inf}};
    ReportRow valid = make_row(t.name, "valid", prov);
    valid.inputs = {{"t", fmt(time)}};
    set_values(valid, diag.valid() ? 1.0 : 0.0);
    valid.status = check(diag.valid());
    valid.error_budget = 1e-10;
    for (const auto& v : diag.violations) {
      if (!valid.note.empty()) valid.note += "; ";
      valid.note += v.invariant + " violated by " + fmt(v.magnitude);
    }
    rows.push_back(valid);
    for (const auto& [name, value] : measures) {
      ReportRow r = make_row(t.name, name, prov);
      r.inputs = {{"t", fmt(time)}};
      set_values(r, value);
      rows.push_back(r);
    }
  }
  return rows;
}

Rows task_hille_yosida(const Context& c, const TaskSpec& t) {
  std::vector<complex> grid;
  for (const double re : real_param(t, "re", {0.1, 1.0, 10.0}))
    for (const double im : real_param(t, "im", {-10.0, -1.0, 0.0, 1.0, 10.0})) grid.emplace_back(re, im);
  const int n_max = int_param(t, "n_max", 5, 1);
  const HilleYosidaReport rep = hille_yosida_check(c.G, c.cfg, grid, n_max, c.tol.hille_yosida, c.ascent);
  ReportRow r = make_row(t.name, "max_resolvent_power", "||R(lambda)^n|| (Re lambda)^n <= M = 1");
  r.inputs = {{"n_max", std::to_string(n_max)}, {"grid_points", std::to_string(grid.size())}};
  set_values(r, rep.max_value, 1.0);
  r.error_budget = c.tol.hille_yosida;
  r.status = check(rep.passed);
  r.note = "argmax lambda=" + fmt(rep.argmax_lambda) + " n=" + std::to_string(rep.argmax_n);
  if (!c.cfg.hilbert()) r.note += "; ascent lower estimate";
  return {r};
}

Rows task_sector_scan(const Context& c, const TaskSpec& t) {
  const std::vector<double> r_grid = real_param(t, "r", logspace(-3, 3, 13));
  std::vector<double> s_grid = real_param(t, "s", {});
  if (s_grid.empty())
    for (const double s : logspace(-3, 3, 13)) {
      s_grid.push_back(s);
      s_grid.push_back(-s);
    }
  const double q_param = real_scalar_param(t, "q_param", 0.5);
  const double C = sector_constant(c.G, c.cfg, r_grid, s_grid, c.ascent);
  ReportRow r = make_row(t.name, "empirical C on grid", "C = sup |s| ||R(r + is, A)||");
  r.inputs = {{"r_points", std::to_string(r_grid.size())}, {"s_points", std::to_string(s_grid.size())}};
  set_values(r, C);
  r.note = "lower bound for the constant over the whole half-plane";
  ReportRow b = make_row(t.name, "resolvent_sector_bound", "||lambda R(lambda)|| <= sqrt(C^2 + M^2) / (1 - q)");
  b.inputs = {{"C", fmt(std::max(C, 1.0))}, {"M", "1"}, {"q", fmt(q_param)}};
  set_values(b, resolvent_sector_bound(std::max(C, 1.0), 1.0, q_param));
  return {r, b};
}

Rows task_contour(const Context& c, const TaskSpec& t) {
  const double C = real_scalar_param(t, "C", 1.0);
  const double q_param = real_scalar_param(t, "q_param", 0.5);
  Rows rows;
  for (const complex z : param(t, "z", {1.0, 2.0, complex(1.0, 0.1), complex(1.0, -0.1)})) {
    ContourOptions opts;
    opts.tol = c.tol.contour / 100.0;
    const ContourResult cr = contour_exp(c.G, z, C, q_param, opts);
    const CMatrix ref = semigroup_at(c.G, z);
    const double rel = max_abs(cr.matrix - ref) / max_abs(ref);
    ReportRow r = make_row(t.name, "relative_error", "e^{zA} = (1/2 pi i) int e^{mu z} R(mu, A) d mu");
    r.inputs = {{"z", fmt(z)}, {"C", fmt(C)}, {"q_param", fmt(q_param)}};
    set_values(r, rel);
    r.error_budget = c.tol.contour;
    r.status = check(rel <= c.tol.contour);
    r.note = "nodes=" + std::to_string(cr.nodes) + " r_max=" + fmt(cr.contour.r_max) +
             " achieved=" + fmt(cr.achieved);
    rows.push_back(r);
  }
  return rows;
}

Rows task_kato(const Context& c, const TaskSpec& t) {
  const std::vector<double> grid = default_time_grid(c.G, c.spec.time_points);
  const KatoResult k = kato_epsilon(c.G, c.cfg, grid, c.ascent);
  Rows rows;
  ReportRow e = make_row(t.name, "epsilon", "eps = 2 - sup_t ||I - T_t||");
  e.inputs = {{"time_points", std::to_string(grid.size())}};
  set_values(e, k.epsilon);
  e.note = "argmax t=" + fmt(k.argmax_t);
  for (const auto& w : k.warnings) e.note += "; " + w;
  rows.push_back(e);

  const DerivativeSup ds = max_t_derivative(c.G, c.cfg, grid, c.ascent);
  ReportRow d = make_row(t.name, "sup_t_derivative",
                         "sup_t ||t T'(t)|| <= (M^4 / eps^2)(1 + log(M / eps)), up to absolute constant");
  d.inputs = {{"M", "1"}, {"eps", fmt(k.epsilon)}};
  if (k.epsilon > 0.0) {
    const KatoBounds kb = kato_bounds(1.0, k.epsilon);
    set_values(d, ds.sup_value, kb.tTprime_bound);
    ReportRow z = make_row(t.name, "Tz_bound", "||T(z)|| <= (M^2 / eps)(1 + log(M / eps)), up to absolute constant");
    z.inputs = d.inputs;
    set_values(z, kb.Tz_bound);
    z.note = "theta=" + fmt(kb.theta);
    rows.push_back(d);
    rows.push_back(z);
  } else {
    set_values(d, ds.sup_value);
    rows.push_back(d);
  }
  rows.back().note += (rows.back().note.empty() ? "" : "; ") + std::string("argmax t=") + fmt(ds.argmax_t);

  for (const double time : real_param(t, "t", {1.0})) {
    const double K = kato_criterion_check(markov_at(c.G, time), -1.0, c.cfg, c.ascent);
    ReportRow r = make_row(t.name, "kato_criterion_K", "K = 1 / inf ||(zeta I - T_t) x||, zeta = -1; K <= 1 / eps");
    r.inputs = {{"t", fmt(time)}, {"zeta", "-1"}};
    set_values(r, K, k.epsilon > 0.0 ? std::optional<double>(1.0 / k.epsilon) : std::nullopt);
    rows.push_back(r);
  }
  return rows;
}

Rows task_rota(const Context& c, const TaskSpec& t) {
  Rows rows;
  for (const double time : real_param(t, "t", {1.0})) {
    if (!(time > 0.0)) throw DomainError("rota: t must be positive");
    const MarkovOperator S = markov_at(c.G, time / 2.0);
    const DilationBundle bundle = build_rota_dilation(S);
    const double dev = rota_deviation(bundle, S);
    ReportRow r = make_row(t.name, "max_deviation", "T = S^2 = E_A E_B on the product dilation");
    r.inputs = {{"t", fmt(time)}};
    set_values(r, dev);
    r.error_budget = c.tol.rota;
    r.status = check(dev <= c.tol.rota);
    r.note = "atoms=" + std::to_string(bundle.atoms.size());
    rows.push_back(r);
  }
  return rows;
}

Rows task_subordination(const Context& c, const TaskSpec& t) {
  Rows rows;
  for (const double time : real_param(t, "t", {0.01, 1.0, 100.0})) {
    SubordinationOptions opts;
    opts.tol = c.tol.subordination / 100.0;
    const SubordinationResult s = subordinated_poisson(c.G, time, opts);
    const Matrix ref = poisson_spectral(c.G, time);
    const double rel = (s.matrix - ref).cwiseAbs().maxCoeff() / ref.cwiseAbs().maxCoeff();
    ReportRow r = make_row(t.name, "relative_error",
                           "pi^{-1/2} int e^{-s} s^{-1/2} T_{t^2/(4s)} ds = e^{-t sqrt(-A)}");
    r.inputs = {{"t", fmt(time)}};
    set_values(r, rel);
    r.error_budget = c.tol.subordination;
    r.status = check(rel <= c.tol.subordination);
    r.note = "panels=" + std::to_string(s.panels) + " achieved=" + fmt(s.achieved);
    rows.push_back(r);
  }
  return rows;
}

Rows task_g_function(const Context& c, const TaskSpec& t, std::uint64_t seed) {
  const double q_time = real_scalar_param(t, "q_time", 2.0);
  const int k = int_param(t, "k", 1, 1);
  const int samples = int_param(t, "samples", 5, 1);
  const TimeGrid grid = default_time_grid_lps(c.G);
  const bool identity = c.cfg.hilbert() && q_time == 2.0 && k == 1;
  const Matrix Pi = c.G.kernel_projection();
  Rows rows;
  for (int s = 0; s < samples; ++s) {
    const FunctionField f = random_field(c.G.size(), c.cfg.d(), seed + s);
    const GFunctionResult g = g_function(c.G, f, c.cfg, q_time, k, grid);
    ReportRow r = make_row(t.name, "g_norm", identity ? "||G_{2,1} f||_2 = ||f - Pi f||_2 / 2"
                                                      : "||(int ||t^k d^k T_t f||^q dt/t)^{1/q}||_p");
    r.inputs = {{"sample", std::to_string(s)}, {"q_time", fmt(q_time)}, {"k", std::to_string(k)}};
    r.error_budget = g.quad_error;
    if (identity) {
      const double rhs = 0.5 * mixed_norm(f - Pi * f, c.G.space(), c.cfg);
      set_values(r, g.lp_norm, rhs);
      r.error_budget = std::max(c.tol.identity, g.quad_error);
      r.status = check(std::abs(g.lp_norm - rhs) <= r.error_budget);
    } else {
      set_values(r, g.lp_norm);
    }
    r.note = "panels=" + std::to_string(g.panels);
    rows.push_back(r);
  }
  return rows;
}

Rows task_lps_ratio(const Context& c, const TaskSpec& t) {
  const double q_time = real_scalar_param(t, "q_time", 2.0);
  const int k = int_param(t, "k", 1, 1);
  const double m = real_scalar_param(t, "m", 1.0);
  AscentOptions opts = c.ascent;
  opts.restarts = int_param(t, "restarts", c.ascent.restarts, 1);
  const LpsRatioResult res = lps_ratio(c.G, c.cfg, q_time, k, default_time_grid_lps(c.G), opts);
  Rows rows;
  ReportRow r = make_row(t.name, "lps_ratio",
                         "sup ||G f|| / ||f|| <= k^{k-1} B^2 m, up to a constant depending on p, q");
  r.inputs = {{"q_time", fmt(q_time)}, {"k", std::to_string(k)}, {"m", fmt(m)},
              {"restarts", std::to_string(opts.restarts)}};
  set_values(r, res.value, theorem_heat_constant(k, c.cfg.p(), c.cfg.q(), m, false));
  r.note = "lower bound";
  if (!res.converged) r.note += "; optimizer did not stagnate within the iteration cap";
  rows.push_back(r);
  if (c.cfg.hilbert() && q_time == 2.0 && k == 1 && c.G.spectral_gap() > 0.0) {
    ReportRow h = make_row(t.name, "lps_ratio_hilbert", "sup ||G_{2,1} f||_2 / ||f||_2 = 1/2");
    h.inputs = r.inputs;
    set_values(h, res.value, 0.5);
    h.error_budget = c.tol.lps;
    h.status = check(std::abs(res.value - 0.5) <= c.tol.lps);
    rows.push_back(h);
  }
  return rows;
}

Rows task_hn(const Context& c, const TaskSpec& t, std::uint64_t seed) {
  const double q_time = real_scalar_param(t, "q_time", c.cfg.q());
  const int samples = int_param(t, "samples", 5, 1);
  const double m = real_scalar_param(t, "m", 1.0);
  const TimeGrid grid = default_time_grid_lps(c.G);
  const bool hard = c.cfg.hilbert() && q_time == 2.0 && m >= 1.0;
  Rows rows;
  for (const double alpha : real_param(t, "alpha", {2.0, 3.0, 10.0}))
    for (int s = 0; s < samples; ++s) {
      const FunctionField f = random_field(c.G.size(), c.cfg.d(), seed + s);
      const FunctionalValue v = semigroup_difference_functional(c.G, f, c.cfg, alpha, q_time, grid);
      const double bound = std::pow(std::log(alpha), 1.0 / c.cfg.q()) * m * mixed_norm(f, c.G.space(), c.cfg);
      ReportRow r = make_row(t.name, "difference_functional",
                             "(int ||(T_t - T_{alpha t}) f||^q dt/t)^{1/q} <= (log alpha)^{1/q} m ||f||");
      r.inputs = {{"alpha", fmt(alpha)}, {"sample", std::to_string(s)}, {"q_time", fmt(q_time)}, {"m", fmt(m)}};
      set_values(r, v.value, bound);
      r.error_budget = v.quad_error;
      if (hard) {
        r.error_budget = c.tol.hn;
        r.status = check(v.value <= bound + c.tol.hn);
      }
      rows.push_back(r);
    }
  return rows;
}

Rows task_fractional(const Context& c, const TaskSpec& t, std::uint64_t seed) {
  Rows rows;
  const FunctionField f = random_field(c.G.size(), c.cfg.d(), seed);
  const Matrix coeffs = c.G.coefficients(f);
  const Vector& lam = c.G.eigenvalues();
  const auto spectral = [&](const std::function<double(double)>& fac) -> Matrix {
    Vector v(lam.size());
    for (Eigen::Index j = 0; j < lam.size(); ++j) v(j) = fac(lam(j));
    return c.G.eigenvectors() * (v.asDiagonal() * coeffs);
  };
  for (const double time : real_param(t, "t", {1.0})) {
    struct Check {
      const char* name;
      double alpha;
      const char* prov;
      std::function<double(double)> factor;
    };
    const std::vector<Check> checks = {
        {"M^0 = T_t", 0.0, "M^0_t f = T_t f", [time](double l) { return std::exp(time * l); }},
        {"M^1 = running average", 1.0, "M^1_t f = (1/t) int_0^t T_s f ds",
         [time](double l) { return l == 0.0 ? 1.0 : std::expm1(time * l) / (time * l); }},
        {"M^-1 = t dT_t", -1.0, "M^{-1}_t f = t d/dt T_t f",
         [time](double l) { return time * l * std::exp(time * l); }},
    };
    for (const auto& ch : checks) {
      const ComplexField got = fractional_average(c.G, f, ch.alpha, time);
      const Matrix want = spectral(ch.factor);
      const double dev = (got - want.cast<complex>()).cwiseAbs().maxCoeff();
      ReportRow r = make_row(t.name, ch.name, ch.prov);
      r.inputs = {{"t", fmt(time)}, {"alpha", fmt(ch.alpha)}};
      set_values(r, dev);
      r.error_budget = c.tol.identity;
      r.status = check(dev <= c.tol.identity);
      rows.push_back(r);
    }
    for (const complex alpha : param(t, "alpha", {})) {
      const ComplexField got = fractional_average(c.G, f, alpha, time);
      ReportRow r = make_row(t.name, "norm M^alpha_t f", "M^alpha_t f = t^{-alpha} I^alpha (s -> T_s f)(t)");
      r.inputs = {{"t", fmt(time)}, {"alpha", fmt(alpha)}};
      set_values(r, mixed_norm(got, c.G.space(), c.cfg));
      rows.push_back(r);
    }
  }
  return rows;
}

Rows task_analyticity(const Context& c, const TaskSpec& t) {
  const double beta0 = real_scalar_param(t, "beta0", std::numbers::pi / 4.0);
  const int angles = int_param(t, "angles", 24, 1);
  const int radii = int_param(t, "radii", 40, 2);
  const double T = analyticity_constant(c.G, c.cfg, beta0, c.ascent, angles, radii);
  ReportRow r = make_row(t.name, "analyticity_constant", "T_beta0 = sup{||T_z|| : |arg z| < beta0}");
  r.inputs = {{"beta0", fmt(beta0)}, {"angles", std::to_string(angles)}, {"radii", std::to_string(radii)}};
  set_values(r, T);
  r.note = "empirical lower bound on the grid";
  return {r};
}

Rows task_bounds_table(const TaskSpec& t) {
  Rows rows;
  for (const auto& b : bounds_table(real_param(t, "q", {2.0, 3.0}), real_param(t, "m", {1.0, 2.0}))) {
    const std::vector<std::pair<std::string, std::string>> in = {{"q", fmt(b.q)}, {"m", fmt(b.m)}};
    const auto add = [&](const char* name, double value, const char* prov) {
      ReportRow r = make_row(t.name, name, prov);
      r.inputs = in;
      set_values(r, value);
      rows.push_back(r);
    };
    add("epsilon", b.epsilon, "eps = 2 delta / ((1 + 2 delta) q), delta = 1");
    add("B", b.B, "B = q^2 m^{2q+1} (1 + log q + q log m)");
    add("sector_angle", b.angle, "|arg z| < 1 / (q m^q), up to absolute constant");
    add("Tz_bound", b.Tz_bound, "||T(z)|| <= q m^{q+1} (1 + log q + q log m), up to absolute constant");
    add("heat_constant", b.heat_general, "k^{k-1} B^2 m, k = 1");
    add("heat_constant_sharp", b.heat_sharp, "B m, p = q, k = 1");
    add("xu_specialized", b.xu_specialized, "(q m^q)^2 B m");
    ReportRow r = make_row(t.name, "approach_ratio", "(q m^q)^2 B m / (B m) = (q m^q)^2");
    r.inputs = in;
    const double s = b.q * std::pow(b.m, b.q);
    set_values(r, b.ratio, s * s);
    r.error_budget = 1e-12 * s * s;
    r.status = check(std::abs(b.ratio - s * s) <= r.error_budget);
    rows.push_back(r);
  }
  return rows;
}

DiffusionSemigroup make_instance(const InstanceSpec& in) {
  if (in.kind == "two_point") return two_point_chain(in.rate);
  if (in.kind == "cycle") return cycle_chain(in.n);
  if (in.kind == "complete") return complete_graph_chain(in.n);
  if (in.kind == "random") return random_reversible_chain(in.n, in.seed);
  if (in.kind == "zero") return zero_chain(in.n);
  throw SpecError("unknown instance kind '" + in.kind + "'", 0);
}

Rows run_task(const Context& c, const TaskSpec& t, std::size_t index) {
  const std::uint64_t seed = c.seed * 1000003ULL + 7919ULL * (index + 1);
  try {
    if (t.name == "validate") return task_validate(c, t);
    if (t.name == "hille-yosida") return task_hille_yosida(c, t);
    if (t.name == "sector-scan") return task_sector_scan(c, t);
    if (t.name == "contour-check") return task_contour(c, t);
    if (t.name == "kato") return task_kato(c, t);
    if (t.name == "rota") return task_rota(c, t);
    if (t.name == "subordination") return task_subordination(c, t);
    if (t.name == "g-function") return task_g_function(c, t, seed);
    if (t.name == "lps-ratio") return task_lps_ratio(c, t);
    if (t.name == "hn-difference") return task_hn(c, t, seed);
    if (t.name == "fractional") return task_fractional(c, t, seed);
    if (t.name == "analyticity") return task_analyticity(c, t);
    if (t.name == "bounds-table") return task_bounds_table(t);
    throw DomainError("unknown task '" + t.name + "'");
  } catch (const ConvergenceError& e) {
    ReportRow r = make_row(t.name, "error", "");
    set_values(r, e.achieved());
    r.status = RowStatus::nonconvergence;
    r.note = e.what();
    return {r};
  } catch (const std::exception& e) {
    ReportRow r = make_row(t.name, "error", "");
    r.status = RowStatus::error;
    r.note = e.what();
    return {r};
  }
}

bool failed(const Rows& rows) {
  return std::any_of(rows.begin(), rows.end(), [](const ReportRow& r) {
    return r.status == RowStatus::fail || r.status == RowStatus::error ||
           r.status == RowStatus::nonconvergence;
  });
}

}  // namespace

RunResult run_experiment(const ExperimentSpec& spec, const RunOptions& opts) {
  const DiffusionSemigroup G = make_instance(spec.instance);
  Tolerances tol = spec.tolerances;
  if (opts.tol) {
    if (!(*opts.tol > 0.0)) throw SpecError("--tol must be positive", 0);
    tol.set_all(*opts.tol);
  }
  const std::uint64_t seed = opts.seed.value_or(spec.seed);
  AscentOptions ascent;
  ascent.restarts = spec.restarts;
  ascent.seed = seed;
  const Context ctx{spec, G, MixedNormConfig(spec.p, spec.q, spec.d), ascent, tol, seed};

  const std::size_t n = spec.tasks.size();
  std::vector<Rows> results(n);
  std::size_t done = n;
  if (opts.fail_fast || opts.jobs <= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      results[i] = run_task(ctx, spec.tasks[i], i);
      if (opts.fail_fast && failed(results[i])) {
        done = i + 1;
        break;
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    const int jobs = std::min<int>(opts.jobs, static_cast<int>(n));
    for (int w = 0; w < jobs; ++w)
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) results[i] = run_task(ctx, spec.tasks[i], i);
      });
    for (auto& th : workers) th.join();
  }

  RunResult out;
  bool any_fail = false, any_nonconv = false;
  for (std::size_t i = 0; i < done; ++i)
    for (auto& row : results[i]) {
      any_fail = any_fail || row.status == RowStatus::fail || row.status == RowStatus::error;
      any_nonconv = any_nonconv || row.status == RowStatus::nonconvergence;
      out.report.rows.push_back(std::move(row));
    }
  out.exit_code = any_nonconv ? 3 : any_fail ? 1 : 0;
  return out;
}

void write_reports(const Report& report, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const auto write = [&](const char* name, const std::string& text) {
    std::ofstream out(std::filesystem::path(dir) / name, std::ios::binary);
    if (!out) throw Error(std::string("cannot write ") + name);
    out << text;
  };
  write("report.csv", to_csv(report));
  write("report.json", to_json(report));
}

}  // namespace sglab
