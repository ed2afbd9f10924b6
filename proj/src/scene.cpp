#include "gcrlab/scene.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "gcrlab/errors.hpp"
#include "gcrlab/field_dump.hpp"

namespace gcr {
namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  throw ConfigError(where + ": " + what);
}

void allow_keys(const json& obj, std::initializer_list<const char*> keys, const std::string& where) {
  if (!obj.is_object()) bad(where, "expected an object");
  std::set<std::string> ok(keys.begin(), keys.end());
  for (const auto& [key, value] : obj.items()) {
    if (!ok.count(key)) bad(where, "unknown key '" + key + "'");
  }
}

const json* find(const json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

const json& need(const json& obj, const char* key, const std::string& where) {
  const json* v = find(obj, key);
  if (!v) bad(where, std::string("missing key '") + key + "'");
  return *v;
}

double as_double(const json& v, const std::string& where) {
  if (!v.is_number()) bad(where, "expected a number");
  return v.get<double>();
}

long long as_integer(const json& v, const std::string& where) {
  if (v.is_number_integer()) return v.get<long long>();
  if (v.is_number_float()) {
    const double x = v.get<double>();
    if (std::floor(x) == x && std::abs(x) < 9e15) return static_cast<long long>(x);
  }
  bad(where, "expected an integer");
}

int as_int(const json& v, const std::string& where) {
  const long long x = as_integer(v, where);
  if (x < -2147483647LL || x > 2147483647LL) bad(where, "integer out of range");
  return static_cast<int>(x);
}

std::string as_string(const json& v, const std::string& where) {
  if (!v.is_string()) bad(where, "expected a string");
  return v.get<std::string>();
}

bool as_bool(const json& v, const std::string& where) {
  if (!v.is_boolean()) bad(where, "expected true or false");
  return v.get<bool>();
}

double opt_double(const json& obj, const char* key, double fallback, const std::string& where) {
  const json* v = find(obj, key);
  return v ? as_double(*v, where + "." + key) : fallback;
}

int opt_int(const json& obj, const char* key, int fallback, const std::string& where) {
  const json* v = find(obj, key);
  return v ? as_int(*v, where + "." + key) : fallback;
}

template <class T, class F>
std::vector<T> as_list(const json& v, const std::string& where, F&& item) {
  if (!v.is_array()) bad(where, "expected an array");
  std::vector<T> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(item(v[i], where + "[" + std::to_string(i + 1) + "]"));
  return out;
}

std::vector<int> int_list(const json& v, const std::string& where) {
  return as_list<int>(v, where, as_int);
}

std::vector<double> double_list(const json& v, const std::string& where) {
  return as_list<double>(v, where, as_double);
}

// 6.28..., "2pi", "pi", "0.5pi"
double box_length(const json& v, const std::string& where) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    std::string s = v.get<std::string>();
    if (s.size() >= 2 && s.compare(s.size() - 2, 2, "pi") == 0) {
      const std::string head = s.substr(0, s.size() - 2);
      if (head.empty()) return std::numbers::pi;
      std::size_t used = 0;
      try {
        const double k = std::stod(head, &used);
        if (used == head.size()) return k * std::numbers::pi;
      } catch (const std::exception&) {
      }
    }
  }
  bad(where, "expected a number or a multiple of pi such as \"2pi\"");
}

// d x d from nested arrays or a flat array
std::vector<double> matrix(const json& v, int n, const std::string& where) {
  if (!v.is_array()) bad(where, "expected an array");
  std::vector<double> out;
  if (!v.empty() && v[0].is_array()) {
    if (static_cast<int>(v.size()) != n) bad(where, "expected " + std::to_string(n) + " rows");
    for (std::size_t r = 0; r < v.size(); ++r) {
      auto row = double_list(v[r], where + "[" + std::to_string(r + 1) + "]");
      if (static_cast<int>(row.size()) != n) bad(where, "expected " + std::to_string(n) + " columns");
      out.insert(out.end(), row.begin(), row.end());
    }
  } else {
    out = double_list(v, where);
    if (static_cast<int>(out.size()) != n * n) bad(where, "expected " + std::to_string(n * n) + " entries");
  }
  return out;
}

Profile profile(const json& v, const std::string& where) {
  const std::string s = as_string(v, where);
  if (s == "sin") return Profile::Sin;
  if (s == "cos") return Profile::Cos;
  bad(where, "profile must be \"sin\" or \"cos\"");
}

TrigPolynomial poly(const json& v, int d, const std::string& where) {
  if (v.is_number()) return TrigPolynomial::constant_value(v.get<double>());
  allow_keys(v, {"constant", "terms", "label"}, where);
  TrigPolynomial p;
  p.constant = opt_double(v, "constant", 0.0, where);
  if (const json* terms = find(v, "terms")) {
    p.terms = as_list<TrigTerm>(*terms, where + ".terms", [d](const json& t, const std::string& w) {
      allow_keys(t, {"coef", "kind", "wave"}, w);
      TrigTerm term;
      term.coef = as_double(need(t, "coef", w), w + ".coef");
      const std::string kind = as_string(need(t, "kind", w), w + ".kind");
      if (kind == "sin") {
        term.kind = TrigTerm::Kind::Sin;
      } else if (kind == "cos") {
        term.kind = TrigTerm::Kind::Cos;
      } else {
        bad(w + ".kind", "must be \"sin\" or \"cos\"");
      }
      term.wave = int_list(need(t, "wave", w), w + ".wave");
      if (static_cast<int>(term.wave.size()) != d) bad(w + ".wave", "needs one integer per axis");
      return term;
    });
  }
  return p;
}

TestFunction test_function(const json& v, int d, const std::string& where) {
  TestFunction f;
  f.poly = poly(v, d, where);
  if (v.is_object() && v.contains("label")) {
    f.label = as_string(v["label"], where + ".label");
  } else if (v.is_number()) {
    std::ostringstream s;
    s << v.get<double>();
    f.label = s.str();
  } else {
    f.label = where;
  }
  return f;
}

GridSpec parse_grid(const json& g) {
  const std::string w = "grid";
  allow_keys(g, {"dimension", "box", "resolution", "periodic"}, w);
  GridSpec spec;
  spec.dimension = as_int(need(g, "dimension", w), w + ".dimension");
  if (spec.dimension < 1 || spec.dimension > 6) bad(w + ".dimension", "must be between 1 and 6");
  const int d = spec.dimension;
  const json& box = need(g, "box", w);
  if (box.is_array()) {
    spec.lengths = as_list<double>(box, w + ".box", box_length);
  } else {
    spec.lengths.assign(d, box_length(box, w + ".box"));
  }
  const json& res = need(g, "resolution", w);
  if (res.is_array()) {
    spec.resolution = int_list(res, w + ".resolution");
  } else {
    spec.resolution.assign(d, as_int(res, w + ".resolution"));
  }
  if (const json* per = find(g, "periodic")) {
    if (per->is_boolean()) {
      spec.periodic.assign(d, per->get<bool>());
    } else {
      spec.periodic = as_list<bool>(*per, w + ".periodic", as_bool);
    }
  }
  if (static_cast<int>(spec.lengths.size()) != d) bad(w + ".box", "needs one length per axis");
  if (static_cast<int>(spec.resolution.size()) != d) bad(w + ".resolution", "needs one entry per axis");
  if (!spec.periodic.empty() && static_cast<int>(spec.periodic.size()) != d) {
    bad(w + ".periodic", "needs one entry per axis");
  }
  return spec;
}

MetricSpec parse_metric(const json& m, int d) {
  const std::string w = "metric";
  allow_keys(m, {"builtin", "params", "trig"}, w);
  if (m.contains("trig")) {
    if (m.contains("builtin") || m.contains("params")) bad(w, "give either builtin or trig, not both");
    TrigMetric tm;
    tm.components.assign(static_cast<std::size_t>(d * (d + 1) / 2), TrigPolynomial{});
    std::vector<bool> seen(tm.components.size(), false);
    const json& list = m["trig"];
    if (!list.is_array()) bad(w + ".trig", "expected an array of components");
    for (std::size_t k = 0; k < list.size(); ++k) {
      const std::string cw = w + ".trig[" + std::to_string(k + 1) + "]";
      allow_keys(list[k], {"i", "j", "value"}, cw);
      int i = as_int(need(list[k], "i", cw), cw + ".i") - 1;
      int j = as_int(need(list[k], "j", cw), cw + ".j") - 1;
      if (i < 0 || j < 0 || i >= d || j >= d) bad(cw, "index out of range 1..d");
      if (i > j) std::swap(i, j);
      const std::size_t pos = static_cast<std::size_t>(i * d - i * (i - 1) / 2 + (j - i));
      if (seen[pos]) bad(cw, "component given twice");
      seen[pos] = true;
      tm.components[pos] = poly(need(list[k], "value", cw), d, cw + ".value");
    }
    for (int i = 0; i < d; ++i) {
      const std::size_t pos = static_cast<std::size_t>(i * d - i * (i - 1) / 2);
      if (!seen[pos]) tm.components[pos] = TrigPolynomial::constant_value(1.0);
    }
    return tm;
  }
  const std::string name = as_string(need(m, "builtin", w), w + ".builtin");
  const json params = m.value("params", json::object());
  const std::string pw = w + ".params";
  if (name == "flat") {
    allow_keys(params, {}, pw);
    return FlatMetric{};
  }
  if (name == "revolution") {
    allow_keys(params, {"major_radius", "minor_radius", "profile_axis", "target_axis"}, pw);
    RevolutionMetric r;
    r.major_radius = opt_double(params, "major_radius", r.major_radius, pw);
    r.minor_radius = opt_double(params, "minor_radius", r.minor_radius, pw);
    r.profile_axis = opt_int(params, "profile_axis", 1, pw) - 1;
    r.target_axis = opt_int(params, "target_axis", d, pw) - 1;
    if (r.profile_axis < 0 || r.profile_axis >= d || r.target_axis < 0 || r.target_axis >= d ||
        r.profile_axis == r.target_axis) {
      bad(pw, "profile_axis and target_axis must be distinct axes in 1..d");
    }
    if (!(r.major_radius > std::abs(r.minor_radius))) bad(pw, "major_radius must exceed |minor_radius|");
    return r;
  }
  if (name == "graph") {
    allow_keys(params, {"amplitude"}, pw);
    return GraphMetric{opt_double(params, "amplitude", 0.3, pw)};
  }
  if (name == "conformal") {
    allow_keys(params, {"phi"}, pw);
    return ConformalMetric{poly(need(params, "phi", pw), d, pw + ".phi")};
  }
  for (const auto& entry : catalog_entries()) {
    if (entry.name == name) {
      allow_keys(params, {"amplitude", "major_radius"}, pw);
      CatalogParams cp;
      cp.amplitude = opt_double(params, "amplitude", cp.amplitude, pw);
      cp.major_radius = opt_double(params, "major_radius", cp.major_radius, pw);
      return catalog_metric(name, cp);
    }
  }
  bad(w + ".builtin", "unknown metric '" + name + "'");
}

void parse_catalog_params(const json& obj, CatalogParams& p, const std::string& where) {
  p.amplitude = opt_double(obj, "amplitude", p.amplitude, where);
  p.major_radius = opt_double(obj, "major_radius", p.major_radius, where);
}

// laminate keys shared by the fields block and the framework experiment
LaminateSpec parse_laminate(const json& obj, int d, int n_co, const std::string& w) {
  LaminateSpec lam;
  lam.eta = int_list(need(obj, "eta", w), w + ".eta");
  if (const json* v = find(obj, "h_amplitudes")) lam.h_amplitudes = double_list(*v, w + ".h_amplitudes");
  if (const json* v = find(obj, "h_profile")) lam.h_profile = profile(*v, w + ".h_profile");
  if (const json* v = find(obj, "kappa_m")) lam.kappa_m = matrix(*v, n_co, w + ".kappa_m");
  if (const json* v = find(obj, "kappa_profile")) lam.kappa_profile = profile(*v, w + ".kappa_profile");
  if (const json* v = find(obj, "violation_c")) lam.violation_c = matrix(*v, d, w + ".violation_c");
  return lam;
}

bool is_catalog(const std::string& name) {
  for (const auto& e : catalog_entries()) {
    if (e.name == name) return true;
  }
  return false;
}

FieldsBlock parse_fields(const json& f, int d, int n_co) {
  const std::string w = "fields";
  if (!f.is_object()) bad(w, "expected an object");
  FieldsBlock out;
  const std::string kind = as_string(need(f, "kind", w), w + ".kind");
  if (kind == "zero") {
    allow_keys(f, {"kind"}, w);
    out.kind = FieldsBlock::Kind::Zero;
  } else if (kind == "catalog") {
    allow_keys(f, {"kind", "name", "amplitude", "major_radius"}, w);
    out.kind = FieldsBlock::Kind::Catalog;
    out.catalog = as_string(need(f, "name", w), w + ".name");
    if (!is_catalog(out.catalog)) bad(w + ".name", "unknown catalog scene '" + out.catalog + "'");
    parse_catalog_params(f, out.params, w);
  } else if (kind == "random") {
    allow_keys(f, {"kind", "seed", "amplitude", "smooth"}, w);
    out.kind = FieldsBlock::Kind::Random;
    if (const json* v = find(f, "seed")) {
      const long long s = as_integer(*v, w + ".seed");
      if (s < 0) bad(w + ".seed", "must be non-negative");
      out.seed = static_cast<std::uint64_t>(s);
    }
    out.amplitude = opt_double(f, "amplitude", out.amplitude, w);
    if (const json* v = find(f, "smooth")) out.smooth = as_bool(*v, w + ".smooth");
  } else if (kind == "laminate") {
    allow_keys(f, {"kind", "base", "amplitude", "major_radius", "m", "eta", "h_amplitudes", "h_profile",
                   "kappa_m", "kappa_profile", "violation_c"},
               w);
    out.kind = FieldsBlock::Kind::Laminate;
    out.catalog = f.contains("base") ? as_string(f["base"], w + ".base") : "flat-zero";
    if (!is_catalog(out.catalog)) bad(w + ".base", "unknown catalog scene '" + out.catalog + "'");
    parse_catalog_params(f, out.params, w);
    out.laminate_m = as_int(need(f, "m", w), w + ".m");
    if (out.laminate_m < 1) bad(w + ".m", "must be a positive integer");
    out.laminate = parse_laminate(f, d, n_co, w);
  } else if (kind == "dump") {
    allow_keys(f, {"kind", "path"}, w);
    out.kind = FieldsBlock::Kind::Dump;
    out.dump_path = as_string(need(f, "path", w), w + ".path");
  } else {
    bad(w + ".kind", "must be one of zero, catalog, random, laminate, dump");
  }
  return out;
}

MinimizeConfig parse_minimize(const json& e, const std::string& w) {
  MinimizeConfig c;
  c.p = opt_double(e, "p", c.p, w);
  c.mu0 = opt_double(e, "mu0", c.mu0, w);
  c.mu_growth = opt_double(e, "mu_growth", c.mu_growth, w);
  c.outer_iterations = opt_int(e, "outer_iterations", c.outer_iterations, w);
  c.grad_tol = opt_double(e, "grad_tol", c.grad_tol, w);
  c.max_inner_steps = opt_int(e, "max_inner_steps", c.max_inner_steps, w);
  c.initial_step = opt_double(e, "initial_step", c.initial_step, w);
  c.shrink = opt_double(e, "shrink", c.shrink, w);
  c.armijo = opt_double(e, "armijo", c.armijo, w);
  c.step_growth = opt_double(e, "step_growth", c.step_growth, w);
  c.tol_r = opt_double(e, "tol_r", c.tol_r, w);
  c.objective_rel_tol = opt_double(e, "objective_rel_tol", c.objective_rel_tol, w);
  if (const json* v = find(e, "seed")) {
    const long long s = as_integer(*v, w + ".seed");
    if (s < 0) bad(w + ".seed", "must be non-negative");
    c.seed = static_cast<std::uint64_t>(s);
  }
  return c;
}

ExperimentBlock parse_experiment(const json& e, int d, int n_co) {
  const std::string w = "experiment";
  if (!e.is_object()) bad(w, "expected an object");
  ExperimentBlock out;
  const std::string kind = as_string(need(e, "kind", w), w + ".kind");
  if (kind == "geometry" || kind == "residuals" || kind == "divcurl-verify") {
    allow_keys(e, {"kind"}, w);
    out.kind = kind == "geometry"    ? ExperimentBlock::Kind::Geometry
               : kind == "residuals" ? ExperimentBlock::Kind::Residuals
                                     : ExperimentBlock::Kind::DivCurlVerify;
    return out;
  }
  if (kind == "minimize") {
    allow_keys(e, {"kind", "p", "mu0", "mu_growth", "outer_iterations", "grad_tol", "max_inner_steps",
                   "initial_step", "shrink", "armijo", "step_growth", "tol_r", "objective_rel_tol", "seed"},
               w);
    out.kind = ExperimentBlock::Kind::Minimize;
    out.minimize = parse_minimize(e, w);
    return out;
  }
  if (kind != "weaklab") bad(w + ".kind", "must be one of geometry, residuals, divcurl-verify, weaklab, minimize");
  out.kind = ExperimentBlock::Kind::WeakLab;
  const std::string mode = as_string(need(e, "mode", w), w + ".mode");
  auto common = [&] {
    out.inverse_eps = int_list(need(e, "inverse_eps", w), w + ".inverse_eps");
    if (const json* v = find(e, "test_functions")) {
      out.test_functions = as_list<TestFunction>(*v, w + ".test_functions",
                                                 [d](const json& t, const std::string& tw) {
                                                   return test_function(t, d, tw);
                                                 });
    } else {
      out.test_functions = {TestFunction::constant()};
    }
    if (out.test_functions.empty()) bad(w + ".test_functions", "needs at least one test function");
  };
  if (mode == "divcurl") {
    allow_keys(e, {"kind", "mode", "inverse_eps", "test_functions", "eta", "w", "b", "c", "v_amplitude",
                   "u_macro", "v_macro"},
               w);
    out.mode = ExperimentBlock::WeakMode::DivCurl;
    common();
    PairSpec& p = out.pair;
    p.eta = int_list(need(e, "eta", w), w + ".eta");
    p.w = double_list(need(e, "w", w), w + ".w");
    if (const json* v = find(e, "b")) p.b = profile(*v, w + ".b");
    if (const json* v = find(e, "c")) p.c = profile(*v, w + ".c");
    p.v_amplitude = opt_double(e, "v_amplitude", p.v_amplitude, w);
    auto macro = [&](const char* key) {
      std::vector<TrigPolynomial> out_macro;
      if (const json* v = find(e, key)) {
        out_macro = as_list<TrigPolynomial>(*v, w + "." + key, [d](const json& t, const std::string& tw) {
          return poly(t, d, tw);
        });
      }
      return out_macro;
    };
    p.u_macro = macro("u_macro");
    p.v_macro = macro("v_macro");
  } else if (mode == "framework") {
    allow_keys(e, {"kind", "mode", "inverse_eps", "test_functions", "base", "amplitude", "major_radius",
                   "p", "laminate"},
               w);
    out.mode = ExperimentBlock::WeakMode::Framework;
    common();
    FrameworkSpec& f = out.framework;
    f.base = e.contains("base") ? as_string(e["base"], w + ".base") : "flat-zero";
    if (!is_catalog(f.base)) bad(w + ".base", "unknown catalog scene '" + f.base + "'");
    parse_catalog_params(e, f.base_params, w);
    f.base_params.codimension = n_co;
    f.p = opt_double(e, "p", f.p, w);
    const json& lam = need(e, "laminate", w);
    allow_keys(lam, {"eta", "h_amplitudes", "h_profile", "kappa_m", "kappa_profile", "violation_c"},
               w + ".laminate");
    f.laminate = parse_laminate(lam, d, n_co, w + ".laminate");
  } else {
    bad(w + ".mode", "must be \"divcurl\" or \"framework\"");
  }
  return out;
}

OutputBlock parse_output(const json& o) {
  const std::string w = "output";
  allow_keys(o, {"dir", "deterministic", "csv", "dump_fields"}, w);
  OutputBlock out;
  if (const json* v = find(o, "dir")) out.dir = as_string(*v, w + ".dir");
  if (const json* v = find(o, "deterministic")) out.deterministic = as_bool(*v, w + ".deterministic");
  if (const json* v = find(o, "csv")) out.csv = as_bool(*v, w + ".csv");
  if (const json* v = find(o, "dump_fields")) out.dump_fields = as_bool(*v, w + ".dump_fields");
  return out;
}

}  // namespace

std::string experiment_name(ExperimentBlock::Kind kind) {
  switch (kind) {
    case ExperimentBlock::Kind::Geometry: return "geometry";
    case ExperimentBlock::Kind::Residuals: return "residuals";
    case ExperimentBlock::Kind::DivCurlVerify: return "divcurl-verify";
    case ExperimentBlock::Kind::WeakLab: return "weaklab";
    case ExperimentBlock::Kind::Minimize: return "minimize";
  }
  return "unknown";
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override '" + assignment + "' is not of the form key=value");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  json* node = &doc;
  std::stringstream parts(key);
  std::string part;
  std::vector<std::string> path;
  while (std::getline(parts, part, '.')) {
    if (part.empty()) throw ConfigError("override '" + assignment + "' has an empty key segment");
    path.push_back(part);
  }
  for (std::size_t i = 0; i < path.size(); ++i) {
    const bool last = i + 1 == path.size();
    if (node->is_array()) {
      std::size_t idx = 0;
      try {
        idx = std::stoul(path[i]);
      } catch (const std::exception&) {
        throw ConfigError("override '" + assignment + "': '" + path[i] + "' is not an array index");
      }
      if (idx < 1 || idx > node->size()) throw ConfigError("override '" + assignment + "': index out of range");
      node = &(*node)[idx - 1];
    } else {
      if (node->is_null()) *node = json::object();
      if (!node->is_object()) throw ConfigError("override '" + assignment + "': '" + path[i] + "' is not a block");
      node = &(*node)[path[i]];
    }
    if (last) *node = value;
  }
}

Scene parse_scene(const json& doc) {
  allow_keys(doc, {"schema_version", "grid", "codimension", "metric", "fields", "experiment", "output"}, "scene");
  Scene s;
  s.schema_version = as_int(need(doc, "schema_version", "scene"), "schema_version");
  if (s.schema_version != kSchemaVersion) {
    throw ConfigError("unsupported schema_version " + std::to_string(s.schema_version) + " (expected " +
                      std::to_string(kSchemaVersion) + ")");
  }
  s.grid = parse_grid(need(doc, "grid", "scene"));
  const int d = s.grid.dimension;
  s.codimension = doc.contains("codimension") ? as_int(doc["codimension"], "codimension") : default_codimension(d);
  if (s.codimension < 1 || s.codimension > 16) throw ConfigError("codimension: must be between 1 and 16");
  if (const json* m = find(doc, "metric")) s.metric = parse_metric(*m, d);
  if (const json* f = find(doc, "fields")) s.fields = parse_fields(*f, d, s.codimension);
  s.fields.params.codimension = s.codimension;
  s.experiment = parse_experiment(need(doc, "experiment", "scene"), d, s.codimension);
  if (const json* o = find(doc, "output")) s.output = parse_output(*o);
  s.source = doc;
  s.hash = fnv1a_hex(doc.dump());
  return s;
}

MetricSpec scene_metric(const Scene& s) {
  if (s.metric) return *s.metric;
  if (s.fields.kind == FieldsBlock::Kind::Catalog || s.fields.kind == FieldsBlock::Kind::Laminate) {
    return catalog_metric(s.fields.catalog, s.fields.params);
  }
  return FlatMetric{};
}

void validate_scene(const Scene& s) {
  const Grid grid(s.grid);
  for (int axis = 0; axis < grid.dimension(); ++axis) {
    if (!grid.periodic(axis)) {
      throw UnsupportedBoundary("unsupported boundary: derivative along non-periodic axis " +
                                std::to_string(axis + 1));
    }
  }
  const bool catalog_fields =
      s.fields.kind == FieldsBlock::Kind::Catalog || s.fields.kind == FieldsBlock::Kind::Laminate;
  if (s.metric && catalog_fields) {
    throw ConfigError("metric: a metric block cannot be combined with catalog or laminate fields, which carry their own metric");
  }
  check_metric_periodicity(scene_metric(s), grid);

  const auto grid_ptr = build_grid(s.grid);
  if (catalog_fields) catalog_embedding(s.fields.catalog, s.fields.params, grid_ptr);
  if (s.fields.kind == FieldsBlock::Kind::Laminate) {
    validate_laminate(s.fields.laminate, grid.dimension(), s.codimension);
    EpsSchedule({s.fields.laminate_m}).validate(s.grid, s.fields.laminate.eta);
  }
  if (s.fields.kind == FieldsBlock::Kind::Random && !(s.fields.amplitude >= 0.0)) {
    throw ConfigError("fields.amplitude: must be non-negative");
  }
  if (s.fields.kind == FieldsBlock::Kind::Dump && !std::filesystem::exists(s.fields.dump_path)) {
    throw ConfigError("fields.path: field dump not found: " + s.fields.dump_path.string());
  }

  const ExperimentBlock& e = s.experiment;
  if (e.kind == ExperimentBlock::Kind::Minimize) validate_config(e.minimize);
  if (e.kind == ExperimentBlock::Kind::WeakLab) {
    const EpsSchedule schedule(e.inverse_eps);
    if (e.mode == ExperimentBlock::WeakMode::DivCurl) {
      validate_pair_spec(e.pair, grid.dimension());
      schedule.validate(s.grid, e.pair.eta);
    } else {
      if (!(e.framework.p > 2.0)) {
        throw ConfigError("experiment.p: exponent p must satisfy p > 2 (got " + std::to_string(e.framework.p) + ")");
      }
      validate_laminate(e.framework.laminate, grid.dimension(), s.codimension);
      schedule.validate(s.grid, e.framework.laminate.eta);
      catalog_embedding(e.framework.base, e.framework.base_params, grid_ptr);
      check_metric_periodicity(catalog_metric(e.framework.base, e.framework.base_params), grid);
    }
  }
}

Scene load_scene(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read scene file: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  json doc = json::parse(buf.str(), nullptr, false);
  if (doc.is_discarded()) throw ConfigError("scene file is not valid JSON: " + path.string());
  for (const auto& o : overrides) apply_override(doc, o);
  Scene s = parse_scene(doc);
  if (s.fields.kind == FieldsBlock::Kind::Dump && s.fields.dump_path.is_relative()) {
    s.fields.dump_path = path.parent_path() / s.fields.dump_path;
  }
  validate_scene(s);
  return s;
}

ImmersionFields scene_fields(const Scene& s, const GridPtr& grid) {
  const FieldsBlock& f = s.fields;
  switch (f.kind) {
    case FieldsBlock::Kind::Zero:
      return ImmersionFields::zero(grid, s.codimension);
    case FieldsBlock::Kind::Catalog:
      return catalog_embedding(f.catalog, f.params, grid).fields;
    case FieldsBlock::Kind::Random: {
      const std::uint64_t seed = s.source.contains("fields") && s.source["fields"].contains("seed")
                                     ? f.seed
                                     : s.experiment.minimize.seed;
      return f.smooth ? random_smooth_fields(grid, s.codimension, f.amplitude, seed)
                      : random_node_fields(grid, s.codimension, f.amplitude, seed);
    }
    case FieldsBlock::Kind::Laminate:
      return make_framework_sequence(catalog_embedding(f.catalog, f.params, grid).fields, f.laminate,
                                     f.laminate_m);
    case FieldsBlock::Kind::Dump: {
      FieldDump dump = read_field_dump(f.dump_path);
      if (!(Grid(dump.grid) == *grid)) throw ShapeError("field dump grid does not match the scene grid");
      if (dump.fields.codimension() != s.codimension) {
        throw ShapeError("field dump codimension does not match the scene codimension");
      }
      ImmersionFields out = ImmersionFields::zero(grid, s.codimension);
      std::copy(dump.fields.h.data().begin(), dump.fields.h.data().end(), out.h.data().begin());
      std::copy(dump.fields.kappa.data().begin(), dump.fields.kappa.data().end(), out.kappa.data().begin());
      return out;
    }
  }
  return ImmersionFields::zero(grid, s.codimension);
}

}  // namespace gcr
