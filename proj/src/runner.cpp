#include "gcrlab/runner.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>

#include "gcrlab/divcurl.hpp"
#include "gcrlab/errors.hpp"
#include "gcrlab/field_dump.hpp"
#include "gcrlab/geometry.hpp"
#include "gcrlab/residuals.hpp"
#include "gcrlab/version.hpp"

namespace gcr {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

class Csv {
 public:
  explicit Csv(std::vector<std::string> header) : columns_(header.size()) { row(header); }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) text_ += ',';
      text_ += cells[i];
    }
    text_ += '\n';
  }
  const std::string& text() const { return text_; }
  std::size_t columns() const { return columns_; }

 private:
  std::size_t columns_;
  std::string text_;
};

std::string num(double v) { return format_number(v); }
std::string num(int v) { return std::to_string(v); }

std::string resolution_text(const std::vector<int>& r) {
  std::string s;
  for (std::size_t i = 0; i < r.size(); ++i) s += (i ? "x" : "") + std::to_string(r[i]);
  return s;
}

json norms_json(const NormPair& n) { return {{"l2", n.l2}, {"linf", n.linf}}; }

json residual_json(const ResidualNorms& n) {
  return {{"gauss", norms_json(n.gauss)},
          {"codazzi", norms_json(n.codazzi)},
          {"ricci", norms_json(n.ricci)},
          {"total", norms_json(n.total)}};
}

struct Writer {
  fs::path dir;
  std::vector<fs::path> files;

  void text(const std::string& name, const std::string& body) {
    const fs::path p = dir / name;
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write report file: " + p.string());
    out << body;
    if (!out) throw IoError("failed writing report file: " + p.string());
    files.push_back(p);
  }
};

json run_geometry(const Scene&, const GeometryBundle& geom, Writer& w, bool csv) {
  double det_min = INFINITY, det_max = -INFINITY, volume = 0.0;
  for (std::size_t node = 0; node < geom.det.size(); ++node) {
    det_min = std::min(det_min, geom.det[node]);
    det_max = std::max(det_max, geom.det[node]);
    volume += geom.volume_density[node] * geom.grid().cell_volume();
  }
  const NormPair gam = field_norms(geom.christoffel, geom.volume_density);
  const NormPair rie = field_norms(geom.riemann, geom.volume_density);
  if (csv) {
    Csv table({"i", "j", "k", "l", "l2", "linf"});
    const IndexLayout& lay = geom.riemann.layout();
    const double cell = geom.grid().cell_volume();
    for (int s = 0; s < lay.num_slots(); ++s) {
      const auto idx = lay.slot_index(s);
      double sum = 0.0, mx = 0.0;
      const auto v = geom.riemann.slot(s);
      for (std::size_t node = 0; node < v.size(); ++node) {
        sum += geom.volume_density[node] * cell * v[node] * v[node];
        mx = std::max(mx, std::abs(v[node]));
      }
      table.row({num(idx[0] + 1), num(idx[1] + 1), num(idx[2] + 1), num(idx[3] + 1), num(std::sqrt(sum)), num(mx)});
    }
    w.text("riemann.csv", table.text());
  }
  return {{"det_min", det_min},
          {"det_max", det_max},
          {"volume", volume},
          {"christoffel", norms_json(gam)},
          {"riemann", norms_json(rie)}};
}

json run_residuals(const ImmersionFields& f, const GeometryBundle& geom, Writer& w, bool csv) {
  const ResidualNorms n = residual_norms(evaluate_residuals(f, geom));
  if (csv) {
    Csv table({"block", "l2", "linf"});
    table.row({"gauss", num(n.gauss.l2), num(n.gauss.linf)});
    table.row({"codazzi", num(n.codazzi.l2), num(n.codazzi.linf)});
    table.row({"ricci", num(n.ricci.l2), num(n.ricci.linf)});
    table.row({"total", num(n.total.l2), num(n.total.linf)});
    w.text("residuals.csv", table.text());
  }
  return {{"residuals", residual_json(n)}};
}

json run_pairings(const ImmersionFields& f, Writer& w, bool csv) {
  const PairingReport rep = pairing_identities(f, false);
  json list = json::array();
  Csv table({"identity", "tuples", "max_discrepancy", "max_relative", "worst"});
  for (const auto& s : rep.summaries) {
    std::string worst;
    for (std::size_t i = 0; i < s.worst.size(); ++i) worst += (i ? " " : "") + std::to_string(s.worst[i] + 1);
    list.push_back({{"identity", identity_name(s.identity)},
                    {"tuples", s.tuples},
                    {"max_discrepancy", s.max_discrepancy},
                    {"max_relative", s.max_relative},
                    {"worst", worst}});
    table.row({identity_name(s.identity), num(static_cast<int>(s.tuples)), num(s.max_discrepancy),
               num(s.max_relative), worst});
  }
  if (csv) w.text("pairing.csv", table.text());
  return {{"identities", list}, {"max_relative", rep.max_relative()}};
}

json run_divcurl(const Scene& s, Writer& w, bool csv) {
  const ExperimentBlock& e = s.experiment;
  const DivCurlTable t = divcurl_experiment(e.pair, EpsSchedule(e.inverse_eps), s.grid, e.test_functions);
  Csv table({"case", "m", "eps", "resolution", "phi", "gap", "limit", "div_u_l2", "curl_v_l2", "div_bound",
             "curl_bound"});
  json rows = json::array();
  auto emit = [&](const char* name, const std::vector<DivCurlRow>& list, bool violation) {
    for (const auto& r : list) {
      for (std::size_t p = 0; p < e.test_functions.size(); ++p) {
        const double limit = violation ? t.violation_limit[p] : 0.0;
        table.row({name, num(r.m), num(r.eps), resolution_text(r.resolution), e.test_functions[p].label,
                   num(r.gaps[p]), num(limit), num(r.div_u_l2), num(r.curl_v_l2), num(r.div_bound),
                   num(r.curl_bound)});
        rows.push_back({{"case", name}, {"m", r.m}, {"eps", r.eps}, {"phi", e.test_functions[p].label},
                        {"gap", r.gaps[p]}, {"limit", limit}, {"div_u_l2", r.div_u_l2},
                        {"curl_v_l2", r.curl_v_l2}});
      }
    }
  };
  emit("admissible", t.admissible, false);
  emit("violation", t.violation, true);
  if (csv) w.text("divcurl.csv", table.text());
  double max_admissible = 0.0;
  for (const auto& r : t.admissible) {
    for (double g : r.gaps) max_admissible = std::max(max_admissible, g);
  }
  json final_violation = json::array();
  for (std::size_t p = 0; p < e.test_functions.size(); ++p) {
    const double g = t.violation.back().gaps[p];
    final_violation.push_back({{"phi", e.test_functions[p].label},
                               {"gap", g},
                               {"limit", t.violation_limit[p]},
                               {"relative_error", std::abs(g - t.violation_limit[p]) / std::abs(t.violation_limit[p])}});
  }
  return {{"mode", "divcurl"}, {"max_admissible_gap", max_admissible}, {"final_violation", final_violation},
          {"rows", rows}};
}

json run_framework(const Scene& s, Writer& w, bool csv) {
  const ExperimentBlock& e = s.experiment;
  const FrameworkReport rep = framework_experiment(e.framework, EpsSchedule(e.inverse_eps), s.grid, e.test_functions);
  std::vector<std::string> header = {"m", "eps", "resolution", "l2_norm", "lp_norm", "strong_defect",
                                     "amplitude_reference", "a2_h", "a2_kappa", "o_codazzi_l2", "o_ricci_l2",
                                     "o_gauss_l2", "phi", "weak_defect", "o_codazzi_pairing", "o_ricci_pairing",
                                     "o_gauss_pairing"};
  for (const char* q : kQuadraticNames) header.push_back(std::string("gap_") + q);
  Csv table(header);
  json rows = json::array();
  for (const auto& r : rep.rows) {
    json gaps = json::array();
    for (std::size_t p = 0; p < e.test_functions.size(); ++p) {
      std::vector<std::string> cells = {num(r.m), num(r.eps), resolution_text(r.resolution), num(r.l2_norm),
                                        num(r.lp_norm), num(r.strong_defect), num(r.amplitude_reference),
                                        num(r.a2_h), num(r.a2_kappa), num(r.o_l2[0]), num(r.o_l2[1]),
                                        num(r.o_l2[2]), e.test_functions[p].label, num(r.weak_defect[p]),
                                        num(r.o_pairing[p][0]), num(r.o_pairing[p][1]), num(r.o_pairing[p][2])};
      json g = {{"phi", e.test_functions[p].label}};
      for (std::size_t q = 0; q < 4; ++q) {
        cells.push_back(num(r.quadratic_gap[p][q]));
        g[kQuadraticNames[q]] = r.quadratic_gap[p][q];
      }
      table.row(cells);
      gaps.push_back(g);
    }
    rows.push_back({{"m", r.m}, {"eps", r.eps}, {"l2_norm", r.l2_norm}, {"lp_norm", r.lp_norm},
                    {"strong_defect", r.strong_defect}, {"amplitude_reference", r.amplitude_reference},
                    {"a2_h", r.a2_h}, {"a2_kappa", r.a2_kappa}, {"quadratic_gaps", gaps}});
  }
  if (csv) w.text("framework.csv", table.text());
  return {{"mode", "framework"}, {"l2_bound", rep.l2_bound}, {"rows", rows}};
}

void write_history(const std::vector<OuterRecord>& history, const std::vector<InnerRecord>& trace, Writer& w) {
  Csv h({"outer", "mu", "objective", "penalty", "merit", "residual_l2", "grad_norm", "inner_steps", "stop"});
  for (const auto& r : history) {
    h.row({num(r.outer), num(r.mu), num(r.objective), num(r.penalty), num(r.merit), num(r.residual_l2),
           num(r.grad_norm), num(r.inner_steps), r.stop});
  }
  w.text("history.csv", h.text());
  Csv t({"outer", "step", "mu", "objective", "penalty", "merit", "step_size", "grad_norm"});
  for (const auto& r : trace) {
    t.row({num(r.outer), num(r.step), num(r.mu), num(r.objective), num(r.penalty), num(r.merit),
           num(r.step_size), num(r.grad_norm)});
  }
  w.text("trace.csv", t.text());
}

json history_json(const std::vector<OuterRecord>& history) {
  json list = json::array();
  for (const auto& r : history) {
    list.push_back({{"outer", r.outer}, {"mu", r.mu}, {"objective", r.objective}, {"penalty", r.penalty},
                    {"residual_l2", r.residual_l2}, {"inner_steps", r.inner_steps}, {"stop", r.stop}});
  }
  return list;
}

json run_minimize(const Scene& s, const GeometryBundle& geom, ImmersionFields init, Writer& w, bool csv,
                  bool dump) {
  const MinimizeConfig& c = s.experiment.minimize;
  const double init_objective = objective(init, geom, c.p);
  const double init_penalty = constraint_penalty(init, geom);
  json out = {{"initial_objective", init_objective}, {"initial_penalty", init_penalty}};
  if (s.fields.kind == FieldsBlock::Kind::Catalog) {
    out["reference_objective"] = init_objective;
  }
  MinimizeResult r;
  try {
    r = minimize(geom, std::move(init), c);
  } catch (const MinimizeDivergence& e) {
    if (csv) write_history(e.history, e.trace, w);
    throw;
  }
  if (csv) write_history(r.history, r.trace, w);
  if (dump) {
    write_field_dump(w.dir / "final_fields.gcrf", r.fields, {{"scene_hash", s.hash}, {"version", kVersion}});
    w.files.push_back(w.dir / "final_fields.gcrf");
    w.files.push_back(w.dir / "final_fields.gcrf.json");
  }
  out["termination"] = r.termination;
  out["objective"] = r.objective;
  out["penalty"] = r.penalty;
  out["residuals"] = residual_json(r.residuals);
  out["history"] = history_json(r.history);
  if (out.contains("reference_objective")) {
    out["objective_ratio"] = r.objective / init_objective;
  }
  out["config"] = {{"p", c.p}, {"mu0", c.mu0}, {"mu_growth", c.mu_growth},
                   {"outer_iterations", c.outer_iterations}, {"max_inner_steps", c.max_inner_steps},
                   {"tol_r", c.tol_r}, {"seed", c.seed}};
  return out;
}

std::uint64_t scene_seed(const Scene& s) {
  if (s.fields.kind == FieldsBlock::Kind::Random && s.source.contains("fields") &&
      s.source["fields"].contains("seed")) {
    return s.fields.seed;
  }
  return s.experiment.minimize.seed;
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json error_document(const std::exception& e, const std::string& hash) {
  json doc = {{"tool", "gcrlab"},
              {"version", kVersion},
              {"error", {{"type", error_type(e)}, {"message", e.what()}, {"exit_code", exit_code_for(e)}}}};
  if (!hash.empty()) doc["scene_hash"] = hash;
  if (const auto* div = dynamic_cast<const MinimizeDivergence*>(&e)) doc["history"] = history_json(div->history);
  return doc;
}

void try_write_error(const fs::path& dir, const json& doc, std::vector<fs::path>& files) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  std::ofstream out(dir / "error.json", std::ios::trunc);
  if (!out) return;
  out << doc.dump(2) << '\n';
  if (out) files.push_back(dir / "error.json");
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return 2;
  if (dynamic_cast<const nlohmann::json::exception*>(&e)) return 2;
  if (dynamic_cast<const NumericalError*>(&e)) return 3;
  if (dynamic_cast<const IoError*>(&e)) return 4;
  if (dynamic_cast<const fs::filesystem_error*>(&e)) return 4;
  return 1;
}

std::string error_type(const std::exception& e) {
  if (dynamic_cast<const UnsupportedBoundary*>(&e)) return "UnsupportedBoundary";
  if (dynamic_cast<const ShapeError*>(&e)) return "ShapeError";
  if (dynamic_cast<const ConfigError*>(&e)) return "ConfigError";
  if (dynamic_cast<const nlohmann::json::exception*>(&e)) return "ConfigError";
  if (dynamic_cast<const MinimizeDivergence*>(&e)) return "MinimizeDivergence";
  if (dynamic_cast<const NumericalError*>(&e)) return "NumericalError";
  if (dynamic_cast<const IoError*>(&e)) return "IoError";
  if (dynamic_cast<const fs::filesystem_error*>(&e)) return "IoError";
  return "InternalError";
}

RunOutcome run_scene(const Scene& s, const fs::path& out_dir, bool deterministic, const std::string& label) {
  RunOutcome outcome;
  outcome.out_dir = out_dir;
  const auto start = std::chrono::steady_clock::now();
  try {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec || !fs::is_directory(out_dir)) throw IoError("cannot create output directory: " + out_dir.string());
    Writer w{out_dir, {}};
    const bool csv = s.output.csv;
    const GridPtr grid = build_grid(s.grid);
    const ExperimentBlock& e = s.experiment;

    json results;
    std::string metric = "none";
    if (e.kind == ExperimentBlock::Kind::WeakLab) {
      results = e.mode == ExperimentBlock::WeakMode::DivCurl ? run_divcurl(s, w, csv) : run_framework(s, w, csv);
    } else if (e.kind == ExperimentBlock::Kind::DivCurlVerify) {
      results = run_pairings(scene_fields(s, grid), w, csv);
    } else {
      const MetricSpec spec = scene_metric(s);
      metric = metric_name(spec);
      const GeometryBundle geom = build_geometry(spec, grid);
      switch (e.kind) {
        case ExperimentBlock::Kind::Geometry: results = run_geometry(s, geom, w, csv); break;
        case ExperimentBlock::Kind::Residuals: results = run_residuals(scene_fields(s, grid), geom, w, csv); break;
        default: results = run_minimize(s, geom, scene_fields(s, grid), w, csv, s.output.dump_fields); break;
      }
    }

    json summary = {{"tool", "gcrlab"},
                    {"version", kVersion},
                    {"scene_hash", s.hash},
                    {"seed", scene_seed(s)},
                    {"experiment", experiment_name(e.kind)},
                    {"grid", {{"dimension", s.grid.dimension}, {"box", s.grid.lengths}, {"resolution", s.grid.resolution}}},
                    {"codimension", s.codimension},
                    {"metric", metric},
                    {"results", results}};
    if (!label.empty()) summary["scene"] = label;
    if (!deterministic) {
      summary["timestamp"] = utc_timestamp();
      summary["elapsed_seconds"] =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    json names = json::array();
    for (const auto& f : w.files) names.push_back(f.filename().string());
    summary["files"] = names;
    w.text("summary.json", summary.dump(2) + "\n");
    outcome.summary = std::move(summary);
    outcome.files = std::move(w.files);
    outcome.exit_code = 0;
  } catch (const std::exception& ex) {
    outcome.exit_code = exit_code_for(ex);
    outcome.summary = error_document(ex, s.hash);
    try_write_error(out_dir, outcome.summary, outcome.files);
  }
  return outcome;
}

RunOutcome run_scene_file(const fs::path& scene_path, const RunOptions& options) {
  fs::path out_dir = "gcrlab-out";
  if (const char* env = std::getenv(kOutDirEnv); env && *env) out_dir = env;
  Scene scene;
  try {
    scene = load_scene(scene_path, options.overrides);
  } catch (const std::exception& ex) {
    if (options.out_dir) out_dir = *options.out_dir;
    RunOutcome outcome;
    outcome.out_dir = out_dir;
    outcome.exit_code = exit_code_for(ex);
    outcome.summary = error_document(ex, "");
    try_write_error(out_dir, outcome.summary, outcome.files);
    return outcome;
  }
  if (scene.output.dir) out_dir = *scene.output.dir;
  if (options.out_dir) out_dir = *options.out_dir;
  return run_scene(scene, out_dir, options.deterministic || scene.output.deterministic,
                   scene_path.filename().string());
}

}  // namespace gcr
