// One PASS/FAIL line per acceptance criterion. Exit status is nonzero if any fails.
#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <unistd.h>

#include "gcrlab/catalog.hpp"
#include "gcrlab/divcurl.hpp"
#include "gcrlab/minimizer.hpp"
#include "gcrlab/residuals.hpp"
#include "gcrlab/scene.hpp"
#include "gcrlab/weak_lab.hpp"

using namespace gcr;
namespace fs = std::filesystem;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
const double kHalfBox = 0.5 * kTwoPi * kTwoPi * kTwoPi;
const fs::path kScenes = GCRLAB_SCENES;

GridPtr cube(int n) { return build_grid(GridSpec{3, {kTwoPi, kTwoPi, kTwoPi}, {n, n, n}, {}}); }
GridSpec cube_spec(int n) { return {3, {kTwoPi, kTwoPi, kTwoPi}, {n, n, n}, {}}; }

struct Verdict {
  bool pass = true;
  std::string detail;
  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [fail]");
  }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

ResidualNorms catalog_residuals(const std::string& name, int n) {
  const auto g = cube(n);
  const auto scene = catalog_embedding(name, {}, g);
  return residual_norms(evaluate_residuals(scene.fields, build_geometry(scene.metric, g)));
}

Verdict criterion1() {
  Verdict v;
  for (const char* name : {"flat-zero", "flat-torus-T3"}) {
    const auto r = catalog_residuals(name, 16);
    const double worst = std::max({r.gauss.l2, r.codazzi.l2, r.ricci.l2, r.total.linf});
    v.check(worst <= 1e-12, std::string(name) + " max " + num(worst));
  }
  for (const char* name : {"graph", "torus-product"}) {
    const auto coarse = catalog_residuals(name, 16);
    const auto fine = catalog_residuals(name, 32);
    const double ratio = coarse.total.linf / fine.total.linf;
    v.check(ratio >= 3.7, std::string(name) + " Linf ratio " + num(ratio) + " (order " +
                              num(std::log2(ratio)) + ")");
  }
  return v;
}

Verdict criterion2() {
  Verdict v;
  const auto g = cube(8);
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    worst = std::max(worst, pairing_identities(random_node_fields(g, 3, 1.0, seed), false).max_relative());
  }
  v.check(worst <= 1e-12, "max relative discrepancy " + num(worst));
  return v;
}

Verdict criterion3() {
  Verdict v;
  PairSpec spec;
  spec.eta = {1, 0, 0};
  spec.w = {0, 1, 0};
  const auto t = divcurl_experiment(spec, EpsSchedule({4, 8, 16}), cube_spec(16), {TestFunction::constant()});
  double adm = 0.0, vio = 0.0;
  for (const auto& row : t.admissible) adm = std::max(adm, row.gaps[0]);
  for (const auto& row : t.violation) vio = std::max(vio, std::abs(row.gaps[0] / kHalfBox - 1.0));
  v.check(adm <= 1e-10, "admissible gap " + num(adm));
  v.check(vio <= 0.01, "violation gap relative deviation " + num(vio));
  return v;
}

Verdict criterion4() {
  Verdict v;
  const EpsSchedule sched({4, 8, 16});
  const std::vector<TestFunction> phis{TestFunction::constant()};

  FrameworkSpec lam;
  lam.laminate.eta = {1, 0, 0};
  lam.laminate.h_amplitudes = {1.0};
  lam.laminate.kappa_m = {0, 0.5, 0, -0.5, 0, 0, 0, 0, 0};
  const auto a = framework_experiment(lam, sched, cube_spec(16), phis);
  double spread = 0.0, a2 = 0.0, gap = 0.0, defect = 1e300;
  for (const auto& row : a.rows) {
    spread = std::max(spread, std::abs(row.l2_norm - a.rows[0].l2_norm) / a.rows[0].l2_norm);
    a2 = std::max({a2, row.a2_h, row.a2_kappa});
    defect = std::min(defect, row.strong_defect / row.amplitude_reference);
    for (const auto& q : row.quadratic_gap)
      for (double x : q) gap = std::max(gap, x);
  }
  v.check(spread <= 1e-12, "laminate L2 spread " + num(spread));
  v.check(a2 <= 1e-10, "laminate A.2 " + num(a2));
  v.check(defect >= 0.9, "defect/amplitude " + num(defect));
  v.check(gap <= 1e-10, "laminate quadratic gaps " + num(gap));

  FrameworkSpec bad;
  bad.laminate.eta = {0, 0, 1};
  bad.laminate.h_amplitudes = {1.0};
  bad.laminate.violation_c = std::vector<double>{1, 0, 0, 0, 1, 0, 0, 0, 0};
  const auto b = framework_experiment(bad, sched, cube_spec(16), phis);
  double ratio_err = 0.0, gauss = 0.0;
  for (std::size_t i = 0; i < b.rows.size(); ++i) {
    gauss = std::max(gauss, std::abs(b.rows[i].quadratic_gap[0][3] / kHalfBox - 1.0));
    if (i == 0) continue;
    const double want = b.rows[i - 1].eps / b.rows[i].eps;
    ratio_err = std::max(ratio_err, std::abs(b.rows[i].a2_h / b.rows[i - 1].a2_h / want - 1.0));
  }
  v.check(ratio_err <= 0.1, "violation A.2 ratio deviation " + num(ratio_err));
  v.check(gauss <= 0.01, "violation gauss gap deviation " + num(gauss));
  return v;
}

Verdict criterion5() {
  Verdict v;
  const auto g = cube(8);
  const auto geom = build_geometry(catalog_metric("torus-product", {}), g);
  const auto f = random_node_fields(g, 3, 0.5, 2024);
  const double p = 4.0, mu = 10.0;
  const auto grad = gradient(f, geom, p, mu);
  auto shifted = [&](const ImmersionFields& d, double t) {
    ImmersionFields y = f;
    for (std::size_t i = 0; i < y.h.data().size(); ++i) y.h.data()[i] += t * d.h.data()[i];
    for (std::size_t i = 0; i < y.kappa.data().size(); ++i) y.kappa.data()[i] += t * d.kappa.data()[i];
    return objective(y, geom, p) + mu * constraint_penalty(y, geom);
  };
  double worst = 0.0;
  for (std::uint64_t k = 0; k < 10; ++k) {
    const auto d = random_node_fields(g, 3, 1.0, 500 + k);
    const double t = 1e-5;
    const double fd = (shifted(d, t) - shifted(d, -t)) / (2 * t);
    double an = 0.0;
    for (std::size_t i = 0; i < d.h.data().size(); ++i) an += grad.h.data()[i] * d.h.data()[i];
    for (std::size_t i = 0; i < d.kappa.data().size(); ++i) an += grad.kappa.data()[i] * d.kappa.data()[i];
    worst = std::max(worst, std::abs(fd - an) / std::max(std::abs(an), std::abs(fd)));
  }
  v.check(worst <= 1e-6, "max relative FD error " + num(worst));
  return v;
}

struct SceneRun {
  MinimizeResult result;
  GeometryBundle geom;
  ImmersionFields initial;
  MinimizeConfig config;
};

SceneRun run_minimize_scene(const std::string& file) {
  const auto s = load_scene(kScenes / file);
  const auto grid = build_grid(s.grid);
  auto geom = build_geometry(scene_metric(s), grid);
  auto init = scene_fields(s, grid);
  auto result = minimize(geom, init, s.experiment.minimize);
  return {std::move(result), std::move(geom), std::move(init), s.experiment.minimize};
}

Verdict criterion6() {
  Verdict v;
  {
    const auto r = run_minimize_scene("minimize_flat.json");
    v.check(r.result.objective <= 1e-8, "flat objective " + num(r.result.objective));
    v.check(r.result.residuals.total.l2 <= 1e-6, "flat residual " + num(r.result.residuals.total.l2));
  }
  {
    const auto r = run_minimize_scene("minimize_laminate.json");
    // 0.5 sin(2 x1) in h^1_11: integrand (0.5 sin)^4, summed on the 8-node grid
    double mean = 0.0;
    const int n = 8;
    for (int i = 0; i < n; ++i) mean += std::pow(0.5 * std::sin(2.0 * kTwoPi * i / n), 4.0) / n;
    const double closed = mean * 2.0 * kHalfBox;
    const double initial = objective(r.initial, r.geom, r.config.p);
    v.check(std::abs(initial - closed) <= 1e-12 * closed, "laminate initial " + num(initial));
    v.check(r.result.objective < closed, "laminate final " + num(r.result.objective));
  }
  {
    const auto r = run_minimize_scene("minimize_torus.json");
    const double reference = objective(r.initial, r.geom, r.config.p);
    const double ratio = r.result.objective / reference;
    v.check(r.result.residuals.total.l2 <= 1e-4, "torus residual " + num(r.result.residuals.total.l2));
    v.check(ratio <= 1.1, "torus objective/reference " + num(ratio));
  }
  return v;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Verdict criterion7() {
  Verdict v;
  const fs::path root = fs::temp_directory_path() / ("gcrlab-accept-" + std::to_string(::getpid()));
  fs::remove_all(root);
  for (const char* scene : {"divcurl_lemma.json", "pairing_random.json", "minimize_laminate.json", "torus_geometry.json"}) {
    bool same = true;
    for (const char* run : {"a", "b"}) {
      const std::string cmd = std::string("\"") + GCRLAB_CLI + "\" run --deterministic --scene \"" +
                              (kScenes / scene).string() + "\" --out \"" + (root / scene / run).string() +
                              "\" >/dev/null 2>&1";
      const int status = std::system(cmd.c_str());
      same = same && WIFEXITED(status) && WEXITSTATUS(status) == 0;
    }
    std::size_t files = 0;
    if (same) {
      for (const auto& e : fs::directory_iterator(root / scene / "a")) {
        const auto other = root / scene / "b" / e.path().filename();
        same = same && fs::exists(other) && slurp(e.path()) == slurp(other);
        ++files;
      }
    }
    v.check(same && files > 0, std::string(scene) + " " + std::to_string(files) + " files");
  }
  fs::remove_all(root);
  return v;
}

}  // namespace

int main() {
  struct Item {
    int id;
    double limit_seconds;
    std::function<Verdict()> run;
  };
  const Item items[] = {{1, 60, criterion1}, {2, 10, criterion2}, {3, 30, criterion3}, {4, 60, criterion4},
                        {5, 30, criterion5}, {6, 600, criterion6}, {7, 600, criterion7}};
  int failed = 0;
  for (const auto& item : items) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = item.run();
    } catch (const std::exception& e) {
      v.check(false, std::string("threw: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    v.check(secs <= item.limit_seconds, "runtime " + num(secs) + " s");
    std::printf("criterion %d: %s (%s)\n", item.id, v.pass ? "PASS" : "FAIL", v.detail.c_str());
    std::fflush(stdout);
    failed += v.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
