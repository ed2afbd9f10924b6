#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "gcrlab/catalog.hpp"
#include "gcrlab/minimizer.hpp"
#include "gcrlab/weak_lab.hpp"
#include "test_util.hpp"

using namespace gcr;

namespace {

double dot_fields(const ImmersionFields& a, const ImmersionFields& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.h.data().size(); ++i) s += a.h.data()[i] * b.h.data()[i];
  for (std::size_t i = 0; i < a.kappa.data().size(); ++i) s += a.kappa.data()[i] * b.kappa.data()[i];
  return s;
}

ImmersionFields axpy(const ImmersionFields& x, double t, const ImmersionFields& d) {
  ImmersionFields y = x;
  for (std::size_t i = 0; i < y.h.data().size(); ++i) y.h.data()[i] += t * d.h.data()[i];
  for (std::size_t i = 0; i < y.kappa.data().size(); ++i) y.kappa.data()[i] += t * d.kappa.data()[i];
  return y;
}

double merit(const ImmersionFields& f, const GeometryBundle& geom, double p, double mu) {
  return objective(f, geom, p) + mu * constraint_penalty(f, geom);
}

}  // namespace

TEST_CASE("objective values") {
  const auto g = build_grid(GridSpec{3, {1.0, 1.0, 1.0}, {8, 8, 8}, {}});
  const auto geom = build_geometry(FlatMetric{}, g);
  auto f = ImmersionFields::zero(g, 3);
  CHECK(objective(f, geom, 4.0) == 0.0);
  for (std::size_t n = 0; n < g->num_nodes(); ++n) f.h.assign(n, {0, 0, 0}, 2.0);
  CHECK(objective(f, geom, 4.0) == doctest::Approx(16.0).epsilon(1e-14));
  // off-diagonal entries count twice in the full contraction
  auto o = ImmersionFields::zero(g, 3);
  for (std::size_t n = 0; n < g->num_nodes(); ++n) o.kappa.assign(n, {0, 1, 1}, 1.0);
  CHECK(objective(o, geom, 3.0) == doctest::Approx(std::pow(2.0, 1.5)).epsilon(1e-14));

  const auto tg = testutil::cube_grid(3, 8);
  const auto tgeom = build_geometry(catalog_metric("torus-product", {}), tg);
  const auto r = random_node_fields(tg, 3, 0.4, 3);
  const double base = objective(r, tgeom, 4.5);
  ImmersionFields scaled = axpy(r, 1.0, r);  // 2r
  CHECK(objective(scaled, tgeom, 4.5) == doctest::Approx(std::pow(2.0, 4.5) * base).epsilon(1e-12));
}

TEST_CASE("penalty values") {
  const auto g = testutil::cube_grid(3, 8);
  const auto flat = build_geometry(FlatMetric{}, g);
  CHECK(constraint_penalty(ImmersionFields::zero(g, 3), flat) == 0.0);
  const auto t3 = catalog_embedding("flat-torus-T3", {}, g);
  CHECK(constraint_penalty(t3.fields, flat) == 0.0);

  const auto torus = build_geometry(catalog_metric("torus-product", {}), g);
  const auto zero = ImmersionFields::zero(g, 3);
  const auto rn = field_norms(torus.riemann, torus.volume_density);
  CHECK(constraint_penalty(zero, torus) == doctest::Approx(rn.l2 * rn.l2).epsilon(1e-13));

  const auto r = random_node_fields(g, 3, 0.5, 9);
  const auto n = residual_norms(evaluate_residuals(r, torus));
  CHECK(constraint_penalty(r, torus) == doctest::Approx(n.total.l2 * n.total.l2).epsilon(1e-13));
}

TEST_CASE("gradient matches central finite differences") {
  const auto g = testutil::cube_grid(3, 8);
  const auto geom = build_geometry(catalog_metric("torus-product", {}), g);
  const auto f = random_node_fields(g, 3, 0.5, 21);
  const double p = 4.0, mu = 3.0;
  const auto grad = gradient(f, geom, p, mu);
  CHECK(testutil::max_abs(gradient(ImmersionFields::zero(g, 3), build_geometry(FlatMetric{}, g), p, mu).h.data()) == 0.0);
  for (std::uint64_t k = 0; k < 10; ++k) {
    const auto dir = random_node_fields(g, 3, 1.0, 100 + k);
    const double t = 1e-5;
    const double fd = (merit(axpy(f, t, dir), geom, p, mu) - merit(axpy(f, -t, dir), geom, p, mu)) / (2 * t);
    const double an = dot_fields(grad, dir);
    CHECK(std::abs(fd - an) <= 1e-6 * std::max(1.0, std::abs(an)));
  }
}

TEST_CASE("gradient at p = 3 away from the origin") {
  const auto g = testutil::cube_grid(3, 8);
  const auto geom = build_geometry(FlatMetric{}, g);
  const auto f = random_node_fields(g, 2, 1.0, 5);
  const auto grad = gradient(f, geom, 3.0, 0.0);
  const auto dir = random_node_fields(g, 2, 1.0, 6);
  const double t = 1e-5;
  const double fd = (objective(axpy(f, t, dir), geom, 3.0) - objective(axpy(f, -t, dir), geom, 3.0)) / (2 * t);
  CHECK(dot_fields(grad, dir) == doctest::Approx(fd).epsilon(1e-7));
}

TEST_CASE("config validation") {
  MinimizeConfig c;
  CHECK_NOTHROW(validate_config(c));
  c.p = 2.0;
  try {
    validate_config(c);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()) == "exponent p must satisfy p > 2 (got 2)");
  }
  auto bad = [](auto mutate) {
    MinimizeConfig c;
    mutate(c);
    CHECK_THROWS_AS(validate_config(c), ConfigError);
  };
  bad([](MinimizeConfig& c) { c.p = 1.5; });
  bad([](MinimizeConfig& c) { c.mu0 = 0.0; });
  bad([](MinimizeConfig& c) { c.mu_growth = 1.0; });
  bad([](MinimizeConfig& c) { c.outer_iterations = 0; });
  bad([](MinimizeConfig& c) { c.shrink = 1.0; });
  bad([](MinimizeConfig& c) { c.armijo = 0.0; });
  bad([](MinimizeConfig& c) { c.initial_step = -1.0; });
  bad([](MinimizeConfig& c) { c.max_inner_steps = 0; });
}

TEST_CASE("laminate start converges to the flat solution with monotone merit") {
  const auto g = testutil::cube_grid(3, 8);
  const auto geom = build_geometry(FlatMetric{}, g);
  LaminateSpec lam;
  lam.eta = {1, 0, 0};
  lam.h_amplitudes = {0.5};
  const auto start = make_framework_sequence(ImmersionFields::zero(g, 3), lam, 2);
  MinimizeConfig c;
  c.outer_iterations = 2;
  c.max_inner_steps = 200;
  const double before = objective(start, geom, c.p);
  const auto res = minimize(geom, start, c);
  CHECK(res.objective < 1e-10 * before);
  CHECK(res.residuals.total.l2 <= c.tol_r);
  CHECK(res.termination == "converged");
  for (std::size_t i = 1; i < res.trace.size(); ++i) {
    if (res.trace[i].outer != res.trace[i - 1].outer) continue;
    CHECK(res.trace[i].merit <= res.trace[i - 1].merit);
  }
  REQUIRE(!res.history.empty());
  CHECK(res.history[0].mu == c.mu0);
  if (res.history.size() > 1) CHECK(res.history[1].mu == c.mu0 * c.mu_growth);
}

TEST_CASE("zero start on the flat torus is already optimal") {
  const auto g = testutil::cube_grid(3, 8);
  const auto geom = build_geometry(FlatMetric{}, g);
  MinimizeConfig c;
  c.outer_iterations = 1;
  const auto res = minimize(geom, ImmersionFields::zero(g, 3), c);
  CHECK(res.objective == 0.0);
  CHECK(res.penalty == 0.0);
  CHECK(res.termination == "converged");
}

TEST_CASE("shape mismatch is rejected") {
  const auto g = testutil::cube_grid(3, 8);
  const auto g2 = testutil::cube_grid(3, 10);
  const auto geom = build_geometry(FlatMetric{}, g);
  CHECK_THROWS_AS(minimize(geom, ImmersionFields::zero(g2, 3), MinimizeConfig{}), ShapeError);
}
