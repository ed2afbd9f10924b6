#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gcrlab/catalog.hpp"
#include "gcrlab/errors.hpp"
#include "gcrlab/residuals.hpp"
#include "test_util.hpp"

using namespace gcr;

namespace {

ResidualNorms catalog_norms(const char* name, int n, CatalogParams params = {}) {
  const auto g = testutil::cube_grid(3, n);
  const auto scene = catalog_embedding(name, params, g);
  const auto geom = build_geometry(scene.metric, g);
  return residual_norms(evaluate_residuals(scene.fields, geom));
}

// independent central difference by explicit neighbor lookup
double diff(const Grid& g, std::size_t node, int axis, auto&& value) {
  return (value(g.neighbor(node, axis, 1)) - value(g.neighbor(node, axis, -1))) / (2.0 * g.spacing(axis));
}

}  // namespace

TEST_CASE("flat-zero and flat torus are exact") {
  for (const char* name : {"flat-zero", "flat-torus-T3"}) {
    const auto n = catalog_norms(name, 16);
    CHECK(n.total.l2 <= 1e-12);
    CHECK(n.total.linf <= 1e-12);
  }
}

TEST_CASE("graph embedding residuals converge at second order") {
  CatalogParams p;
  p.codimension = 3;
  const auto c = catalog_norms("graph", 16, p);
  const auto f = catalog_norms("graph", 32, p);
  CHECK(c.total.linf / f.total.linf >= 3.7);
  CHECK(c.gauss.linf / f.gauss.linf >= 3.7);
  CHECK(c.gauss.l2 / f.gauss.l2 >= 3.7);
  // the codazzi block is still pre-asymptotic at n = 16 (ratio about 3.5)
  const auto ff = catalog_norms("graph", 64, p);
  CHECK(testutil::observed_order(f.codazzi.linf, ff.codazzi.linf) >= 1.9);
  // only h^1 is nonzero and kappa = 0: the Ricci block vanishes identically
  CHECK(c.ricci.linf <= 1e-14);
  CHECK(f.ricci.linf <= 1e-14);
}

TEST_CASE("torus-product residuals converge at second order") {
  const auto c = catalog_norms("torus-product", 16);
  const auto f = catalog_norms("torus-product", 32);
  CHECK(c.total.linf / f.total.linf >= 3.7);
  CHECK(f.ricci.linf == 0.0);
}

TEST_CASE("codazzi vanishes for constant h on a flat metric") {
  const auto g = testutil::cube_grid(3, 8);
  auto f = random_node_fields(g, 3, 1.0, 3);
  for (int s = 0; s < f.h.layout().num_slots(); ++s) {
    const double c = f.h.slot(s)[0];
    for (double& v : f.h.slot(s)) v = c;
  }
  std::fill(f.kappa.data().begin(), f.kappa.data().end(), 0.0);
  const auto geom = build_geometry(FlatMetric{}, g);
  CHECK(testutil::max_abs(codazzi_residual(f, geom).data()) == 0.0);
}

TEST_CASE("ricci residual matches a straight-line re-evaluation") {
  const auto g = testutil::cube_grid(3, 8);
  const auto f = random_smooth_fields(g, 3, 0.7, 21);
  const auto geom = build_geometry(GraphMetric{0.3}, g);
  const auto r = ricci_residual(f, geom);
  double worst = 0.0;
  for (std::size_t n = 0; n < g->num_nodes(); ++n)
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        for (int k = 0; k < 3; ++k)
          for (int l = 0; l < 3; ++l) {
            double v = diff(*g, n, k, [&](std::size_t m) { return f.kappa.at(m, {a, l, b}); }) -
                       diff(*g, n, l, [&](std::size_t m) { return f.kappa.at(m, {a, k, b}); });
            for (int i = 0; i < 3; ++i)
              for (int j = 0; j < 3; ++j)
                v -= geom.inverse.at(n, {i, j}) *
                     (f.h.at(n, {a, i, l}) * f.h.at(n, {b, k, j}) - f.h.at(n, {a, i, k}) * f.h.at(n, {b, l, j}));
            for (int c = 0; c < 3; ++c)
              v += f.kappa.at(n, {a, k, c}) * f.kappa.at(n, {c, l, b}) - f.kappa.at(n, {a, l, c}) * f.kappa.at(n, {c, k, b});
            worst = std::max(worst, std::abs(v - r.at(n, {a, b, k, l})));
          }
  CHECK(worst <= 1e-13);
}

TEST_CASE("codazzi and gauss match a straight-line re-evaluation") {
  const auto g = testutil::cube_grid(3, 8);
  const auto f = random_smooth_fields(g, 2, 0.7, 5);
  const auto geom = build_geometry(RevolutionMetric{2.0, 1.0, 0, 2}, g);
  const auto cz = codazzi_residual(f, geom);
  const auto gs = gauss_residual(f, geom);
  double wc = 0.0, wg = 0.0;
  for (std::size_t n = 0; n < g->num_nodes(); ++n)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
          for (int a = 0; a < 2; ++a) {
            double v = diff(*g, n, k, [&](std::size_t m) { return f.h.at(m, {a, l, j}); }) -
                       diff(*g, n, l, [&](std::size_t m) { return f.h.at(m, {a, k, j}); });
            for (int m = 0; m < 3; ++m)
              v += geom.christoffel.at(n, {m, l, j}) * f.h.at(n, {a, k, m}) -
                   geom.christoffel.at(n, {m, k, j}) * f.h.at(n, {a, l, m});
            for (int b = 0; b < 2; ++b)
              v += f.kappa.at(n, {a, k, b}) * f.h.at(n, {b, l, j}) - f.kappa.at(n, {a, l, b}) * f.h.at(n, {b, k, j});
            wc = std::max(wc, std::abs(v - cz.at(n, {a, j, k, l})));
          }
          for (int i = 0; i < 3; ++i) {
            double v = -geom.riemann.at(n, {i, j, k, l});
            for (int a = 0; a < 2; ++a)
              v += f.h.at(n, {a, j, i}) * f.h.at(n, {a, k, l}) - f.h.at(n, {a, k, i}) * f.h.at(n, {a, j, l});
            wg = std::max(wg, std::abs(v - gs.at(n, {i, j, k, l})));
          }
        }
  CHECK(wc <= 1e-13);
  CHECK(wg <= 1e-13);
}

TEST_CASE("residual index exchanges negate") {
  const auto g = testutil::cube_grid(3, 8);
  const auto f = random_smooth_fields(g, 3, 0.5, 9);
  const auto geom = build_geometry(GraphMetric{0.3}, g);
  const auto rep = evaluate_residuals(f, geom);
  for (std::size_t n = 0; n < g->num_nodes(); n += 11)
    for (int a = 0; a < 3; ++a)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
          for (int l = 0; l < 3; ++l) {
            CHECK(rep.gauss.at(n, {a, j, k, l}) == -rep.gauss.at(n, {a, k, j, l}));
            CHECK(rep.codazzi.at(n, {a, j, k, l}) == -rep.codazzi.at(n, {a, j, l, k}));
            CHECK(rep.ricci.at(n, {a, j, k, l}) == -rep.ricci.at(n, {a, j, l, k}));
            CHECK(rep.ricci.at(n, {a, j, k, l}) == -rep.ricci.at(n, {j, a, k, l}));
          }
}

TEST_CASE("gauss block scales quadratically") {
  const auto g = testutil::cube_grid(3, 8);
  auto f = random_smooth_fields(g, 3, 0.5, 2);
  const auto geom = build_geometry(FlatMetric{}, g);
  const auto base = gauss_residual(f, geom);
  for (double& v : f.h.data()) v *= 3.0;
  const auto scaled = gauss_residual(f, geom);
  double worst = 0.0;
  for (std::size_t k = 0; k < base.data().size(); ++k)
    worst = std::max(worst, std::abs(scaled.data()[k] - 9.0 * base.data()[k]));
  CHECK(worst <= 1e-13);
}

TEST_CASE("residual norm of a single node value") {
  const auto g = build_grid(GridSpec{3, {1.0, 1.0, 1.0}, {16, 16, 16}, {}});
  ResidualReport rep;
  rep.gauss = TensorField(g, gauss_residual_layout(3));
  rep.codazzi = TensorField(g, codazzi_residual_layout(3, 3));
  rep.ricci = TensorField(g, ricci_residual_layout(3, 3));
  rep.volume_density = ScalarField(g, 1.0);
  CHECK(residual_norms(rep).total.l2 == 0.0);
  rep.gauss.assign(100, {0, 1, 2, 0}, -2.5);
  const auto n = residual_norms(rep);
  CHECK(n.gauss.l2 == doctest::Approx(2.5 * std::pow(1.0 / 16, 1.5)).epsilon(1e-14));
  CHECK(n.gauss.linf == 2.5);
  CHECK(n.total.l2 == n.gauss.l2);
}

TEST_CASE("catalog contents and errors") {
  const auto g = testutil::cube_grid(3, 8);
  const auto t3 = catalog_embedding("flat-torus-T3", {}, g);
  for (int a = 0; a < 3; ++a)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) CHECK(t3.fields.h.at(17, {a, i, j}) == (a == i && i == j ? -1.0 : 0.0));
  CHECK(testutil::max_abs(t3.fields.kappa.data()) == 0.0);

  CHECK_THROWS_AS(catalog_embedding("klein-bottle", {}, g), ConfigError);
  CatalogParams two;
  two.codimension = 2;
  CHECK_THROWS_AS(catalog_embedding("flat-torus-T3", two, g), ConfigError);
  CHECK_THROWS_AS(catalog_embedding("torus-product", {}, testutil::cube_grid(2, 8)), ConfigError);
  CHECK(default_codimension(3) == 3);
}

TEST_CASE("shape mismatch is rejected") {
  const auto f = ImmersionFields::zero(testutil::cube_grid(3, 8), 3);
  const auto geom = build_geometry(FlatMetric{}, testutil::cube_grid(3, 16));
  CHECK_THROWS_AS(gauss_residual(f, geom), ShapeError);
}

TEST_CASE("2d torus of revolution: gauss equation round trip") {
  // surface of revolution with h_11 = -1, h_22 = -(2 + cos x1) cos x1
  double err[2];
  for (int r = 0; r < 2; ++r) {
    const auto g = testutil::torus_grid({16 << r, 8});
    auto f = ImmersionFields::zero(g, 1);
    std::vector<double> x;
    for (std::size_t n = 0; n < g->num_nodes(); ++n) {
      g->coordinates(n, x);
      f.h.assign(n, {0, 0, 0}, -1.0);
      f.h.assign(n, {0, 1, 1}, -(2.0 + std::cos(x[0])) * std::cos(x[0]));
    }
    const auto geom = build_geometry(RevolutionMetric{2.0, 1.0, 0, 1}, g);
    err[r] = testutil::max_abs(gauss_residual(f, geom).data());
  }
  CHECK(err[1] < 1e-1);
  CHECK(testutil::observed_order(err[0], err[1]) >= 1.9);
}
