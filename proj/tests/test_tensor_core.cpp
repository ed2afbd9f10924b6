#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "gcrlab/errors.hpp"
#include "gcrlab/geometry.hpp"
#include "test_util.hpp"

using namespace gcr;
using testutil::kTwoPi;

TEST_CASE("grid spacing and node count") {
  const auto g = testutil::cube_grid(3, 16);
  for (int i = 0; i < 3; ++i) CHECK(g->spacing(i) == doctest::Approx(std::numbers::pi / 8).epsilon(1e-15));
  CHECK(g->num_nodes() == 4096);

  const auto unit = build_grid(GridSpec{2, {1.0, 1.0}, {32, 32}, {}});
  CHECK(unit->num_nodes() == 1024);
  CHECK(unit->spacing(0) == 1.0 / 32);
  CHECK(unit->cell_volume() == 1.0 / 1024);
}

TEST_CASE("grid validation names the axis") {
  try {
    build_grid(GridSpec{3, {kTwoPi, kTwoPi, kTwoPi}, {4, 16, 16}, {}});
    FAIL("expected an error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("resolution below minimum on axis 1") != std::string::npos);
  }
  CHECK_THROWS_AS(build_grid(GridSpec{2, {1.0, -1.0}, {8, 8}, {}}), ConfigError);
  CHECK_THROWS_WITH_AS(build_grid(GridSpec{2, {1.0, 0.0}, {8, 8}, {}}),
                       doctest::Contains("axis 2"), ConfigError);
}

TEST_CASE("row-major order, neighbors wrap") {
  const auto g = build_grid(GridSpec{2, {1.0, 2.0}, {8, 10}, {}});
  CHECK(g->stride(1) == 1);
  CHECK(g->stride(0) == 10);
  const std::size_t node = 7 * 10 + 9;
  CHECK(g->index(node, 0) == 7);
  CHECK(g->index(node, 1) == 9);
  CHECK(g->neighbor(node, 0, 1) == 9);
  CHECK(g->neighbor(node, 1, 1) == 7 * 10);
  CHECK(g->neighbor(0, 1, -1) == 9);
}

TEST_CASE("layout canonical storage") {
  const auto h = make_layout({IndexRole::Normal, IndexRole::Tangent, IndexRole::Tangent}, 3, 2, {{1, 2, 1}});
  CHECK(h->num_slots() == 2 * 6);
  CHECK(h->full_size() == 18);
  CHECK(h->signature() == "ntt:sym(2,3)");
  const auto k = make_layout({IndexRole::Normal, IndexRole::Tangent, IndexRole::Normal}, 3, 3, {{0, 2, -1}});
  CHECK(k->num_slots() == 3 * 3);
  int zeros = 0;
  for (std::size_t t = 0; t < k->full_size(); ++t) zeros += k->slot_of(t) < 0;
  CHECK(zeros == 9);

  TensorField f(testutil::cube_grid(3, 8), k);
  f.assign(5, {0, 2, 1}, 3.0);
  CHECK(f.at(5, {1, 2, 0}) == -3.0);
  CHECK(f.at(5, {1, 2, 1}) == 0.0);
  CHECK_THROWS_AS(f.assign(5, {1, 2, 1}, 1.0), ConfigError);
  CHECK_NOTHROW(f.assign(5, {1, 2, 1}, 0.0));
}

TEST_CASE("derivative of a constant is exactly zero") {
  const auto g = testutil::cube_grid(3, 8);
  ScalarField f(g, 3.25);
  for (int axis = 0; axis < 3; ++axis) CHECK(testutil::max_abs(partial_derivative(f, axis).values()) == 0.0);
}

TEST_CASE("central difference is second order") {
  double err[2];
  double err2[2];
  for (int r = 0; r < 2; ++r) {
    const auto g = testutil::torus_grid({16 << r, 16 << r, 8});
    const auto f = ScalarField::sample(g, [](auto x) { return std::sin(x[0]); });
    const auto df = partial_derivative(f, 0);
    err[r] = testutil::max_error(*g, [&](std::size_t n) { return df[n]; }, [](auto& x) { return std::cos(x[0]); });
    const auto f2 = ScalarField::sample(g, [](auto x) { return std::sin(x[0]) * std::sin(x[1]); });
    const auto df2 = partial_derivative(f2, 1);
    err2[r] = testutil::max_error(*g, [&](std::size_t n) { return df2[n]; },
                                  [](auto& x) { return std::sin(x[0]) * std::cos(x[1]); });
  }
  CHECK(testutil::observed_order(err[0], err[1]) >= 1.9);
  CHECK(testutil::observed_order(err2[0], err2[1]) >= 1.9);
  // exact value for one Fourier mode: sin(k dx)/dx * cos x
  CHECK(err[0] == doctest::Approx(1.0 - std::sin(kTwoPi / 16) / (kTwoPi / 16)).epsilon(1e-10));
}

TEST_CASE("non-periodic axis is rejected") {
  const auto g = build_grid(GridSpec{2, {1.0, 1.0}, {8, 8}, {true, false}});
  ScalarField f(g, 1.0);
  CHECK_NOTHROW(partial_derivative(f, 0));
  CHECK_THROWS_AS(partial_derivative(f, 1), UnsupportedBoundary);
}

TEST_CASE("metric inverse") {
  const auto g = testutil::cube_grid(3, 8);
  {
    const auto inv = invert_metric(sample_metric(FlatMetric{}, g));
    for (std::size_t n = 0; n < g->num_nodes(); n += 37) {
      CHECK(inv.det[n] == 1.0);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(inv.inverse.at(n, {i, j}) == (i == j ? 1.0 : 0.0));
    }
  }
  {
    TrigMetric diag;
    diag.components.assign(6, TrigPolynomial{});
    diag.components[0] = TrigPolynomial::constant_value(4.0);
    diag.components[3] = TrigPolynomial::constant_value(1.0);
    diag.components[5] = TrigPolynomial::constant_value(1.0);
    const auto inv = invert_metric(sample_metric(diag, g));
    CHECK(inv.det[0] == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(inv.inverse.at(0, {0, 0}) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(inv.inverse.at(0, {1, 1}) == doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("random SPD metric multiplies back to the identity") {
  const auto g = testutil::cube_grid(3, 8);
  TensorField t(g, symmetric_pair_layout(3));
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> a(9), m(9);
  for (std::size_t n = 0; n < g->num_nodes(); ++n) {
    for (double& v : a) v = u(rng);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double s = i == j ? 0.5 : 0.0;
        for (int k = 0; k < 3; ++k) s += a[i * 3 + k] * a[j * 3 + k];
        m[i * 3 + j] = s;
      }
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) t.assign(n, {i, j}, m[i * 3 + j]);
  }
  const MetricField mf(t);
  const auto inv = invert_metric(mf);
  double worst = 0.0;
  for (std::size_t n = 0; n < g->num_nodes(); ++n) {
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double s = 0.0;
        for (int k = 0; k < 3; ++k) s += t.at(n, {i, k}) * inv.inverse.at(n, {k, j});
        worst = std::max(worst, std::abs(s - (i == j ? 1.0 : 0.0)));
      }
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("indefinite metric reports node and minor") {
  const auto g = testutil::cube_grid(2, 8);
  TrigMetric bad;
  bad.components = {TrigPolynomial::constant_value(1.0), TrigPolynomial::constant_value(2.0),
                    TrigPolynomial::constant_value(1.0)};
  CHECK_THROWS_WITH_AS(sample_metric(bad, g), doctest::Contains("leading minor 2"), ConfigError);
}

TEST_CASE("flat and constant metrics have no connection or curvature") {
  const auto g = testutil::cube_grid(3, 8);
  const auto flat = build_geometry(FlatMetric{}, g);
  CHECK(testutil::max_abs(flat.christoffel.data()) == 0.0);
  CHECK(testutil::max_abs(flat.riemann.data()) == 0.0);

  TrigMetric c;
  c.components = {TrigPolynomial::constant_value(2.0), TrigPolynomial::constant_value(0.3),
                  TrigPolynomial::constant_value(-0.1), TrigPolynomial::constant_value(1.5),
                  TrigPolynomial::constant_value(0.2), TrigPolynomial::constant_value(1.0)};
  const auto geo = build_geometry(c, g);
  CHECK(testutil::max_abs(geo.christoffel.data()) == 0.0);
  CHECK(testutil::max_abs(geo.riemann.data()) == 0.0);
}

TEST_CASE("christoffel symbols of a diagonal torus metric") {
  double err[2];
  for (int r = 0; r < 2; ++r) {
    const auto g = testutil::torus_grid({16 << r, 8, 8});
    const auto geo = build_geometry(RevolutionMetric{2.0, 1.0, 0, 2}, g);
    double e = 0.0;
    std::vector<double> x;
    for (std::size_t n = 0; n < g->num_nodes(); ++n) {
      g->coordinates(n, x);
      const double w = 2.0 + std::cos(x[0]);
      for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) {
            double exact = 0.0;
            if (k == 0 && i == 2 && j == 2) exact = w * std::sin(x[0]);
            if (k == 2 && ((i == 0 && j == 2) || (i == 2 && j == 0))) exact = -std::sin(x[0]) / w;
            e = std::max(e, std::abs(geo.christoffel.at(n, {k, i, j}) - exact));
          }
    }
    err[r] = e;
  }
  CHECK(err[1] < 5e-2);
  CHECK(testutil::observed_order(err[0], err[1]) >= 1.9);
}

TEST_CASE("conformal christoffel identity") {
  TrigPolynomial phi{0.0, {{0.1, TrigTerm::Kind::Sin, {1, 0, 0}}}};
  double err[2];
  for (int r = 0; r < 2; ++r) {
    const auto g = testutil::torus_grid({16 << r, 8, 8});
    const auto geo = build_geometry(ConformalMetric{phi}, g);
    double e = 0.0;
    std::vector<double> x;
    for (std::size_t n = 0; n < g->num_nodes(); ++n) {
      g->coordinates(n, x);
      double dphi[3];
      for (int a = 0; a < 3; ++a) dphi[a] = phi.derivative(x, a);
      for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) {
            const double exact = (i == k) * dphi[j] + (j == k) * dphi[i] - (i == j) * dphi[k];
            e = std::max(e, std::abs(geo.christoffel.at(n, {k, i, j}) - exact));
          }
    }
    err[r] = e;
  }
  CHECK(testutil::observed_order(err[0], err[1]) >= 1.9);
}

TEST_CASE("riemann symmetries hold exactly") {
  const auto g = testutil::torus_grid({8, 8, 8});
  const auto geo = build_geometry(GraphMetric{0.3}, g);
  double asym = 0.0;
  for (std::size_t n = 0; n < g->num_nodes(); n += 7)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) {
          CHECK(geo.christoffel.at(n, {k, i, j}) == geo.christoffel.at(n, {k, j, i}));
          for (int l = 0; l < 3; ++l)
            asym = std::max(asym, std::abs(geo.riemann.at(n, {i, j, k, l}) + geo.riemann.at(n, {i, k, j, l})));
        }
  CHECK(asym == 0.0);
}

TEST_CASE("product metric: curvature components touching the flat axis vanish") {
  const auto g = testutil::torus_grid({32, 8, 8});
  const auto geo = build_geometry(RevolutionMetric{2.0, 1.0, 0, 2}, g);
  double worst = 0.0;
  for (std::size_t n = 0; n < g->num_nodes(); ++n)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
          for (int l = 0; l < 3; ++l) {
            const int ones = (i == 1) + (j == 1) + (k == 1) + (l == 1);
            if (ones == 1) worst = std::max(worst, std::abs(geo.riemann.at(n, {i, j, k, l})));
          }
  CHECK(worst <= 1e-12);
}

TEST_CASE("riemann converges for the torus metric") {
  // R_1133 = (2 + cos x1) cos x1 for g = diag(1, 1, (2 + cos x1)^2)
  double err[2];
  for (int r = 0; r < 2; ++r) {
    const auto g = testutil::torus_grid({16 << r, 8, 8});
    const auto geo = build_geometry(RevolutionMetric{2.0, 1.0, 0, 2}, g);
    err[r] = testutil::max_error(*g, [&](std::size_t n) { return geo.riemann.at(n, {0, 0, 2, 2}); },
                                 [](auto& x) { return (2.0 + std::cos(x[0])) * std::cos(x[0]); });
  }
  CHECK(testutil::observed_order(err[0], err[1]) >= 1.9);
}
