#include "gcrlab/catalog.hpp"

#include <cmath>

#include "gcrlab/errors.hpp"

namespace gcr {
namespace {

void require(bool ok, std::string_view name, const std::string& why) {
  if (!ok) throw ConfigError("catalog scene '" + std::string(name) + "': " + why);
}

}  // namespace

const std::vector<CatalogEntry>& catalog_entries() {
  static const std::vector<CatalogEntry> entries = {
      {"flat-zero", "flat metric, h = 0, kappa = 0 (any d)"},
      {"flat-torus-T3",
       "product of three unit circles in R^6: flat metric, h^a_ij = -delta_ai delta_aj, kappa = 0"},
      {"graph",
       "graph x = (u, f(u), 0, ...) with f = A prod sin u_i: g = I + grad f grad f, "
       "h^1 = Hess f / sqrt(1 + |grad f|^2), kappa = 0"},
      {"torus-product",
       "(torus of revolution in R^3) x (unit circle in R^2) in R^6: "
       "g = diag(1, 1, (R + cos x_1)^2), kappa = 0"},
  };
  return entries;
}

int default_codimension(int dimension) { return std::max(1, dimension * (dimension - 1) / 2); }

MetricSpec catalog_metric(std::string_view name, const CatalogParams& params) {
  if (name == "flat-zero" || name == "flat-torus-T3") return FlatMetric{};
  if (name == "graph") return GraphMetric{params.amplitude};
  if (name == "torus-product") return RevolutionMetric{params.major_radius, 1.0, 0, 2};
  throw ConfigError("unknown catalog scene '" + std::string(name) + "'");
}

EmbeddingScene catalog_embedding(std::string_view name, const CatalogParams& params,
                                 const GridPtr& grid) {
  const int d = grid->dimension();
  const int n_co = params.codimension.value_or(default_codimension(d));
  require(n_co >= 1, name, "codimension must be at least 1");
  for (int axis = 0; axis < d; ++axis) {
    require(grid->periodic(axis), name, "every axis must be periodic");
  }
  EmbeddingScene scene{std::string(name), catalog_metric(name, params),
                       ImmersionFields::zero(grid, n_co), ""};
  check_metric_periodicity(scene.metric, *grid);
  ImmersionFields& f = scene.fields;

  if (name == "flat-zero") {
    scene.provenance = "trivial solution: R = 0, all fields zero";
  } else if (name == "flat-torus-T3") {
    require(d == 3 && n_co == 3, name, "requires d = 3 and codimension 3");
    for (std::size_t node = 0; node < grid->num_nodes(); ++node) {
      for (int a = 0; a < 3; ++a) f.h.assign(node, {a, a, a}, -1.0);
    }
    scene.provenance =
        "x = (cos u_1, sin u_1, cos u_2, sin u_2, cos u_3, sin u_3), outward unit normals "
        "n^a = (cos u_a, sin u_a) in the a-th plane; h^a_ij = n^a . d_ij x; normals have no "
        "normal derivative component, so kappa = 0";
  } else if (name == "graph") {
    const double amp = params.amplitude;
    std::vector<double> x;
    std::vector<double> grad(d);
    for (std::size_t node = 0; node < grid->num_nodes(); ++node) {
      grid->coordinates(node, x);
      double norm2 = 0.0;
      for (int i = 0; i < d; ++i) {
        grad[i] = amp;
        for (int k = 0; k < d; ++k) grad[i] *= k == i ? std::cos(x[k]) : std::sin(x[k]);
        norm2 += grad[i] * grad[i];
      }
      const double w = std::sqrt(1.0 + norm2);
      for (int i = 0; i < d; ++i) {
        for (int j = i; j < d; ++j) {
          double fij = amp;
          for (int k = 0; k < d; ++k) {
            if (i == j) {
              fij *= std::sin(x[k]);
            } else {
              fij *= (k == i || k == j) ? std::cos(x[k]) : std::sin(x[k]);
            }
          }
          if (i == j) fij = -fij;
          f.h.assign(node, {0, i, j}, fij / w);
        }
      }
    }
    scene.provenance =
        "graph of f over the u-space with unit normal (-grad f, 1)/sqrt(1+|grad f|^2) and "
        "constant remaining normals; h^1_ij = f_ij / sqrt(1+|grad f|^2), h^{a>1} = 0, kappa = 0";
  } else if (name == "torus-product") {
    require(d == 3 && n_co == 3, name, "requires d = 3 and codimension 3");
    const double big_r = params.major_radius;
    require(big_r > 1.0, name, "major radius must exceed 1");
    for (std::size_t node = 0; node < grid->num_nodes(); ++node) {
      const double x1 = grid->coordinate(node, 0);
      f.h.assign(node, {0, 0, 0}, -1.0);
      f.h.assign(node, {0, 2, 2}, -(big_r + std::cos(x1)) * std::cos(x1));
      f.h.assign(node, {1, 1, 1}, -1.0);
    }
    scene.provenance =
        "T(x1,x3) = ((R+cos x1) cos x3, (R+cos x1) sin x3, sin x1) with outward normal, "
        "C(x2) = (cos x2, sin x2) with outward normal, third normal constant; "
        "h^1 = diag(-1, 0, -(R+cos x1) cos x1), h^2 = diag(0, -1, 0), kappa = 0";
  } else {
    throw ConfigError("unknown catalog scene '" + std::string(name) + "'");
  }
  return scene;
}

}  // namespace gcr
