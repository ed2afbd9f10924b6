#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gcrlab/immersion.hpp"
#include "gcrlab/metric.hpp"

namespace gcr {

struct CatalogParams {
  double amplitude = 0.3;     ///< graph: f = amplitude * prod sin x_i
  double major_radius = 2.0;  ///< torus-product: g_33 = (major + cos x_1)^2
  std::optional<int> codimension;
};

/// A metric together with exact GCR solution fields and a note on the oracle.
struct EmbeddingScene {
  std::string name;
  MetricSpec metric;
  ImmersionFields fields;
  std::string provenance;
};

struct CatalogEntry {
  std::string name;
  std::string description;
};

const std::vector<CatalogEntry>& catalog_entries();

/// Codimension used when a scene does not set one: d(d-1)/2, so that
/// d + n_co is the Janet dimension (3 for d = 3).
int default_codimension(int dimension);

/// Closed-form embedding fields sampled on `grid`.
/// Throws ConfigError for unknown names or grids the embedding does not fit.
EmbeddingScene catalog_embedding(std::string_view name, const CatalogParams& params,
                                 const GridPtr& grid);

/// Metric of a catalog scene without building fields.
MetricSpec catalog_metric(std::string_view name, const CatalogParams& params);

}  // namespace gcr
