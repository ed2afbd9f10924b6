#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

#include "gcrlab/tensor_field.hpp"
#include "gcrlab/trig.hpp"

namespace gcr {

/// g = identity.
struct FlatMetric {};

/// g = identity except g_tt = (major + minor * cos x_p)^2, t = target axis,
/// p = profile axis (0-based; target -1 means the last axis).
struct RevolutionMetric {
  double major_radius = 2.0;
  double minor_radius = 1.0;
  int profile_axis = 0;
  int target_axis = -1;
};

/// g = exp(2 phi) * identity.
struct ConformalMetric {
  TrigPolynomial phi;
};

/// Induced metric of the graph of f = amplitude * prod_i sin x_i:
/// g = identity + grad f (x) grad f.
struct GraphMetric {
  double amplitude = 0.3;
};

/// Component tables: entry (i, j) with i <= j at position i*d - i*(i-1)/2 + (j-i).
/// Missing tables default to the identity.
struct TrigMetric {
  std::vector<TrigPolynomial> components;
};

using MetricSpec = std::variant<FlatMetric, RevolutionMetric, ConformalMetric, GraphMetric, TrigMetric>;

std::string metric_name(const MetricSpec& spec);

/// Writes the d x d row-major matrix g(x).
void evaluate_metric(const MetricSpec& spec, int dimension, std::span<const double> x,
                     std::span<double> g);

/// Throws ConfigError when the metric is not periodic on the grid box.
void check_metric_periodicity(const MetricSpec& spec, const Grid& grid);

/// Symmetric positive-definite g_ij sampled on a grid.
class MetricField {
 public:
  /// Checks symmetry of the layout and positive-definiteness at every node;
  /// failures report the node coordinates and the failing leading minor.
  explicit MetricField(TensorField g);

  const TensorField& tensor() const noexcept { return g_; }
  const Grid& grid() const { return g_.grid(); }
  const GridPtr& grid_ptr() const { return g_.grid_ptr(); }
  int dimension() const { return g_.grid().dimension(); }

 private:
  TensorField g_;
};

LayoutPtr symmetric_pair_layout(int dimension);

MetricField sample_metric(const MetricSpec& spec, const GridPtr& grid);

struct InverseMetric {
  TensorField inverse;  ///< g^{kl}
  ScalarField det;      ///< |g|
};

InverseMetric invert_metric(const MetricField& g);

/// In-place Cholesky of an n x n row-major SPD matrix (lower factor).
/// On failure returns false and reports the 1-based leading minor and its value.
bool cholesky_factor(std::span<double> a, int n, int& failed_minor, double& minor_value);

}  // namespace gcr
