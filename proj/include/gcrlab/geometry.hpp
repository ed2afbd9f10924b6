#pragma once

#include "gcrlab/metric.hpp"

namespace gcr {

/// A metric with everything derived from it on the same grid.
struct GeometryBundle {
  MetricField metric;
  TensorField inverse;         ///< g^{kl}, symmetric
  ScalarField det;             ///< |g|
  ScalarField volume_density;  ///< sqrt(|g|)
  TensorField christoffel;     ///< Gamma^k_ij stored as (k, i, j), symmetric in (i, j)
  TensorField riemann;         ///< R_ijkl, antisymmetric in (j, k)

  const Grid& grid() const { return metric.grid(); }
  const GridPtr& grid_ptr() const { return metric.grid_ptr(); }
  int dimension() const { return metric.dimension(); }
};

LayoutPtr christoffel_layout(int dimension);
LayoutPtr riemann_layout(int dimension);

/// Gamma^k_ij = 1/2 g^{kl} (d_j g_il + d_i g_jl - d_l g_ij).
TensorField christoffel(const MetricField& g, const TensorField& inverse);

/// R_ijkl = g_lm (d_k Gamma^m_ij - d_j Gamma^m_ik + Gamma^n_ij Gamma^m_nk - Gamma^n_ik Gamma^m_nj).
TensorField riemann(const MetricField& g, const TensorField& christoffel);

GeometryBundle build_geometry(MetricField g);
GeometryBundle build_geometry(const MetricSpec& spec, const GridPtr& grid);

}  // namespace gcr
