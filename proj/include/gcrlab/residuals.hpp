#pragma once

#include "gcrlab/geometry.hpp"
#include "gcrlab/immersion.hpp"

namespace gcr {

LayoutPtr gauss_residual_layout(int dimension);
LayoutPtr codazzi_residual_layout(int dimension, int codimension);
LayoutPtr ricci_residual_layout(int dimension, int codimension);

/// sum_a (h^a_ji h^a_kl - h^a_ki h^a_jl) - R_ijkl, stored (i, j, k, l),
/// antisymmetric in (j, k).
TensorField gauss_residual(const ImmersionFields& fields, const GeometryBundle& geom);

/// d_k h^a_lj - d_l h^a_kj + Gamma^m_lj h^a_km - Gamma^m_kj h^a_lm
///   + kappa^a_kb h^b_lj - kappa^a_lb h^b_kj, stored (a, j, k, l), antisymmetric in (k, l).
TensorField codazzi_residual(const ImmersionFields& fields, const GeometryBundle& geom);

/// d_k kappa^a_lb - d_l kappa^a_kb - g^{mn}(h^a_ml h^b_kn - h^a_mk h^b_ln)
///   + kappa^a_kc kappa^c_lb - kappa^a_lc kappa^c_kb, stored (a, b, k, l),
/// antisymmetric in (a, b) and in (k, l).
TensorField ricci_residual(const ImmersionFields& fields, const GeometryBundle& geom);

struct NormPair {
  double l2 = 0.0;
  double linf = 0.0;
};

struct ResidualNorms {
  NormPair gauss;
  NormPair codazzi;
  NormPair ricci;
  NormPair total;  ///< l2 = root of summed squares, linf = max
};

struct ResidualReport {
  TensorField gauss;
  TensorField codazzi;
  TensorField ricci;
  ScalarField volume_density;  ///< sqrt|g| used by the L2 weights
};

ResidualReport evaluate_residuals(const ImmersionFields& fields, const GeometryBundle& geom);

/// L2 norm weighted by sqrt|g| * cell volume, counting every stored
/// (independent) component once, and the max norm.
NormPair field_norms(const TensorField& field, const ScalarField& volume_density);
ResidualNorms residual_norms(const ResidualReport& report);

}  // namespace gcr
