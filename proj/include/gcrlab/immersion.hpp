#pragma once

#include <cstdint>
#include <vector>

#include "gcrlab/tensor_field.hpp"

namespace gcr {

LayoutPtr second_fundamental_layout(int dimension, int codimension);
LayoutPtr normal_connection_layout(int dimension, int codimension);

/// The unknowns of the Gauss-Codazzi-Ricci system.
///
/// h^a_ij is stored as (a, i, j), symmetric in (i, j); kappa^a_lb is stored
/// as (a, l, b), antisymmetric in (a, b), so kappa^a_la = 0 structurally.
struct ImmersionFields {
  TensorField h;
  TensorField kappa;

  static ImmersionFields zero(const GridPtr& grid, int codimension);

  const Grid& grid() const { return h.grid(); }
  const GridPtr& grid_ptr() const { return h.grid_ptr(); }
  int dimension() const { return h.layout().dimension(); }
  int codimension() const { return h.layout().codimension(); }

  /// Number of canonical unknowns (slots times nodes).
  std::size_t num_parameters() const { return h.data().size() + kappa.data().size(); }

  /// Canonical slots of h followed by those of kappa.
  std::vector<double> pack() const;
  void unpack(std::span<const double> params);
};

/// Throws ShapeError unless the fields use the standard layouts on `grid`.
void require_immersion_shape(const ImmersionFields& f, const Grid& grid, const char* what);

/// Smooth random fields: every canonical component is a random combination
/// of low Fourier modes (frequency <= 1 per axis) with the given amplitude.
ImmersionFields random_smooth_fields(const GridPtr& grid, int codimension, double amplitude,
                                     std::uint64_t seed);

/// Independent random values per node and component (not smooth).
ImmersionFields random_node_fields(const GridPtr& grid, int codimension, double amplitude,
                                   std::uint64_t seed);

/// Dense per-node copies: h[(a*d + i)*d + j], kappa[(a*d + l)*n_co + b].
struct LocalImmersion {
  std::vector<double> h;
  std::vector<double> kappa;
  void load(const ImmersionFields& f, std::size_t node);
};

}  // namespace gcr
