#pragma once

#include <string>
#include <utility>
#include <vector>

#include "gcrlab/immersion.hpp"

namespace gcr {

/// Which rewritten Codazzi/Ricci vector a field is, with its 0-based indices.
struct VectorProvenance {
  enum class Kind { Generic, CodazziDiv, CodazziCurl, RicciDiv, RicciCurl };
  Kind kind = Kind::Generic;
  std::vector<int> indices;

  /// e.g. "codazzi-div(1,2,1,3)" with 1-based indices.
  std::string label() const;
};

/// d real components per node, component-major.
class StructuredVectorField {
 public:
  StructuredVectorField() = default;
  explicit StructuredVectorField(GridPtr grid, VectorProvenance tag = {});

  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  int dimension() const { return grid_->dimension(); }
  const VectorProvenance& provenance() const noexcept { return tag_; }

  std::span<const double> component(int i) const {
    return {data_.data() + static_cast<std::size_t>(i) * grid_->num_nodes(), grid_->num_nodes()};
  }
  std::span<double> component(int i) {
    return {data_.data() + static_cast<std::size_t>(i) * grid_->num_nodes(), grid_->num_nodes()};
  }

 private:
  GridPtr grid_;
  std::vector<double> data_;
  VectorProvenance tag_;
};

/// sum_i d_i w_i.
ScalarField numeric_div(const StructuredVectorField& w);

/// (curl w)_ij = d_j w_i - d_i w_j as a tangential 2-tensor antisymmetric in (i, j).
TensorField numeric_curl(const StructuredVectorField& w);

/// Pointwise w . v.
ScalarField dot(const StructuredVectorField& w, const StructuredVectorField& v);

/// Codazzi pair for (a, j, k < l), 0-based: the div-field carries h^a_lj in
/// slot k and -h^a_kj in slot l; the curl-field is (h^a_1j, ..., h^a_dj).
std::pair<StructuredVectorField, StructuredVectorField> build_codazzi_fields(
    const ImmersionFields& fields, int a, int j, int k, int l);

/// Ricci pair for (a, b, k < l): div-field kappa^a_lb in slot k and
/// -kappa^a_kb in slot l; curl-field (kappa^a_1b, ..., kappa^a_db).
std::pair<StructuredVectorField, StructuredVectorField> build_ricci_fields(
    const ImmersionFields& fields, int a, int b, int k, int l);

/// The three scalar-product identities between div- and curl-fields.
///
///   CodazziCodazzi (a,b,i,j,k,l): codazzi-div(a,j,k,l) . codazzi-curl(b,i)
///       = h^a_lj h^b_ki - h^a_kj h^b_li
///   RicciRicci (a,b,c,k,l): ricci-div(b,c,k,l) . ricci-curl(a,b)
///       = kappa^a_kb kappa^b_lc - kappa^a_lb kappa^b_kc
///   RicciCodazzi (a,b,i,k,l): codazzi-div(b,i,k,l) . ricci-curl(a,b)
///       = kappa^a_kb h^b_li - kappa^a_lb h^b_ki
///
/// The RicciRicci identity pairs the relabeled div-field (a -> b, b -> c)
/// with the unrelabeled curl-field; pairing the unrelabeled div-field with
/// the relabeled curl-field gives the same quantity with opposite sign.
enum class PairingIdentity { CodazziCodazzi, RicciRicci, RicciCodazzi };

std::string identity_name(PairingIdentity id);

struct PairingEntry {
  PairingIdentity identity;
  std::vector<int> indices;  ///< 0-based, in the order listed above
  ScalarField product;       ///< empty unless fields were kept
  ScalarField target;
  double max_discrepancy = 0.0;
  double scale = 0.0;  ///< max|div-field| * max|curl-field|
};

struct PairingSummary {
  PairingIdentity identity;
  std::size_t tuples = 0;
  double max_discrepancy = 0.0;
  double max_relative = 0.0;
  std::vector<int> worst;
};

struct PairingReport {
  std::vector<PairingSummary> summaries;  ///< one per identity
  std::vector<PairingEntry> entries;
  double max_relative() const;
};

/// Checks every index tuple (k < l) of all three identities pointwise.
PairingReport pairing_identities(const ImmersionFields& fields, bool keep_fields = true);

}  // namespace gcr
