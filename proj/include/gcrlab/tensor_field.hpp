#pragma once

#include <cstddef>
#include <initializer_list>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "gcrlab/grid.hpp"

namespace gcr {

/// One real value per grid node.
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(GridPtr grid, double value = 0.0);
  ScalarField(GridPtr grid, std::vector<double> values);

  /// Evaluates f(x) at every node, x being the node coordinates.
  template <class F>
  static ScalarField sample(GridPtr grid, F&& f) {
    ScalarField out(grid);
    std::vector<double> x;
    for (std::size_t node = 0; node < grid->num_nodes(); ++node) {
      grid->coordinates(node, x);
      out.values_[node] = f(std::span<const double>(x));
    }
    return out;
  }

  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  double operator[](std::size_t node) const { return values_[node]; }
  double& operator[](std::size_t node) { return values_[node]; }

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

/// Role of a tensor index: tangential (1..d) or normal (1..n_co).
enum class IndexRole : char { Tangent = 't', Normal = 'n' };

/// Declared symmetry between two index positions; sign = +1 symmetric,
/// -1 antisymmetric. Pairs of one layout must be disjoint.
struct PairSymmetry {
  int first;
  int second;
  int sign;
  friend bool operator==(const PairSymmetry&, const PairSymmetry&) = default;
};

/// Index signature of a tensor field with canonical-representative storage.
///
/// Every full index tuple maps to a storage slot and a sign. Tuples whose
/// value is forced to zero (equal indices of an antisymmetric pair) map to
/// slot -1. The canonical tuple of a slot has first < second for every
/// declared pair (first <= second for symmetric pairs).
class IndexLayout {
 public:
  IndexLayout(std::vector<IndexRole> roles, int dimension, int codimension,
              std::vector<PairSymmetry> symmetries = {});

  int rank() const noexcept { return static_cast<int>(roles_.size()); }
  int dimension() const noexcept { return dimension_; }
  int codimension() const noexcept { return codimension_; }
  int extent(int pos) const { return extents_.at(pos); }
  const std::vector<IndexRole>& roles() const noexcept { return roles_; }
  const std::vector<PairSymmetry>& symmetries() const noexcept { return symmetries_; }
  std::size_t full_size() const noexcept { return slot_of_full_.size(); }
  int num_slots() const noexcept { return static_cast<int>(multiplicity_.size()); }

  std::size_t flat(std::span<const int> idx) const;
  void unflatten(std::size_t flat, std::span<int> idx) const;
  int slot_of(std::size_t flat) const { return slot_of_full_[flat]; }
  double sign_of(std::size_t flat) const { return sign_of_full_[flat]; }
  std::span<const int> slot_index(int slot) const {
    return {canonical_.data() + static_cast<std::size_t>(slot) * roles_.size(), roles_.size()};
  }
  /// Number of full tuples stored in the slot.
  int multiplicity(int slot) const { return multiplicity_.at(slot); }

  /// Short text form, e.g. "ntt:sym(1,2)".
  std::string signature() const;

  friend bool operator==(const IndexLayout& a, const IndexLayout& b);

 private:
  std::vector<IndexRole> roles_;
  int dimension_;
  int codimension_;
  std::vector<PairSymmetry> symmetries_;
  std::vector<int> extents_;
  std::vector<int> slot_of_full_;
  std::vector<double> sign_of_full_;
  std::vector<int> canonical_;
  std::vector<int> multiplicity_;
};

using LayoutPtr = std::shared_ptr<const IndexLayout>;

LayoutPtr make_layout(std::vector<IndexRole> roles, int dimension, int codimension,
                      std::vector<PairSymmetry> symmetries = {});

/// A tensor-valued field: one value per storage slot per node, slot-major.
class TensorField {
 public:
  TensorField() = default;
  TensorField(GridPtr grid, LayoutPtr layout);

  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  const IndexLayout& layout() const { return *layout_; }
  const LayoutPtr& layout_ptr() const { return layout_; }
  std::size_t num_nodes() const { return grid_->num_nodes(); }

  std::span<const double> slot(int s) const {
    return {data_.data() + static_cast<std::size_t>(s) * num_nodes(), num_nodes()};
  }
  std::span<double> slot(int s) {
    return {data_.data() + static_cast<std::size_t>(s) * num_nodes(), num_nodes()};
  }
  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  /// Value for a full index tuple (sign applied).
  double at(std::size_t node, std::initializer_list<int> idx) const {
    return get(node, std::span<const int>(idx.begin(), idx.size()));
  }
  double get(std::size_t node, std::span<const int> idx) const;

  /// Writes through the canonical slot. Writing a nonzero value to a
  /// structurally zero tuple throws ConfigError.
  void assign(std::size_t node, std::initializer_list<int> idx, double value) {
    set(node, std::span<const int>(idx.begin(), idx.size()), value);
  }
  void set(std::size_t node, std::span<const int> idx, double value);

  /// Dense copy of every full tuple at one node (layout().flat() order).
  void unpack(std::size_t node, std::span<double> full) const;

 private:
  GridPtr grid_;
  LayoutPtr layout_;
  std::vector<double> data_;
};

/// Throws ShapeError unless both fields share grid and layout.
void require_same_shape(const TensorField& a, const TensorField& b, const char* what);

/// Central difference (f(x+h e) - f(x-h e)) / 2h with periodic wraparound.
/// `axis` is 0-based. Throws UnsupportedBoundary on non-periodic axes.
ScalarField partial_derivative(const ScalarField& f, int axis);
TensorField partial_derivative(const TensorField& f, int axis);

/// Applies the same stencil to a raw node array (used by adjoint code).
void central_difference(const Grid& grid, int axis, std::span<const double> in,
                        std::span<double> out);

}  // namespace gcr
