#pragma once

#include <cstddef>
#include <memory>
#include <vector>

namespace gcr {

/// Geometry of a structured box grid as read from a scene.
struct GridSpec {
  int dimension = 3;
  std::vector<double> lengths;
  std::vector<int> resolution;
  std::vector<bool> periodic;  ///< empty means every axis periodic
};

/// Uniform structured grid on [0, L_1) x ... x [0, L_d).
///
/// Nodes are numbered in row-major order with the last axis fastest.
/// Axes are 0-based in the API; messages name them 1-based.
class Grid {
 public:
  static constexpr int kMinResolution = 8;

  explicit Grid(GridSpec spec);

  int dimension() const noexcept { return spec_.dimension; }
  std::size_t num_nodes() const noexcept { return num_nodes_; }
  double length(int axis) const { return spec_.lengths.at(axis); }
  int resolution(int axis) const { return spec_.resolution.at(axis); }
  bool periodic(int axis) const { return spec_.periodic.at(axis); }
  double spacing(int axis) const { return spacing_.at(axis); }
  std::size_t stride(int axis) const { return strides_.at(axis); }
  double cell_volume() const noexcept { return cell_volume_; }
  const GridSpec& spec() const noexcept { return spec_; }

  int index(std::size_t node, int axis) const {
    return static_cast<int>((node / strides_[axis]) % spec_.resolution[axis]);
  }
  double coordinate(std::size_t node, int axis) const {
    return index(node, axis) * spacing_[axis];
  }
  void coordinates(std::size_t node, std::vector<double>& x) const;

  /// Neighbor at `offset` nodes along `axis` with periodic wraparound.
  std::size_t neighbor(std::size_t node, int axis, int offset) const;

  friend bool operator==(const Grid& a, const Grid& b);

 private:
  GridSpec spec_;
  std::vector<double> spacing_;
  std::vector<std::size_t> strides_;
  std::size_t num_nodes_ = 0;
  double cell_volume_ = 0.0;
};

using GridPtr = std::shared_ptr<const Grid>;

GridPtr build_grid(GridSpec spec);

/// Throws ShapeError unless both grids describe the same nodes.
void require_same_grid(const Grid& a, const Grid& b, const char* what);

}  // namespace gcr
