#include "gcrlab/grid.hpp"

#include <sstream>

#include "gcrlab/errors.hpp"

namespace gcr {

Grid::Grid(GridSpec spec) : spec_(std::move(spec)) {
  const int d = spec_.dimension;
  if (d < 2) {
    throw ConfigError("grid dimension must be at least 2");
  }
  if (static_cast<int>(spec_.lengths.size()) != d ||
      static_cast<int>(spec_.resolution.size()) != d) {
    throw ConfigError("grid box and resolution must list one entry per axis");
  }
  if (spec_.periodic.empty()) spec_.periodic.assign(d, true);
  if (static_cast<int>(spec_.periodic.size()) != d) {
    throw ConfigError("grid periodicity must list one entry per axis");
  }
  for (int i = 0; i < d; ++i) {
    if (!(spec_.lengths[i] > 0.0)) {
      std::ostringstream msg;
      msg << "box length must be positive on axis " << i + 1;
      throw ConfigError(msg.str());
    }
    if (spec_.resolution[i] <= 0) {
      std::ostringstream msg;
      msg << "resolution must be positive on axis " << i + 1;
      throw ConfigError(msg.str());
    }
    if (spec_.resolution[i] < kMinResolution) {
      std::ostringstream msg;
      msg << "resolution below minimum on axis " << i + 1 << " ("
          << spec_.resolution[i] << " < " << kMinResolution << ")";
      throw ConfigError(msg.str());
    }
  }

  spacing_.resize(d);
  strides_.resize(d);
  num_nodes_ = 1;
  cell_volume_ = 1.0;
  for (int i = d - 1; i >= 0; --i) {
    strides_[i] = num_nodes_;
    num_nodes_ *= static_cast<std::size_t>(spec_.resolution[i]);
  }
  for (int i = 0; i < d; ++i) {
    spacing_[i] = spec_.lengths[i] / spec_.resolution[i];
    cell_volume_ *= spacing_[i];
  }
}

void Grid::coordinates(std::size_t node, std::vector<double>& x) const {
  x.resize(spec_.dimension);
  for (int i = 0; i < spec_.dimension; ++i) x[i] = coordinate(node, i);
}

std::size_t Grid::neighbor(std::size_t node, int axis, int offset) const {
  const long n = spec_.resolution[axis];
  const long k = index(node, axis);
  long target = (k + offset) % n;
  if (target < 0) target += n;
  return node + static_cast<std::size_t>(target - k) * strides_[axis];
}

bool operator==(const Grid& a, const Grid& b) {
  return a.spec_.dimension == b.spec_.dimension &&
         a.spec_.lengths == b.spec_.lengths &&
         a.spec_.resolution == b.spec_.resolution &&
         a.spec_.periodic == b.spec_.periodic;
}

GridPtr build_grid(GridSpec spec) { return std::make_shared<const Grid>(std::move(spec)); }

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (&a != &b && !(a == b)) {
    throw ShapeError(std::string("grid mismatch in ") + what);
  }
}

}  // namespace gcr
