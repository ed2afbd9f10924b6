#include "gcrlab/tensor_field.hpp"

#include <sstream>

#include "gcrlab/errors.hpp"
#include "gcrlab/parallel.hpp"

namespace gcr {

ScalarField::ScalarField(GridPtr grid, double value)
    : grid_(std::move(grid)), values_(grid_->num_nodes(), value) {}

ScalarField::ScalarField(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_->num_nodes()) {
    throw ShapeError("scalar field size does not match grid");
  }
}

IndexLayout::IndexLayout(std::vector<IndexRole> roles, int dimension, int codimension,
                         std::vector<PairSymmetry> symmetries)
    : roles_(std::move(roles)),
      dimension_(dimension),
      codimension_(codimension),
      symmetries_(std::move(symmetries)) {
  if (dimension_ < 1 || codimension_ < 0) {
    throw ConfigError("index layout needs dimension >= 1 and codimension >= 0");
  }
  const int r = rank();
  extents_.resize(r);
  for (int p = 0; p < r; ++p) {
    extents_[p] = roles_[p] == IndexRole::Tangent ? dimension_ : codimension_;
  }
  std::vector<bool> used(r, false);
  for (const auto& s : symmetries_) {
    if (s.first < 0 || s.second >= r || s.first >= s.second || (s.sign != 1 && s.sign != -1)) {
      throw ConfigError("invalid pair symmetry in index layout");
    }
    if (used[s.first] || used[s.second]) {
      throw ConfigError("pair symmetries of one layout must be disjoint");
    }
    if (roles_[s.first] != roles_[s.second]) {
      throw ConfigError("symmetric index pair mixes tangential and normal roles");
    }
    used[s.first] = used[s.second] = true;
  }

  std::size_t full = 1;
  for (int e : extents_) full *= static_cast<std::size_t>(e);
  slot_of_full_.assign(full, -1);
  sign_of_full_.assign(full, 0.0);

  std::vector<std::size_t> canon_flat(full, 0);
  std::vector<double> canon_sign(full, 0.0);
  std::vector<int> idx(r);
  for (std::size_t f = 0; f < full; ++f) {
    unflatten(f, idx);
    double sign = 1.0;
    for (const auto& s : symmetries_) {
      if (idx[s.first] > idx[s.second]) {
        std::swap(idx[s.first], idx[s.second]);
        sign *= s.sign;
      } else if (idx[s.first] == idx[s.second] && s.sign == -1) {
        sign = 0.0;
      }
    }
    canon_flat[f] = flat(idx);
    canon_sign[f] = sign;
  }
  std::vector<int> slot_of_canon(full, -1);
  for (std::size_t f = 0; f < full; ++f) {
    if (canon_flat[f] == f && canon_sign[f] != 0.0) {
      slot_of_canon[f] = static_cast<int>(multiplicity_.size());
      multiplicity_.push_back(0);
      unflatten(f, idx);
      canonical_.insert(canonical_.end(), idx.begin(), idx.end());
    }
  }
  for (std::size_t f = 0; f < full; ++f) {
    if (canon_sign[f] == 0.0) continue;
    const int s = slot_of_canon[canon_flat[f]];
    slot_of_full_[f] = s;
    sign_of_full_[f] = canon_sign[f];
    ++multiplicity_[s];
  }
}

std::size_t IndexLayout::flat(std::span<const int> idx) const {
  std::size_t f = 0;
  for (std::size_t p = 0; p < extents_.size(); ++p) {
    f = f * static_cast<std::size_t>(extents_[p]) + static_cast<std::size_t>(idx[p]);
  }
  return f;
}

void IndexLayout::unflatten(std::size_t flat, std::span<int> idx) const {
  for (int p = rank() - 1; p >= 0; --p) {
    idx[p] = static_cast<int>(flat % static_cast<std::size_t>(extents_[p]));
    flat /= static_cast<std::size_t>(extents_[p]);
  }
}

std::string IndexLayout::signature() const {
  std::string out;
  for (auto role : roles_) out.push_back(static_cast<char>(role));
  for (const auto& s : symmetries_) {
    std::ostringstream part;
    part << (s.sign > 0 ? ":sym(" : ":anti(") << s.first + 1 << "," << s.second + 1 << ")";
    out += part.str();
  }
  return out;
}

bool operator==(const IndexLayout& a, const IndexLayout& b) {
  return a.roles_ == b.roles_ && a.dimension_ == b.dimension_ &&
         a.codimension_ == b.codimension_ && a.symmetries_ == b.symmetries_;
}

LayoutPtr make_layout(std::vector<IndexRole> roles, int dimension, int codimension,
                      std::vector<PairSymmetry> symmetries) {
  return std::make_shared<const IndexLayout>(std::move(roles), dimension, codimension,
                                             std::move(symmetries));
}

TensorField::TensorField(GridPtr grid, LayoutPtr layout)
    : grid_(std::move(grid)),
      layout_(std::move(layout)),
      data_(static_cast<std::size_t>(layout_->num_slots()) * grid_->num_nodes(), 0.0) {
  if (layout_->dimension() != grid_->dimension()) {
    throw ShapeError("tensor layout dimension does not match grid dimension");
  }
}

double TensorField::get(std::size_t node, std::span<const int> idx) const {
  const std::size_t f = layout_->flat(idx);
  const int s = layout_->slot_of(f);
  if (s < 0) return 0.0;
  return layout_->sign_of(f) * data_[static_cast<std::size_t>(s) * num_nodes() + node];
}

void TensorField::set(std::size_t node, std::span<const int> idx, double value) {
  const std::size_t f = layout_->flat(idx);
  const int s = layout_->slot_of(f);
  if (s < 0) {
    if (value != 0.0) {
      throw ConfigError("nonzero value written to a structurally zero tensor component");
    }
    return;
  }
  data_[static_cast<std::size_t>(s) * num_nodes() + node] = layout_->sign_of(f) * value;
}

void TensorField::unpack(std::size_t node, std::span<double> full) const {
  const IndexLayout& lay = *layout_;
  const std::size_t n = num_nodes();
  for (std::size_t f = 0; f < lay.full_size(); ++f) {
    const int s = lay.slot_of(f);
    full[f] = s < 0 ? 0.0 : lay.sign_of(f) * data_[static_cast<std::size_t>(s) * n + node];
  }
}

void require_same_shape(const TensorField& a, const TensorField& b, const char* what) {
  require_same_grid(a.grid(), b.grid(), what);
  if (!(a.layout() == b.layout())) {
    throw ShapeError(std::string("index layout mismatch in ") + what);
  }
}

void central_difference(const Grid& grid, int axis, std::span<const double> in,
                        std::span<double> out) {
  if (axis < 0 || axis >= grid.dimension()) {
    throw ConfigError("derivative axis out of range");
  }
  if (!grid.periodic(axis)) {
    std::ostringstream msg;
    msg << "unsupported boundary: derivative along non-periodic axis " << axis + 1;
    throw UnsupportedBoundary(msg.str());
  }
  const std::size_t stride = grid.stride(axis);
  const std::size_t n = static_cast<std::size_t>(grid.resolution(axis));
  const double inv = 1.0 / (2.0 * grid.spacing(axis));
  const std::size_t wrap = (n - 1) * stride;
  parallel_for(grid.num_nodes(), [&](std::size_t node) {
    const std::size_t k = (node / stride) % n;
    const std::size_t plus = k + 1 < n ? node + stride : node - wrap;
    const std::size_t minus = k > 0 ? node - stride : node + wrap;
    out[node] = (in[plus] - in[minus]) * inv;
  });
}

ScalarField partial_derivative(const ScalarField& f, int axis) {
  ScalarField out(f.grid_ptr());
  central_difference(f.grid(), axis, f.values(), out.values());
  return out;
}

TensorField partial_derivative(const TensorField& f, int axis) {
  TensorField out(f.grid_ptr(), f.layout_ptr());
  for (int s = 0; s < f.layout().num_slots(); ++s) {
    central_difference(f.grid(), axis, f.slot(s), out.slot(s));
  }
  return out;
}

}  // namespace gcr
