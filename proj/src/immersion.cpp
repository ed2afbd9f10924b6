#include "gcrlab/immersion.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "gcrlab/errors.hpp"

namespace gcr {

LayoutPtr second_fundamental_layout(int d, int n_co) {
  return make_layout({IndexRole::Normal, IndexRole::Tangent, IndexRole::Tangent}, d, n_co,
                     {{1, 2, +1}});
}

LayoutPtr normal_connection_layout(int d, int n_co) {
  return make_layout({IndexRole::Normal, IndexRole::Tangent, IndexRole::Normal}, d, n_co,
                     {{0, 2, -1}});
}

ImmersionFields ImmersionFields::zero(const GridPtr& grid, int codimension) {
  if (codimension < 1) throw ConfigError("codimension must be at least 1");
  const int d = grid->dimension();
  return {TensorField(grid, second_fundamental_layout(d, codimension)),
          TensorField(grid, normal_connection_layout(d, codimension))};
}

std::vector<double> ImmersionFields::pack() const {
  std::vector<double> out;
  out.reserve(num_parameters());
  out.insert(out.end(), h.data().begin(), h.data().end());
  out.insert(out.end(), kappa.data().begin(), kappa.data().end());
  return out;
}

void ImmersionFields::unpack(std::span<const double> params) {
  if (params.size() != num_parameters()) {
    throw ShapeError("parameter vector size does not match immersion fields");
  }
  const std::size_t nh = h.data().size();
  std::copy(params.begin(), params.begin() + static_cast<std::ptrdiff_t>(nh), h.data().begin());
  std::copy(params.begin() + static_cast<std::ptrdiff_t>(nh), params.end(), kappa.data().begin());
}

void require_immersion_shape(const ImmersionFields& f, const Grid& grid, const char* what) {
  require_same_grid(f.h.grid(), grid, what);
  require_same_grid(f.kappa.grid(), grid, what);
  const int d = grid.dimension();
  const int n_co = f.codimension();
  if (!(f.h.layout() == *second_fundamental_layout(d, n_co)) ||
      !(f.kappa.layout() == *normal_connection_layout(d, n_co))) {
    throw ShapeError(std::string("immersion field layout mismatch in ") + what);
  }
}

namespace {

void fill_smooth(TensorField& t, std::mt19937_64& rng, double amplitude) {
  const Grid& grid = t.grid();
  const int d = grid.dimension();
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::uniform_int_distribution<int> freq(-1, 1);
  constexpr int kModes = 4;
  std::vector<double> x;
  for (int s = 0; s < t.layout().num_slots(); ++s) {
    std::vector<double> c(kModes);
    std::vector<double> shift(kModes);
    std::vector<std::vector<int>> k(kModes, std::vector<int>(d));
    for (int m = 0; m < kModes; ++m) {
      c[m] = coef(rng);
      shift[m] = std::numbers::pi * coef(rng);
      for (int i = 0; i < d; ++i) {
        // Integer frequencies only on 2*pi-periodic axes.
        const double turns = grid.length(i) / (2.0 * std::numbers::pi);
        k[m][i] = std::abs(turns - std::round(turns)) < 1e-12 ? freq(rng) : 0;
      }
    }
    auto out = t.slot(s);
    for (std::size_t node = 0; node < grid.num_nodes(); ++node) {
      grid.coordinates(node, x);
      double v = 0.0;
      for (int m = 0; m < kModes; ++m) {
        double phase = shift[m];
        for (int i = 0; i < d; ++i) phase += k[m][i] * x[i];
        v += c[m] * std::sin(phase);
      }
      out[node] = amplitude * v / kModes;
    }
  }
}

}  // namespace

ImmersionFields random_smooth_fields(const GridPtr& grid, int codimension, double amplitude,
                                     std::uint64_t seed) {
  ImmersionFields f = ImmersionFields::zero(grid, codimension);
  std::mt19937_64 rng(seed);
  fill_smooth(f.h, rng, amplitude);
  fill_smooth(f.kappa, rng, amplitude);
  return f;
}

ImmersionFields random_node_fields(const GridPtr& grid, int codimension, double amplitude,
                                   std::uint64_t seed) {
  ImmersionFields f = ImmersionFields::zero(grid, codimension);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-amplitude, amplitude);
  for (double& v : f.h.data()) v = u(rng);
  for (double& v : f.kappa.data()) v = u(rng);
  return f;
}

void LocalImmersion::load(const ImmersionFields& f, std::size_t node) {
  h.resize(f.h.layout().full_size());
  kappa.resize(f.kappa.layout().full_size());
  f.h.unpack(node, h);
  f.kappa.unpack(node, kappa);
}

}  // namespace gcr
