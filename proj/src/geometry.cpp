#include "gcrlab/geometry.hpp"

#include <cmath>

#include "gcrlab/errors.hpp"
#include "gcrlab/parallel.hpp"

namespace gcr {

LayoutPtr christoffel_layout(int d) {
  return make_layout({IndexRole::Tangent, IndexRole::Tangent, IndexRole::Tangent}, d, 0,
                     {{1, 2, +1}});
}

LayoutPtr riemann_layout(int d) {
  return make_layout(
      {IndexRole::Tangent, IndexRole::Tangent, IndexRole::Tangent, IndexRole::Tangent}, d, 0,
      {{1, 2, -1}});
}

TensorField christoffel(const MetricField& metric, const TensorField& inverse) {
  const TensorField& g = metric.tensor();
  require_same_shape(g, inverse, "christoffel");
  const int d = metric.dimension();
  std::vector<TensorField> dg;
  dg.reserve(d);
  for (int axis = 0; axis < d; ++axis) dg.push_back(partial_derivative(g, axis));

  TensorField gamma(g.grid_ptr(), christoffel_layout(d));
  const IndexLayout& lay = gamma.layout();
  const std::size_t dd = static_cast<std::size_t>(d) * d;
  parallel_for(g.num_nodes(), [&](std::size_t node) {
    std::vector<double> ginv(dd);
    std::vector<double> dgl(dd * d);  // dgl[axis*dd + i*d + j] = d_axis g_ij
    inverse.unpack(node, ginv);
    for (int axis = 0; axis < d; ++axis) {
      dg[axis].unpack(node, std::span<double>(dgl).subspan(axis * dd, dd));
    }
    for (int s = 0; s < lay.num_slots(); ++s) {
      const auto idx = lay.slot_index(s);
      const int k = idx[0], i = idx[1], j = idx[2];
      double sum = 0.0;
      for (int l = 0; l < d; ++l) {
        const double bracket = dgl[j * dd + i * d + l] + dgl[i * dd + j * d + l] -
                               dgl[l * dd + i * d + j];
        sum += ginv[k * d + l] * bracket;
      }
      gamma.slot(s)[node] = 0.5 * sum;
    }
  });
  return gamma;
}

TensorField riemann(const MetricField& metric, const TensorField& gamma) {
  const TensorField& g = metric.tensor();
  require_same_grid(g.grid(), gamma.grid(), "riemann");
  const int d = metric.dimension();
  std::vector<TensorField> dgamma;
  dgamma.reserve(d);
  for (int axis = 0; axis < d; ++axis) dgamma.push_back(partial_derivative(gamma, axis));

  TensorField r(g.grid_ptr(), riemann_layout(d));
  const IndexLayout& lay = r.layout();
  const std::size_t dd = static_cast<std::size_t>(d) * d;
  const std::size_t ddd = dd * d;
  parallel_for(g.num_nodes(), [&](std::size_t node) {
    std::vector<double> gl(dd);
    std::vector<double> gam(ddd);         // gam[m*dd + i*d + j] = Gamma^m_ij
    std::vector<double> dgam(ddd * d);    // dgam[axis*ddd + m*dd + i*d + j]
    g.unpack(node, gl);
    gamma.unpack(node, gam);
    for (int axis = 0; axis < d; ++axis) {
      dgamma[axis].unpack(node, std::span<double>(dgam).subspan(axis * ddd, ddd));
    }
    for (int s = 0; s < lay.num_slots(); ++s) {
      const auto idx = lay.slot_index(s);
      const int i = idx[0], j = idx[1], k = idx[2], l = idx[3];
      double sum = 0.0;
      for (int m = 0; m < d; ++m) {
        double bracket = dgam[k * ddd + m * dd + i * d + j] - dgam[j * ddd + m * dd + i * d + k];
        for (int n = 0; n < d; ++n) {
          bracket += gam[n * dd + i * d + j] * gam[m * dd + n * d + k] -
                     gam[n * dd + i * d + k] * gam[m * dd + n * d + j];
        }
        sum += gl[l * d + m] * bracket;
      }
      r.slot(s)[node] = sum;
    }
  });
  return r;
}

GeometryBundle build_geometry(MetricField g) {
  InverseMetric inv = invert_metric(g);
  ScalarField density(g.grid_ptr());
  for (std::size_t node = 0; node < density.size(); ++node) density[node] = std::sqrt(inv.det[node]);
  TensorField gamma = christoffel(g, inv.inverse);
  TensorField r = riemann(g, gamma);
  return GeometryBundle{std::move(g),       std::move(inv.inverse), std::move(inv.det),
                        std::move(density), std::move(gamma),       std::move(r)};
}

GeometryBundle build_geometry(const MetricSpec& spec, const GridPtr& grid) {
  check_metric_periodicity(spec, *grid);
  return build_geometry(sample_metric(spec, grid));
}

}  // namespace gcr
