#include "gcrlab/residuals.hpp"

#include <cmath>

#include "gcrlab/errors.hpp"
#include "gcrlab/parallel.hpp"

namespace gcr {
namespace {

constexpr auto T = IndexRole::Tangent;
constexpr auto N = IndexRole::Normal;

void check_inputs(const ImmersionFields& fields, const GeometryBundle& geom, const char* what) {
  require_immersion_shape(fields, geom.grid(), what);
}

std::vector<TensorField> derivatives(const TensorField& f) {
  std::vector<TensorField> out;
  const int d = f.grid().dimension();
  out.reserve(d);
  for (int axis = 0; axis < d; ++axis) out.push_back(partial_derivative(f, axis));
  return out;
}

}  // namespace

LayoutPtr gauss_residual_layout(int d) { return make_layout({T, T, T, T}, d, 0, {{1, 2, -1}}); }

LayoutPtr codazzi_residual_layout(int d, int n_co) {
  return make_layout({N, T, T, T}, d, n_co, {{2, 3, -1}});
}

LayoutPtr ricci_residual_layout(int d, int n_co) {
  return make_layout({N, N, T, T}, d, n_co, {{0, 1, -1}, {2, 3, -1}});
}

TensorField gauss_residual(const ImmersionFields& fields, const GeometryBundle& geom) {
  check_inputs(fields, geom, "gauss_residual");
  const int d = fields.dimension();
  const int n_co = fields.codimension();
  TensorField out(fields.grid_ptr(), gauss_residual_layout(d));
  const IndexLayout& lay = out.layout();
  parallel_for(out.num_nodes(), [&](std::size_t node) {
    LocalImmersion loc;
    loc.load(fields, node);
    auto h = [&](int a, int i, int j) { return loc.h[(a * d + i) * d + j]; };
    for (int s = 0; s < lay.num_slots(); ++s) {
      const auto idx = lay.slot_index(s);
      const int i = idx[0], j = idx[1], k = idx[2], l = idx[3];
      double sum = 0.0;
      for (int a = 0; a < n_co; ++a) sum += h(a, j, i) * h(a, k, l) - h(a, k, i) * h(a, j, l);
      out.slot(s)[node] = sum - geom.riemann.slot(s)[node];
    }
  });
  return out;
}

TensorField codazzi_residual(const ImmersionFields& fields, const GeometryBundle& geom) {
  check_inputs(fields, geom, "codazzi_residual");
  const int d = fields.dimension();
  const int n_co = fields.codimension();
  const std::vector<TensorField> dh = derivatives(fields.h);
  TensorField out(fields.grid_ptr(), codazzi_residual_layout(d, n_co));
  const IndexLayout& lay = out.layout();
  const std::size_t hsize = fields.h.layout().full_size();
  parallel_for(out.num_nodes(), [&](std::size_t node) {
    LocalImmersion loc;
    loc.load(fields, node);
    std::vector<double> gam(geom.christoffel.layout().full_size());
    geom.christoffel.unpack(node, gam);
    std::vector<double> dloc(hsize * d);
    for (int axis = 0; axis < d; ++axis) {
      dh[axis].unpack(node, std::span<double>(dloc).subspan(axis * hsize, hsize));
    }
    auto h = [&](int a, int i, int j) { return loc.h[(a * d + i) * d + j]; };
    auto dhx = [&](int axis, int a, int i, int j) { return dloc[axis * hsize + (a * d + i) * d + j]; };
    auto kap = [&](int a, int l, int b) { return loc.kappa[(a * d + l) * n_co + b]; };
    auto christ = [&](int m, int i, int j) { return gam[(m * d + i) * d + j]; };
    for (int s = 0; s < lay.num_slots(); ++s) {
      const auto idx = lay.slot_index(s);
      const int a = idx[0], j = idx[1], k = idx[2], l = idx[3];
      double r = dhx(k, a, l, j) - dhx(l, a, k, j);
      for (int m = 0; m < d; ++m) r += christ(m, l, j) * h(a, k, m) - christ(m, k, j) * h(a, l, m);
      for (int b = 0; b < n_co; ++b) r += kap(a, k, b) * h(b, l, j) - kap(a, l, b) * h(b, k, j);
      out.slot(s)[node] = r;
    }
  });
  return out;
}

TensorField ricci_residual(const ImmersionFields& fields, const GeometryBundle& geom) {
  check_inputs(fields, geom, "ricci_residual");
  const int d = fields.dimension();
  const int n_co = fields.codimension();
  const std::vector<TensorField> dk = derivatives(fields.kappa);
  TensorField out(fields.grid_ptr(), ricci_residual_layout(d, n_co));
  const IndexLayout& lay = out.layout();
  const std::size_t ksize = fields.kappa.layout().full_size();
  parallel_for(out.num_nodes(), [&](std::size_t node) {
    LocalImmersion loc;
    loc.load(fields, node);
    std::vector<double> ginv(static_cast<std::size_t>(d) * d);
    geom.inverse.unpack(node, ginv);
    std::vector<double> dloc(ksize * d);
    for (int axis = 0; axis < d; ++axis) {
      dk[axis].unpack(node, std::span<double>(dloc).subspan(axis * ksize, ksize));
    }
    auto h = [&](int a, int i, int j) { return loc.h[(a * d + i) * d + j]; };
    auto kap = [&](int a, int l, int b) { return loc.kappa[(a * d + l) * n_co + b]; };
    auto dkx = [&](int axis, int a, int l, int b) {
      return dloc[axis * ksize + (a * d + l) * n_co + b];
    };
    for (int s = 0; s < lay.num_slots(); ++s) {
      const auto idx = lay.slot_index(s);
      const int a = idx[0], b = idx[1], k = idx[2], l = idx[3];
      double r = dkx(k, a, l, b) - dkx(l, a, k, b);
      for (int m = 0; m < d; ++m) {
        for (int n = 0; n < d; ++n) {
          r -= ginv[m * d + n] * (h(a, m, l) * h(b, k, n) - h(a, m, k) * h(b, l, n));
        }
      }
      for (int c = 0; c < n_co; ++c) r += kap(a, k, c) * kap(c, l, b) - kap(a, l, c) * kap(c, k, b);
      out.slot(s)[node] = r;
    }
  });
  return out;
}

ResidualReport evaluate_residuals(const ImmersionFields& fields, const GeometryBundle& geom) {
  return {gauss_residual(fields, geom), codazzi_residual(fields, geom),
          ricci_residual(fields, geom), geom.volume_density};
}

NormPair field_norms(const TensorField& field, const ScalarField& volume_density) {
  require_same_grid(field.grid(), volume_density.grid(), "field_norms");
  const double cell = field.grid().cell_volume();
  double sum = 0.0;
  double linf = 0.0;
  for (int s = 0; s < field.layout().num_slots(); ++s) {
    const auto v = field.slot(s);
    for (std::size_t node = 0; node < v.size(); ++node) {
      sum += volume_density[node] * cell * v[node] * v[node];
      linf = std::max(linf, std::abs(v[node]));
    }
  }
  return {std::sqrt(sum), linf};
}

ResidualNorms residual_norms(const ResidualReport& report) {
  ResidualNorms n;
  n.gauss = field_norms(report.gauss, report.volume_density);
  n.codazzi = field_norms(report.codazzi, report.volume_density);
  n.ricci = field_norms(report.ricci, report.volume_density);
  n.total.l2 = std::sqrt(n.gauss.l2 * n.gauss.l2 + n.codazzi.l2 * n.codazzi.l2 +
                         n.ricci.l2 * n.ricci.l2);
  n.total.linf = std::max({n.gauss.linf, n.codazzi.linf, n.ricci.linf});
  return n;
}

}  // namespace gcr
