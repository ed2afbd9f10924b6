#include "gcrlab/metric.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "gcrlab/errors.hpp"

namespace gcr {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

int resolve_target(const RevolutionMetric& m, int d) {
  return m.target_axis < 0 ? d - 1 : m.target_axis;
}

void require_period(const Grid& grid, int axis, const std::string& what) {
  const double turns = grid.length(axis) / (2.0 * std::numbers::pi);
  const double nearest = std::round(turns);
  if (nearest < 1.0 || std::abs(turns - nearest) > 1e-12 * std::max(1.0, turns)) {
    std::ostringstream msg;
    msg << what << " is not periodic on axis " << axis + 1
        << ": box length must be a multiple of 2*pi";
    throw ConfigError(msg.str());
  }
}

void require_poly_period(const TrigPolynomial& p, const Grid& grid, const std::string& what) {
  for (int axis = 0; axis < grid.dimension(); ++axis) {
    if (p.max_frequency(axis) > 0) require_period(grid, axis, what);
  }
}

}  // namespace

std::string metric_name(const MetricSpec& spec) {
  return std::visit(Overloaded{
                        [](const FlatMetric&) { return std::string("flat"); },
                        [](const RevolutionMetric&) { return std::string("diag-of-revolution"); },
                        [](const ConformalMetric&) { return std::string("conformal"); },
                        [](const GraphMetric&) { return std::string("graph"); },
                        [](const TrigMetric&) { return std::string("trig"); },
                    },
                    spec);
}

void evaluate_metric(const MetricSpec& spec, int d, std::span<const double> x, std::span<double> g) {
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) g[i * d + j] = i == j ? 1.0 : 0.0;
  }
  std::visit(Overloaded{
                 [](const FlatMetric&) {},
                 [&](const RevolutionMetric& m) {
                   const int t = resolve_target(m, d);
                   const double r = m.major_radius + m.minor_radius * std::cos(x[m.profile_axis]);
                   g[t * d + t] = r * r;
                 },
                 [&](const ConformalMetric& m) {
                   const double factor = std::exp(2.0 * m.phi(x));
                   for (int i = 0; i < d; ++i) g[i * d + i] = factor;
                 },
                 [&](const GraphMetric& m) {
                   std::vector<double> grad(d, m.amplitude);
                   for (int i = 0; i < d; ++i) {
                     for (int k = 0; k < d; ++k) {
                       grad[i] *= k == i ? std::cos(x[k]) : std::sin(x[k]);
                     }
                   }
                   for (int i = 0; i < d; ++i) {
                     for (int j = 0; j < d; ++j) g[i * d + j] += grad[i] * grad[j];
                   }
                 },
                 [&](const TrigMetric& m) {
                   int pos = 0;
                   for (int i = 0; i < d; ++i) {
                     for (int j = i; j < d; ++j, ++pos) {
                       if (pos < static_cast<int>(m.components.size())) {
                         const double v = m.components[pos](x);
                         g[i * d + j] = v;
                         g[j * d + i] = v;
                       }
                     }
                   }
                 },
             },
             spec);
}

void check_metric_periodicity(const MetricSpec& spec, const Grid& grid) {
  const int d = grid.dimension();
  std::visit(Overloaded{
                 [](const FlatMetric&) {},
                 [&](const RevolutionMetric& m) {
                   const int t = resolve_target(m, d);
                   if (m.profile_axis < 0 || m.profile_axis >= d || t < 0 || t >= d ||
                       t == m.profile_axis) {
                     throw ConfigError("diag-of-revolution axes out of range or equal");
                   }
                   if (!(m.major_radius > std::abs(m.minor_radius))) {
                     throw ConfigError("diag-of-revolution needs major radius > |minor radius|");
                   }
                   require_period(grid, m.profile_axis, "diag-of-revolution metric");
                 },
                 [&](const ConformalMetric& m) { require_poly_period(m.phi, grid, "conformal metric"); },
                 [&](const GraphMetric&) {
                   for (int axis = 0; axis < d; ++axis) require_period(grid, axis, "graph metric");
                 },
                 [&](const TrigMetric& m) {
                   if (m.components.size() > static_cast<std::size_t>(d * (d + 1) / 2)) {
                     throw ConfigError("trig metric lists more components than d(d+1)/2");
                   }
                   for (const auto& p : m.components) require_poly_period(p, grid, "trig metric");
                 },
             },
             spec);
}

bool cholesky_factor(std::span<double> a, int n, int& failed_minor, double& minor_value) {
  double leading_det = 1.0;
  for (int j = 0; j < n; ++j) {
    double pivot = a[j * n + j];
    for (int k = 0; k < j; ++k) pivot -= a[j * n + k] * a[j * n + k];
    if (!(pivot > 0.0)) {
      failed_minor = j + 1;
      minor_value = leading_det * pivot;
      return false;
    }
    const double ljj = std::sqrt(pivot);
    leading_det *= pivot;
    a[j * n + j] = ljj;
    for (int i = j + 1; i < n; ++i) {
      double s = a[i * n + j];
      for (int k = 0; k < j; ++k) s -= a[i * n + k] * a[j * n + k];
      a[i * n + j] = s / ljj;
    }
    for (int i = 0; i < j; ++i) a[i * n + j] = 0.0;
  }
  return true;
}

LayoutPtr symmetric_pair_layout(int dimension) {
  return make_layout({IndexRole::Tangent, IndexRole::Tangent}, dimension, 0, {{0, 1, +1}});
}

MetricField::MetricField(TensorField g) : g_(std::move(g)) {
  const IndexLayout& lay = g_.layout();
  if (lay.rank() != 2 || lay.roles()[0] != IndexRole::Tangent ||
      lay.roles()[1] != IndexRole::Tangent || lay.symmetries().size() != 1 ||
      lay.symmetries()[0].sign != 1) {
    throw ShapeError("metric field must be a symmetric tangential 2-tensor");
  }
  const int d = g_.grid().dimension();
  std::vector<double> a(static_cast<std::size_t>(d * d));
  for (std::size_t node = 0; node < g_.num_nodes(); ++node) {
    g_.unpack(node, a);
    int minor = 0;
    double value = 0.0;
    if (!cholesky_factor(a, d, minor, value)) {
      std::ostringstream msg;
      msg << "metric is not positive-definite at node (";
      for (int i = 0; i < d; ++i) msg << (i ? ", " : "") << g_.grid().coordinate(node, i);
      msg << "): leading minor " << minor << " = " << value;
      throw ConfigError(msg.str());
    }
  }
}

MetricField sample_metric(const MetricSpec& spec, const GridPtr& grid) {
  const int d = grid->dimension();
  TensorField g(grid, symmetric_pair_layout(d));
  std::vector<double> x;
  std::vector<double> m(static_cast<std::size_t>(d * d));
  for (std::size_t node = 0; node < grid->num_nodes(); ++node) {
    grid->coordinates(node, x);
    evaluate_metric(spec, d, x, m);
    for (int i = 0; i < d; ++i) {
      for (int j = i; j < d; ++j) g.assign(node, {i, j}, m[i * d + j]);
    }
  }
  return MetricField(std::move(g));
}

InverseMetric invert_metric(const MetricField& metric) {
  const TensorField& g = metric.tensor();
  const int d = metric.dimension();
  InverseMetric out{TensorField(g.grid_ptr(), g.layout_ptr()), ScalarField(g.grid_ptr())};
  std::vector<double> a(static_cast<std::size_t>(d * d));
  std::vector<double> linv(static_cast<std::size_t>(d * d));
  for (std::size_t node = 0; node < g.num_nodes(); ++node) {
    g.unpack(node, a);
    int minor = 0;
    double value = 0.0;
    if (!cholesky_factor(a, d, minor, value)) {
      std::ostringstream msg;
      msg << "metric is not positive-definite at node " << node << ": leading minor " << minor
          << " = " << value;
      throw NumericalError(msg.str());
    }
    double det = 1.0;
    for (int i = 0; i < d; ++i) det *= a[i * d + i] * a[i * d + i];
    out.det[node] = det;
    // L^{-1} by forward substitution, then g^{-1} = L^{-T} L^{-1}.
    std::fill(linv.begin(), linv.end(), 0.0);
    for (int c = 0; c < d; ++c) {
      for (int i = c; i < d; ++i) {
        double s = i == c ? 1.0 : 0.0;
        for (int k = c; k < i; ++k) s -= a[i * d + k] * linv[k * d + c];
        linv[i * d + c] = s / a[i * d + i];
      }
    }
    for (int i = 0; i < d; ++i) {
      for (int j = i; j < d; ++j) {
        double s = 0.0;
        for (int k = std::max(i, j); k < d; ++k) s += linv[k * d + i] * linv[k * d + j];
        out.inverse.assign(node, {i, j}, s);
      }
    }
  }
  return out;
}

}  // namespace gcr
