#include "gcrlab/weak_lab.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "gcrlab/errors.hpp"
#include "gcrlab/residuals.hpp"

namespace gcr {
namespace {

double oscillation_phase(const Grid& grid, std::size_t node, std::span<const int> eta, int m) {
  double s = 0.0;
  for (int i = 0; i < grid.dimension(); ++i) {
    if (eta[i] != 0) s += eta[i] * grid.coordinate(node, i);
  }
  return m * s;
}

void require_eta(std::span<const int> eta, int d, const char* what) {
  if (static_cast<int>(eta.size()) != d) {
    throw ConfigError(std::string(what) + ": eta must have one integer per axis");
  }
  bool nonzero = false;
  for (int e : eta) nonzero = nonzero || e != 0;
  if (!nonzero) throw ConfigError(std::string(what) + ": eta must be nonzero");
}

bool is_two_pi_multiple(double length) {
  const double turns = length / (2.0 * std::numbers::pi);
  return std::round(turns) >= 1.0 && std::abs(turns - std::round(turns)) <= 1e-12 * turns;
}

StructuredVectorField sample_macro(const std::vector<TrigPolynomial>& comps, const GridPtr& grid) {
  StructuredVectorField out(grid);
  if (comps.empty()) return out;
  std::vector<double> x;
  for (int i = 0; i < grid->dimension(); ++i) {
    auto dst = out.component(i);
    for (std::size_t node = 0; node < grid->num_nodes(); ++node) {
      grid->coordinates(node, x);
      dst[node] = comps[i](x);
    }
  }
  return out;
}

double plain_l2(std::span<const double> v, double cell) {
  double s = 0.0;
  for (double x : v) s += x * x * cell;
  return std::sqrt(s);
}

double tensor_l2(const TensorField& t) {
  double s = 0.0;
  for (double v : t.data()) s += v * v;
  return std::sqrt(s * t.grid().cell_volume());
}

double analytic_div_l2(const std::vector<TrigPolynomial>& u, const GridPtr& grid) {
  if (u.empty()) return 0.0;
  const int d = grid->dimension();
  std::vector<double> x;
  double s = 0.0;
  for (std::size_t node = 0; node < grid->num_nodes(); ++node) {
    grid->coordinates(node, x);
    double div = 0.0;
    for (int i = 0; i < d; ++i) div += u[i].derivative(x, i);
    s += div * div;
  }
  return std::sqrt(s * grid->cell_volume());
}

double analytic_curl_l2(const std::vector<TrigPolynomial>& v, const GridPtr& grid) {
  if (v.empty()) return 0.0;
  const int d = grid->dimension();
  std::vector<double> x;
  double s = 0.0;
  for (std::size_t node = 0; node < grid->num_nodes(); ++node) {
    grid->coordinates(node, x);
    for (int i = 0; i < d; ++i) {
      for (int j = i + 1; j < d; ++j) {
        const double c = v[i].derivative(x, j) - v[j].derivative(x, i);
        s += c * c;
      }
    }
  }
  return std::sqrt(s * grid->cell_volume());
}

/// Integral of phi over a box whose lengths are multiples of 2*pi.
double box_integral(const TestFunction& phi, const GridSpec& box) {
  double vol = 1.0;
  for (double l : box.lengths) vol *= l;
  double mean = phi.poly.constant;
  for (const auto& t : phi.poly.terms) {
    bool zero_wave = true;
    for (int k : t.wave) zero_wave = zero_wave && k == 0;
    if (zero_wave && t.kind == TrigTerm::Kind::Cos) mean += t.coef;
  }
  return mean * vol;
}

}  // namespace

double profile_value(Profile p, double s) { return p == Profile::Sin ? std::sin(s) : std::cos(s); }

std::string profile_name(Profile p) { return p == Profile::Sin ? "sin" : "cos"; }

ScalarField TestFunction::sample(const GridPtr& grid) const {
  return ScalarField::sample(grid, [this](std::span<const double> x) { return poly(x); });
}

double weak_pairing(const ScalarField& f, const ScalarField& phi) {
  require_same_grid(f.grid(), phi.grid(), "weak_pairing");
  double s = 0.0;
  for (std::size_t node = 0; node < f.size(); ++node) s += f[node] * phi[node];
  return s * f.grid().cell_volume();
}

double weak_pairing(const ScalarField& f, const TestFunction& phi) {
  return weak_pairing(f, phi.sample(f.grid_ptr()));
}

EpsSchedule::EpsSchedule(std::vector<int> inverse_eps) : inverse_eps_(std::move(inverse_eps)) {
  if (inverse_eps_.empty()) throw ConfigError("eps schedule is empty");
  for (std::size_t i = 0; i < inverse_eps_.size(); ++i) {
    if (inverse_eps_[i] < 1) throw ConfigError("eps schedule entries must be 1/m with integer m >= 1");
    if (i > 0 && inverse_eps_[i] <= inverse_eps_[i - 1]) {
      throw ConfigError("eps schedule must be strictly decreasing");
    }
  }
}

void EpsSchedule::validate(const GridSpec& base, std::span<const int> eta) const {
  require_eta(eta, base.dimension, "eps schedule");
  for (int axis = 0; axis < base.dimension; ++axis) {
    if (eta[axis] == 0) continue;
    if (!is_two_pi_multiple(base.lengths.at(axis))) {
      std::ostringstream msg;
      msg << "oscillation along axis " << axis + 1 << " needs a box length multiple of 2*pi";
      throw ConfigError(msg.str());
    }
    for (int m : inverse_eps_) {
      if (base.resolution.at(axis) % m != 0) {
        std::ostringstream msg;
        msg << "oscillation period does not divide grid: eps = 1/" << m
            << " with resolution " << base.resolution[axis] << " on axis " << axis + 1;
        throw ConfigError(msg.str());
      }
    }
  }
}

int EpsSchedule::multiplier(std::size_t i, const GridSpec& base, std::span<const int> eta,
                            int axis) const {
  if (eta[axis] == 0) return 1;
  const long needed = static_cast<long>(kNodesPerPeriod) * inverse_eps_.at(i) * std::abs(eta[axis]);
  const long n = base.resolution.at(axis);
  return static_cast<int>(std::max(1L, (needed + n - 1) / n));
}

GridSpec EpsSchedule::grid_for(std::size_t i, const GridSpec& base, std::span<const int> eta) const {
  validate(base, eta);
  GridSpec out = base;
  for (int axis = 0; axis < base.dimension; ++axis) {
    out.resolution[axis] *= multiplier(i, base, eta, axis);
  }
  return out;
}

void validate_pair_spec(const PairSpec& spec, int d) {
  require_eta(spec.eta, d, "oscillatory pair");
  if (static_cast<int>(spec.w.size()) != d) {
    throw ConfigError("oscillatory pair: w must have one entry per axis");
  }
  double dotp = 0.0;
  double scale = 0.0;
  for (int i = 0; i < d; ++i) {
    dotp += spec.w[i] * spec.eta[i];
    scale += std::abs(spec.w[i] * spec.eta[i]);
  }
  if (std::abs(dotp) > 1e-14 * std::max(1.0, scale)) {
    throw ConfigError("oscillatory pair: w is not orthogonal to eta");
  }
  for (const auto* macro : {&spec.u_macro, &spec.v_macro}) {
    if (!macro->empty() && static_cast<int>(macro->size()) != d) {
      throw ConfigError("oscillatory pair: macroscopic fields need one component per axis");
    }
  }
}

OscillatoryPair make_oscillatory_pair(const PairSpec& spec, const GridPtr& grid, int m) {
  const int d = grid->dimension();
  validate_pair_spec(spec, d);
  OscillatoryPair pair{m, sample_macro(spec.u_macro, grid), sample_macro(spec.v_macro, grid),
                       sample_macro(spec.u_macro, grid), sample_macro(spec.v_macro, grid)};
  for (std::size_t node = 0; node < grid->num_nodes(); ++node) {
    const double s = oscillation_phase(*grid, node, spec.eta, m);
    const double bu = profile_value(spec.b, s);
    const double cv = profile_value(spec.c, s) * spec.v_amplitude;
    for (int i = 0; i < d; ++i) {
      if (spec.w[i] != 0.0) pair.u.component(i)[node] += bu * spec.w[i];
      if (spec.eta[i] != 0) pair.v.component(i)[node] += cv * spec.eta[i];
    }
  }
  return pair;
}

OscillatoryPair make_violation_pair(const PairSpec& spec, const GridPtr& grid, int m) {
  const int d = grid->dimension();
  require_eta(spec.eta, d, "violation pair");
  OscillatoryPair pair{m, StructuredVectorField(grid), StructuredVectorField(grid),
                       StructuredVectorField(grid), StructuredVectorField(grid)};
  for (std::size_t node = 0; node < grid->num_nodes(); ++node) {
    const double b = profile_value(spec.b, oscillation_phase(*grid, node, spec.eta, m));
    for (int i = 0; i < d; ++i) {
      pair.u.component(i)[node] = b * spec.eta[i];
      pair.v.component(i)[node] = b * spec.eta[i];
    }
  }
  return pair;
}

DivCurlTable divcurl_experiment(const PairSpec& spec, const EpsSchedule& schedule,
                                const GridSpec& base, const std::vector<TestFunction>& phis) {
  validate_pair_spec(spec, base.dimension);
  schedule.validate(base, spec.eta);
  DivCurlTable table;
  double eta2 = 0.0;
  for (int e : spec.eta) eta2 += e * e;
  for (const auto& phi : phis) {
    table.violation_limit.push_back(profile_mean_square(spec.b) * eta2 * box_integral(phi, base));
  }

  auto run_row = [&](const OscillatoryPair& pair, const GridPtr& grid, bool admissible) {
    DivCurlRow row;
    row.m = pair.m;
    row.eps = 1.0 / pair.m;
    row.resolution = grid->spec().resolution;
    ScalarField diff = dot(pair.u, pair.v);
    const ScalarField limit = dot(pair.u_limit, pair.v_limit);
    for (std::size_t node = 0; node < diff.size(); ++node) diff[node] -= limit[node];
    for (const auto& phi : phis) row.gaps.push_back(std::abs(weak_pairing(diff, phi)));
    row.div_u_l2 = plain_l2(numeric_div(pair.u).values(), grid->cell_volume());
    row.curl_v_l2 = tensor_l2(numeric_curl(pair.v));
    if (admissible) {
      row.div_bound = analytic_div_l2(spec.u_macro, grid);
      row.curl_bound = analytic_curl_l2(spec.v_macro, grid);
    }
    return row;
  };

  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const GridPtr grid = build_grid(schedule.grid_for(i, base, spec.eta));
    const int m = schedule.inverse_eps(i);
    table.admissible.push_back(run_row(make_oscillatory_pair(spec, grid, m), grid, true));
    table.violation.push_back(run_row(make_violation_pair(spec, grid, m), grid, false));
  }
  return table;
}

void validate_laminate(const LaminateSpec& spec, int d, int n_co) {
  require_eta(spec.eta, d, "laminate");
  if (static_cast<int>(spec.h_amplitudes.size()) > n_co) {
    throw ConfigError("laminate: more h amplitudes than normal directions");
  }
  if (!spec.kappa_m.empty()) {
    if (static_cast<int>(spec.kappa_m.size()) != n_co * n_co) {
      throw ConfigError("laminate: kappa amplitude m must be n_co x n_co");
    }
    for (int a = 0; a < n_co; ++a) {
      for (int b = 0; b < n_co; ++b) {
        if (spec.kappa_m[a * n_co + b] != -spec.kappa_m[b * n_co + a]) {
          throw ConfigError("laminate: kappa amplitude m must be antisymmetric");
        }
      }
    }
  }
  if (spec.violation_c) {
    const auto& c = *spec.violation_c;
    if (static_cast<int>(c.size()) != d * d) throw ConfigError("laminate: violation c must be d x d");
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        if (c[i * d + j] != c[j * d + i]) throw ConfigError("laminate: violation c must be symmetric");
      }
    }
  }
}

ImmersionFields make_framework_sequence(const ImmersionFields& base, const LaminateSpec& spec, int m) {
  const int d = base.dimension();
  const int n_co = base.codimension();
  validate_laminate(spec, d, n_co);
  const Grid& grid = base.grid();
  ImmersionFields out = base;
  std::vector<double> amp(static_cast<std::size_t>(d * d));
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      amp[i * d + j] = spec.violation_c ? (*spec.violation_c)[i * d + j]
                                        : static_cast<double>(spec.eta[i] * spec.eta[j]);
    }
  }
  for (std::size_t node = 0; node < grid.num_nodes(); ++node) {
    const double s = oscillation_phase(grid, node, spec.eta, m);
    const double bh = profile_value(spec.h_profile, s);
    const double ck = profile_value(spec.kappa_profile, s);
    for (int a = 0; a < static_cast<int>(spec.h_amplitudes.size()); ++a) {
      if (spec.h_amplitudes[a] == 0.0) continue;
      for (int i = 0; i < d; ++i) {
        for (int j = i; j < d; ++j) {
          const double add = spec.h_amplitudes[a] * amp[i * d + j] * bh;
          if (add != 0.0) out.h.assign(node, {a, i, j}, out.h.at(node, {a, i, j}) + add);
        }
      }
    }
    if (spec.kappa_m.empty()) continue;
    for (int a = 0; a < n_co; ++a) {
      for (int b = a + 1; b < n_co; ++b) {
        const double mab = spec.kappa_m[a * n_co + b];
        if (mab == 0.0) continue;
        for (int l = 0; l < d; ++l) {
          if (spec.eta[l] == 0) continue;
          out.kappa.assign(node, {a, l, b}, out.kappa.at(node, {a, l, b}) + spec.eta[l] * mab * ck);
        }
      }
    }
  }
  return out;
}

double immersion_l2_norm(const ImmersionFields& f, const ScalarField& density) {
  const double cell = f.grid().cell_volume();
  double s = 0.0;
  for (const TensorField* t : {&f.h, &f.kappa}) {
    for (int slot = 0; slot < t->layout().num_slots(); ++slot) {
      const double mult = t->layout().multiplicity(slot);
      const auto v = t->slot(slot);
      for (std::size_t node = 0; node < v.size(); ++node) {
        s += mult * density[node] * cell * v[node] * v[node];
      }
    }
  }
  return std::sqrt(s);
}

namespace {

std::vector<double> full_square_sums(const TensorField& t) {
  std::vector<double> sums(t.num_nodes(), 0.0);
  for (int slot = 0; slot < t.layout().num_slots(); ++slot) {
    const double mult = t.layout().multiplicity(slot);
    const auto v = t.slot(slot);
    for (std::size_t node = 0; node < v.size(); ++node) sums[node] += mult * v[node] * v[node];
  }
  return sums;
}

}  // namespace

double immersion_lp_norm(const ImmersionFields& f, const ScalarField& density, double p) {
  const auto sh = full_square_sums(f.h);
  const auto sk = full_square_sums(f.kappa);
  const double cell = f.grid().cell_volume();
  double s = 0.0;
  for (std::size_t node = 0; node < sh.size(); ++node) {
    s += density[node] * cell * (std::pow(sh[node], p / 2.0) + std::pow(sk[node], p / 2.0));
  }
  return std::pow(s, 1.0 / p);
}

namespace {

/// max over tuples of |<Q(f) - Q(lim), phi>| for the four quadratic families.
std::vector<std::array<double, 4>> quadratic_gaps(const ImmersionFields& f,
                                                  const ImmersionFields& lim,
                                                  const std::vector<ScalarField>& phis) {
  const int d = f.dimension();
  const int n_co = f.codimension();
  const std::size_t nphi = phis.size();
  std::vector<std::array<int, 6>> tuples[4];
  for (int k = 0; k < d; ++k) {
    for (int l = k + 1; l < d; ++l) {
      for (int a = 0; a < n_co; ++a) {
        for (int b = 0; b < n_co; ++b) {
          for (int i = 0; i < d; ++i) {
            for (int j = 0; j < d; ++j) tuples[0].push_back({a, b, i, j, k, l});
            tuples[2].push_back({a, b, i, k, l, 0});
          }
          for (int c = 0; c < n_co; ++c) tuples[1].push_back({a, b, c, k, l, 0});
        }
      }
    }
  }
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      for (int k = j + 1; k < d; ++k) {
        for (int l = 0; l < d; ++l) tuples[3].push_back({i, j, k, l, 0, 0});
      }
    }
  }
  std::vector<double> acc[4];
  for (int q = 0; q < 4; ++q) acc[q].assign(tuples[q].size() * nphi, 0.0);

  LocalImmersion e, z;
  auto quad = [&](const LocalImmersion& L, int q, const std::array<int, 6>& t) {
    auto h = [&](int a, int i, int j) { return L.h[(a * d + i) * d + j]; };
    auto kap = [&](int a, int l, int b) { return L.kappa[(a * d + l) * n_co + b]; };
    switch (q) {
      case 0: {
        const auto [a, b, i, j, k, l] = t;
        return h(a, l, j) * h(b, k, i) - h(a, k, j) * h(b, l, i);
      }
      case 1: {
        const int a = t[0], b = t[1], c = t[2], k = t[3], l = t[4];
        return kap(a, k, b) * kap(b, l, c) - kap(a, l, b) * kap(b, k, c);
      }
      case 2: {
        const int a = t[0], b = t[1], i = t[2], k = t[3], l = t[4];
        return kap(a, k, b) * h(b, l, i) - kap(a, l, b) * h(b, k, i);
      }
      default: {
        const int i = t[0], j = t[1], k = t[2], l = t[3];
        double s = 0.0;
        for (int a = 0; a < n_co; ++a) s += h(a, j, i) * h(a, k, l) - h(a, k, i) * h(a, j, l);
        return s;
      }
    }
  };
  for (std::size_t node = 0; node < f.grid().num_nodes(); ++node) {
    e.load(f, node);
    z.load(lim, node);
    for (int q = 0; q < 4; ++q) {
      for (std::size_t t = 0; t < tuples[q].size(); ++t) {
        const double diff = quad(e, q, tuples[q][t]) - quad(z, q, tuples[q][t]);
        if (diff == 0.0) continue;
        for (std::size_t p = 0; p < nphi; ++p) acc[q][t * nphi + p] += diff * phis[p][node];
      }
    }
  }
  const double cell = f.grid().cell_volume();
  std::vector<std::array<double, 4>> out(nphi, {0.0, 0.0, 0.0, 0.0});
  for (int q = 0; q < 4; ++q) {
    for (std::size_t t = 0; t < tuples[q].size(); ++t) {
      for (std::size_t p = 0; p < nphi; ++p) {
        out[p][q] = std::max(out[p][q], std::abs(acc[q][t * nphi + p] * cell));
      }
    }
  }
  return out;
}

double max_tensor_pairing(const TensorField& t, const ScalarField& phi) {
  double m = 0.0;
  const double cell = t.grid().cell_volume();
  for (int s = 0; s < t.layout().num_slots(); ++s) {
    const auto v = t.slot(s);
    double acc = 0.0;
    for (std::size_t node = 0; node < v.size(); ++node) acc += v[node] * phi[node];
    m = std::max(m, std::abs(acc * cell));
  }
  return m;
}

/// L2 norms of d_k X_l.. - d_l X_k.. over k < l for h (X = h^a_.j) and kappa (X = kappa^a_.b, a < b).
std::pair<double, double> compactness_surrogate(const ImmersionFields& f, const ScalarField& density) {
  const int d = f.dimension();
  const int n_co = f.codimension();
  std::vector<TensorField> dh, dk;
  for (int axis = 0; axis < d; ++axis) {
    dh.push_back(partial_derivative(f.h, axis));
    dk.push_back(partial_derivative(f.kappa, axis));
  }
  const double cell = f.grid().cell_volume();
  double sh = 0.0, sk = 0.0;
  for (std::size_t node = 0; node < f.grid().num_nodes(); ++node) {
    const double w = density[node] * cell;
    for (int k = 0; k < d; ++k) {
      for (int l = k + 1; l < d; ++l) {
        for (int a = 0; a < n_co; ++a) {
          for (int j = 0; j < d; ++j) {
            const double v = dh[k].at(node, {a, l, j}) - dh[l].at(node, {a, k, j});
            sh += w * v * v;
          }
          for (int b = a + 1; b < n_co; ++b) {
            const double v = dk[k].at(node, {a, l, b}) - dk[l].at(node, {a, k, b});
            sk += w * v * v;
          }
        }
      }
    }
  }
  return {std::sqrt(sh), std::sqrt(sk)};
}

}  // namespace

FrameworkReport framework_experiment(const FrameworkSpec& spec, const EpsSchedule& schedule,
                                     const GridSpec& base, const std::vector<TestFunction>& phis) {
  if (!(spec.p > 2.0)) throw ConfigError("framework experiment requires p > 2");
  schedule.validate(base, spec.laminate.eta);
  FrameworkReport report;
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const int m = schedule.inverse_eps(i);
    const GridPtr grid = build_grid(schedule.grid_for(i, base, spec.laminate.eta));
    const EmbeddingScene scene = catalog_embedding(spec.base, spec.base_params, grid);
    const GeometryBundle geom = build_geometry(scene.metric, grid);
    const ImmersionFields fields = make_framework_sequence(scene.fields, spec.laminate, m);

    FrameworkRow row;
    row.m = m;
    row.eps = 1.0 / m;
    row.resolution = grid->spec().resolution;
    row.l2_norm = immersion_l2_norm(fields, geom.volume_density);
    row.lp_norm = immersion_lp_norm(fields, geom.volume_density, spec.p);

    ImmersionFields defect = fields;
    for (std::size_t k = 0; k < defect.h.data().size(); ++k) defect.h.data()[k] -= scene.fields.h.data()[k];
    for (std::size_t k = 0; k < defect.kappa.data().size(); ++k) {
      defect.kappa.data()[k] -= scene.fields.kappa.data()[k];
    }
    row.strong_defect = immersion_l2_norm(defect, geom.volume_density);

    double weight = 0.0;
    for (double v : geom.volume_density.values()) weight += v * grid->cell_volume();
    const int d = grid->dimension();
    const int n_co = fields.codimension();
    double amp_h = 0.0;
    for (int a = 0; a < static_cast<int>(spec.laminate.h_amplitudes.size()); ++a) {
      double frob = 0.0;
      for (int ii = 0; ii < d; ++ii) {
        for (int jj = 0; jj < d; ++jj) {
          const double c = spec.laminate.violation_c
                               ? (*spec.laminate.violation_c)[ii * d + jj]
                               : static_cast<double>(spec.laminate.eta[ii] * spec.laminate.eta[jj]);
          frob += c * c;
        }
      }
      amp_h += spec.laminate.h_amplitudes[a] * spec.laminate.h_amplitudes[a] * frob;
    }
    double eta2 = 0.0;
    for (int e : spec.laminate.eta) eta2 += e * e;
    double m2 = 0.0;
    for (double v : spec.laminate.kappa_m) m2 += v * v;
    row.amplitude_reference = std::sqrt(weight * (profile_mean_square(spec.laminate.h_profile) * amp_h +
                                                  profile_mean_square(spec.laminate.kappa_profile) *
                                                      eta2 * m2));

    std::tie(row.a2_h, row.a2_kappa) = compactness_surrogate(fields, geom.volume_density);

    const ResidualReport res = evaluate_residuals(fields, geom);
    const ResidualNorms norms = residual_norms(res);
    row.o_l2 = {norms.codazzi.l2, norms.ricci.l2, norms.gauss.l2};

    std::vector<ScalarField> phi_fields;
    for (const auto& phi : phis) phi_fields.push_back(phi.sample(grid));
    for (const auto& phi : phi_fields) {
      row.o_pairing.push_back({max_tensor_pairing(res.codazzi, phi), max_tensor_pairing(res.ricci, phi),
                               max_tensor_pairing(res.gauss, phi)});
      row.weak_defect.push_back(
          std::max(max_tensor_pairing(defect.h, phi), max_tensor_pairing(defect.kappa, phi)));
    }
    row.quadratic_gap = quadratic_gaps(fields, scene.fields, phi_fields);
    (void)n_co;
    report.l2_bound = std::max(report.l2_bound, row.l2_norm);
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace gcr
