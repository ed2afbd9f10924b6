#include "gcrlab/minimizer.hpp"

#include <cmath>
#include <sstream>

#include "gcrlab/parallel.hpp"

namespace gcr {
namespace {

void require_p(double p) {
  if (!(p > 2.0)) {
    std::ostringstream msg;
    msg << "exponent p must satisfy p > 2 (got " << p << ")";
    throw ConfigError(msg.str());
  }
}

double squared_weighted(const TensorField& r, const ScalarField& density) {
  const double cell = r.grid().cell_volume();
  double s = 0.0;
  for (int slot = 0; slot < r.layout().num_slots(); ++slot) {
    const auto v = r.slot(slot);
    for (std::size_t node = 0; node < v.size(); ++node) s += density[node] * cell * v[node] * v[node];
  }
  return s;
}

// per-node sums of squares over every full index tuple
std::vector<double> full_squares(const TensorField& t) {
  std::vector<double> out(t.num_nodes(), 0.0);
  for (int slot = 0; slot < t.layout().num_slots(); ++slot) {
    const double mult = t.layout().multiplicity(slot);
    const auto v = t.slot(slot);
    for (std::size_t node = 0; node < v.size(); ++node) out[node] += mult * v[node] * v[node];
  }
  return out;
}

struct Merit {
  double objective = 0.0;
  double penalty = 0.0;
  double value(double mu) const { return objective + mu * penalty; }
};

Merit evaluate(const ImmersionFields& f, const GeometryBundle& geom, double p) {
  return {objective(f, geom, p), constraint_penalty(f, geom)};
}

double dot_params(const ImmersionFields& a, const ImmersionFields& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.h.data().size(); ++k) s += a.h.data()[k] * b.h.data()[k];
  for (std::size_t k = 0; k < a.kappa.data().size(); ++k) s += a.kappa.data()[k] * b.kappa.data()[k];
  return s;
}

ImmersionFields step_along(const ImmersionFields& x, const ImmersionFields& g, double t) {
  ImmersionFields out = x;
  for (std::size_t k = 0; k < out.h.data().size(); ++k) out.h.data()[k] -= t * g.h.data()[k];
  for (std::size_t k = 0; k < out.kappa.data().size(); ++k) {
    out.kappa.data()[k] -= t * g.kappa.data()[k];
  }
  return out;
}

// Adds the stored-component fold of a full-tuple gradient into `out`.
void fold(const std::vector<double>& full, std::size_t nodes, TensorField& out) {
  const IndexLayout& lay = out.layout();
  for (std::size_t t = 0; t < lay.full_size(); ++t) {
    const int s = lay.slot_of(t);
    if (s < 0) continue;
    const double sign = lay.sign_of(t);
    auto dst = out.slot(s);
    const double* src = full.data() + t * nodes;
    for (std::size_t node = 0; node < nodes; ++node) dst[node] += sign * src[node];
  }
}

}  // namespace

void validate_config(const MinimizeConfig& c) {
  require_p(c.p);
  if (!(c.mu0 > 0.0)) throw ConfigError("minimize: mu0 must be positive");
  if (!(c.mu_growth > 1.0)) throw ConfigError("minimize: penalty growth factor must exceed 1");
  if (c.outer_iterations < 1) throw ConfigError("minimize: outer iterations must be at least 1");
  if (c.max_inner_steps < 1) throw ConfigError("minimize: max inner steps must be at least 1");
  if (!(c.grad_tol > 0.0) || !(c.tol_r > 0.0) || !(c.objective_rel_tol > 0.0)) {
    throw ConfigError("minimize: tolerances must be positive");
  }
  if (!(c.initial_step > 0.0)) throw ConfigError("minimize: initial step must be positive");
  if (!(c.shrink > 0.0 && c.shrink < 1.0)) throw ConfigError("minimize: shrink factor must lie in (0, 1)");
  if (!(c.armijo > 0.0 && c.armijo < 1.0)) throw ConfigError("minimize: armijo constant must lie in (0, 1)");
  if (!(c.step_growth >= 1.0)) throw ConfigError("minimize: step growth must be at least 1");
}

double objective(const ImmersionFields& f, const GeometryBundle& geom, double p) {
  require_p(p);
  require_immersion_shape(f, geom.grid(), "objective");
  const auto sh = full_squares(f.h);
  const auto sk = full_squares(f.kappa);
  const double cell = f.grid().cell_volume();
  double s = 0.0;
  for (std::size_t node = 0; node < sh.size(); ++node) {
    s += geom.volume_density[node] * cell * (std::pow(sh[node], p / 2.0) + std::pow(sk[node], p / 2.0));
  }
  return s;
}

double constraint_penalty(const ImmersionFields& f, const GeometryBundle& geom) {
  const ResidualReport r = evaluate_residuals(f, geom);
  return squared_weighted(r.gauss, r.volume_density) + squared_weighted(r.codazzi, r.volume_density) +
         squared_weighted(r.ricci, r.volume_density);
}

ImmersionFields gradient(const ImmersionFields& f, const GeometryBundle& geom, double p, double mu) {
  require_p(p);
  require_immersion_shape(f, geom.grid(), "gradient");
  const Grid& grid = f.grid();
  const int d = f.dimension();
  const int n_co = f.codimension();
  const std::size_t nodes = grid.num_nodes();
  const std::size_t hsize = f.h.layout().full_size();
  const std::size_t ksize = f.kappa.layout().full_size();
  const double cell = grid.cell_volume();

  const ResidualReport res = evaluate_residuals(f, geom);
  const auto sh = full_squares(f.h);
  const auto sk = full_squares(f.kappa);

  // gh/gk: gradient per full tuple; dh/dk: coefficients multiplying d_axis of a full tuple
  std::vector<double> gh(hsize * nodes, 0.0), gk(ksize * nodes, 0.0);
  std::vector<std::vector<double>> dh(d, std::vector<double>(hsize * nodes, 0.0));
  std::vector<std::vector<double>> dk(d, std::vector<double>(ksize * nodes, 0.0));

  const IndexLayout& glay = res.gauss.layout();
  const IndexLayout& clay = res.codazzi.layout();
  const IndexLayout& rlay = res.ricci.layout();

  parallel_for(nodes, [&](std::size_t node) {
    LocalImmersion loc;
    loc.load(f, node);
    std::vector<double> gam(geom.christoffel.layout().full_size());
    geom.christoffel.unpack(node, gam);
    std::vector<double> ginv(static_cast<std::size_t>(d) * d);
    geom.inverse.unpack(node, ginv);
    const double w = geom.volume_density[node] * cell;

    auto hix = [&](int a, int i, int j) { return static_cast<std::size_t>((a * d + i) * d + j); };
    auto kix = [&](int a, int l, int b) { return static_cast<std::size_t>((a * d + l) * n_co + b); };
    auto h = [&](int a, int i, int j) { return loc.h[hix(a, i, j)]; };
    auto kap = [&](int a, int l, int b) { return loc.kappa[kix(a, l, b)]; };
    auto GH = [&](std::size_t t) -> double& { return gh[t * nodes + node]; };
    auto GK = [&](std::size_t t) -> double& { return gk[t * nodes + node]; };
    auto christ = [&](int m, int i, int j) { return gam[(m * d + i) * d + j]; };

    // objective
    const double ch = sh[node] > 0.0 ? w * p * std::pow(sh[node], p / 2.0 - 1.0) : 0.0;
    const double ck = sk[node] > 0.0 ? w * p * std::pow(sk[node], p / 2.0 - 1.0) : 0.0;
    for (std::size_t t = 0; t < hsize; ++t) GH(t) += ch * loc.h[t];
    for (std::size_t t = 0; t < ksize; ++t) GK(t) += ck * loc.kappa[t];

    // Gauss
    for (int s = 0; s < glay.num_slots(); ++s) {
      const double c = 2.0 * mu * w * res.gauss.slot(s)[node];
      if (c == 0.0) continue;
      const auto idx = glay.slot_index(s);
      const int i = idx[0], j = idx[1], k = idx[2], l = idx[3];
      for (int a = 0; a < n_co; ++a) {
        GH(hix(a, j, i)) += c * h(a, k, l);
        GH(hix(a, k, l)) += c * h(a, j, i);
        GH(hix(a, k, i)) -= c * h(a, j, l);
        GH(hix(a, j, l)) -= c * h(a, k, i);
      }
    }
    // Codazzi
    for (int s = 0; s < clay.num_slots(); ++s) {
      const double c = 2.0 * mu * w * res.codazzi.slot(s)[node];
      if (c == 0.0) continue;
      const auto idx = clay.slot_index(s);
      const int a = idx[0], j = idx[1], k = idx[2], l = idx[3];
      dh[k][hix(a, l, j) * nodes + node] += c;
      dh[l][hix(a, k, j) * nodes + node] -= c;
      for (int m = 0; m < d; ++m) {
        GH(hix(a, k, m)) += c * christ(m, l, j);
        GH(hix(a, l, m)) -= c * christ(m, k, j);
      }
      for (int b = 0; b < n_co; ++b) {
        GK(kix(a, k, b)) += c * h(b, l, j);
        GH(hix(b, l, j)) += c * kap(a, k, b);
        GK(kix(a, l, b)) -= c * h(b, k, j);
        GH(hix(b, k, j)) -= c * kap(a, l, b);
      }
    }
    // Ricci
    for (int s = 0; s < rlay.num_slots(); ++s) {
      const double c = 2.0 * mu * w * res.ricci.slot(s)[node];
      if (c == 0.0) continue;
      const auto idx = rlay.slot_index(s);
      const int a = idx[0], b = idx[1], k = idx[2], l = idx[3];
      dk[k][kix(a, l, b) * nodes + node] += c;
      dk[l][kix(a, k, b) * nodes + node] -= c;
      for (int m = 0; m < d; ++m) {
        for (int n = 0; n < d; ++n) {
          const double cg = c * ginv[m * d + n];
          GH(hix(a, m, l)) -= cg * h(b, k, n);
          GH(hix(b, k, n)) -= cg * h(a, m, l);
          GH(hix(a, m, k)) += cg * h(b, l, n);
          GH(hix(b, l, n)) += cg * h(a, m, k);
        }
      }
      for (int cc = 0; cc < n_co; ++cc) {
        GK(kix(a, k, cc)) += c * kap(cc, l, b);
        GK(kix(cc, l, b)) += c * kap(a, k, cc);
        GK(kix(a, l, cc)) -= c * kap(cc, k, b);
        GK(kix(cc, k, b)) -= c * kap(a, l, cc);
      }
    }
  });

  // the periodic central difference is antisymmetric, so its adjoint is its negative
  std::vector<double> tmp(nodes);
  auto apply_adjoint = [&](std::vector<std::vector<double>>& coef, std::vector<double>& g,
                           std::size_t size) {
    for (int axis = 0; axis < d; ++axis) {
      for (std::size_t t = 0; t < size; ++t) {
        std::span<const double> src(coef[axis].data() + t * nodes, nodes);
        bool any = false;
        for (double v : src) any = any || v != 0.0;
        if (!any) continue;
        central_difference(grid, axis, src, tmp);
        for (std::size_t node = 0; node < nodes; ++node) g[t * nodes + node] -= tmp[node];
      }
    }
  };
  apply_adjoint(dh, gh, hsize);
  apply_adjoint(dk, gk, ksize);

  ImmersionFields out = ImmersionFields::zero(f.grid_ptr(), n_co);
  fold(gh, nodes, out.h);
  fold(gk, nodes, out.kappa);
  return out;
}

MinimizeResult minimize(const GeometryBundle& geom, ImmersionFields x, const MinimizeConfig& config) {
  validate_config(config);
  require_immersion_shape(x, geom.grid(), "minimize");
  MinimizeResult result;
  double mu = config.mu0;
  double step = config.initial_step;
  Merit cur = evaluate(x, geom, config.p);
  double last_objective = cur.objective;

  auto fail = [&](const std::string& why) {
    throw MinimizeDivergence(why, result.history, result.trace);
  };

  for (int outer = 0; outer < config.outer_iterations; ++outer) {
    const double start = cur.value(mu);
    if (!std::isfinite(start)) fail("non-finite merit at start of outer iteration");
    OuterRecord rec;
    rec.outer = outer + 1;
    rec.mu = mu;
    rec.stop = "max inner steps";
    double gnorm = 0.0;
    int steps = 0;
    for (; steps < config.max_inner_steps; ++steps) {
      const ImmersionFields g = gradient(x, geom, config.p, mu);
      const double g2 = dot_params(g, g);
      gnorm = std::sqrt(g2);
      if (!std::isfinite(gnorm)) fail("non-finite gradient");
      if (gnorm <= config.grad_tol) {
        rec.stop = "gradient tolerance";
        break;
      }
      const double f0 = cur.value(mu);
      bool accepted = false;
      while (step > 1e-300) {
        ImmersionFields trial = step_along(x, g, step);
        const Merit m = evaluate(trial, geom, config.p);
        if (std::isfinite(m.value(mu)) && m.value(mu) <= f0 - config.armijo * step * g2) {
          x = std::move(trial);
          cur = m;
          accepted = true;
          break;
        }
        step *= config.shrink;
      }
      if (!accepted) {
        rec.stop = "line search failed";
        break;
      }
      result.trace.push_back({outer + 1, steps + 1, mu, cur.objective, cur.penalty, cur.value(mu), step, gnorm});
      step *= config.step_growth;
      if (f0 - cur.value(mu) <= 1e-15 * std::max(1.0, f0)) {
        ++steps;
        rec.stop = "stalled";
        break;
      }
    }
    if (cur.value(mu) > start) fail("merit increased across an inner loop");

    const ResidualNorms norms = residual_norms(evaluate_residuals(x, geom));
    rec.objective = cur.objective;
    rec.penalty = cur.penalty;
    rec.merit = cur.value(mu);
    rec.residual_l2 = norms.total.l2;
    rec.grad_norm = gnorm;
    rec.inner_steps = steps;
    result.history.push_back(rec);

    const double change = std::abs(cur.objective - last_objective) / std::max(cur.objective, 1e-300);
    last_objective = cur.objective;
    if (norms.total.l2 <= config.tol_r && (change <= config.objective_rel_tol || cur.objective == 0.0)) {
      result.termination = "converged";
      break;
    }
    if (outer + 1 == config.outer_iterations) {
      result.termination = "outer iteration cap";
      break;
    }
    mu *= config.mu_growth;
  }
  result.objective = cur.objective;
  result.penalty = cur.penalty;
  result.residuals = residual_norms(evaluate_residuals(x, geom));
  result.fields = std::move(x);
  return result;
}

}  // namespace gcr
