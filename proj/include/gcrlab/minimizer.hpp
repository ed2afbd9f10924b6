#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gcrlab/errors.hpp"
#include "gcrlab/geometry.hpp"
#include "gcrlab/immersion.hpp"
#include "gcrlab/residuals.hpp"

namespace gcr {

struct MinimizeConfig {
  double p = 4.0;
  double mu0 = 1.0;
  double mu_growth = 10.0;
  int outer_iterations = 6;
  double grad_tol = 1e-12;
  int max_inner_steps = 2000;
  double initial_step = 1e-2;
  double shrink = 0.5;
  double armijo = 1e-4;
  double step_growth = 2.0;
  double tol_r = 1e-6;
  double objective_rel_tol = 1e-6;
  std::uint64_t seed = 0;
};

/// Throws ConfigError naming the first bad field.
void validate_config(const MinimizeConfig& config);

struct OuterRecord {
  int outer = 0;
  double mu = 0.0;
  double objective = 0.0;
  double penalty = 0.0;
  double merit = 0.0;
  double residual_l2 = 0.0;
  double grad_norm = 0.0;
  int inner_steps = 0;
  std::string stop;  ///< why the inner loop ended
};

struct InnerRecord {
  int outer = 0;
  int step = 0;
  double mu = 0.0;
  double objective = 0.0;
  double penalty = 0.0;
  double merit = 0.0;
  double step_size = 0.0;
  double grad_norm = 0.0;
};

struct MinimizeResult {
  ImmersionFields fields;
  double objective = 0.0;
  double penalty = 0.0;
  ResidualNorms residuals;
  std::vector<OuterRecord> history;
  std::vector<InnerRecord> trace;
  std::string termination;
};

/// Raised when an inner loop ends above where it started or hits a
/// non-finite value. Carries everything recorded so far.
class MinimizeDivergence : public NumericalError {
 public:
  MinimizeDivergence(const std::string& what, std::vector<OuterRecord> history,
                     std::vector<InnerRecord> trace)
      : NumericalError(what), history(std::move(history)), trace(std::move(trace)) {}
  std::vector<OuterRecord> history;
  std::vector<InnerRecord> trace;
};

/// integral of sqrt|g| ((h.h)^{p/2} + (kappa.kappa)^{p/2}), full contractions.
double objective(const ImmersionFields& fields, const GeometryBundle& geom, double p);

/// Sum of the squared weighted L2 norms of the Gauss, Codazzi and Ricci residuals.
double constraint_penalty(const ImmersionFields& fields, const GeometryBundle& geom);

/// Gradient of objective + mu * penalty with respect to the stored components.
ImmersionFields gradient(const ImmersionFields& fields, const GeometryBundle& geom, double p,
                         double mu);

/// Penalty continuation with Armijo gradient descent, starting from `initial`.
MinimizeResult minimize(const GeometryBundle& geom, ImmersionFields initial,
                        const MinimizeConfig& config);

}  // namespace gcr
