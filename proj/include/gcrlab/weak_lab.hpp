#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "gcrlab/catalog.hpp"
#include "gcrlab/divcurl.hpp"
#include "gcrlab/geometry.hpp"
#include "gcrlab/trig.hpp"

namespace gcr {

/// Mean-zero oscillation profile.
enum class Profile { Sin, Cos };

double profile_value(Profile p, double s);
std::string profile_name(Profile p);
/// Mean of the squared profile over one period.
inline double profile_mean_square(Profile) { return 0.5; }

/// Smooth periodic test function given as a trigonometric polynomial.
struct TestFunction {
  std::string label;
  TrigPolynomial poly;

  static TestFunction constant(double c = 1.0) { return {"1", TrigPolynomial::constant_value(c)}; }
  double bound() const { return poly.bound(); }
  ScalarField sample(const GridPtr& grid) const;
};

/// Quadrature sum_nodes f * phi * cell volume (the trapezoidal rule on a periodic grid).
double weak_pairing(const ScalarField& f, const ScalarField& phi);
double weak_pairing(const ScalarField& f, const TestFunction& phi);

/// eps_i = 1 / m_i with strictly increasing integers m_i.
///
/// Axis i with eta_i != 0 must have 2*pi-multiple length and a base
/// resolution divisible by m. Each eps refines such axes by the smallest
/// integer multiplier giving at least 8 nodes per oscillation period.
class EpsSchedule {
 public:
  static constexpr int kNodesPerPeriod = 8;

  explicit EpsSchedule(std::vector<int> inverse_eps);

  std::size_t size() const noexcept { return inverse_eps_.size(); }
  int inverse_eps(std::size_t i) const { return inverse_eps_.at(i); }
  double eps(std::size_t i) const { return 1.0 / inverse_eps_.at(i); }
  const std::vector<int>& values() const noexcept { return inverse_eps_; }

  /// Throws ConfigError("oscillation period does not divide grid ...") and
  /// similar messages for incompatible base grids.
  void validate(const GridSpec& base, std::span<const int> eta) const;
  int multiplier(std::size_t i, const GridSpec& base, std::span<const int> eta, int axis) const;
  GridSpec grid_for(std::size_t i, const GridSpec& base, std::span<const int> eta) const;

 private:
  std::vector<int> inverse_eps_;
};

/// u^eps = U + B(m x.eta) w, v^eps = V + C(m x.eta) v_amp eta, with w . eta = 0.
struct PairSpec {
  std::vector<int> eta;
  std::vector<double> w;
  Profile b = Profile::Sin;
  Profile c = Profile::Sin;
  double v_amplitude = 1.0;
  std::vector<TrigPolynomial> u_macro;  ///< empty means U = 0
  std::vector<TrigPolynomial> v_macro;  ///< empty means V = 0
};

void validate_pair_spec(const PairSpec& spec, int dimension);

struct OscillatoryPair {
  int m = 1;
  StructuredVectorField u;
  StructuredVectorField v;
  StructuredVectorField u_limit;  ///< U
  StructuredVectorField v_limit;  ///< V
};

OscillatoryPair make_oscillatory_pair(const PairSpec& spec, const GridPtr& grid, int m);

/// u^eps = v^eps = B(m x.eta) eta: div u and curl v are both unbounded.
OscillatoryPair make_violation_pair(const PairSpec& spec, const GridPtr& grid, int m);

struct DivCurlRow {
  int m = 1;
  double eps = 1.0;
  std::vector<int> resolution;
  std::vector<double> gaps;  ///< |<u.v, phi> - <U.V, phi>| per test function
  double div_u_l2 = 0.0;
  double curl_v_l2 = 0.0;
  double div_bound = 0.0;   ///< analytic ||div U||
  double curl_bound = 0.0;  ///< analytic ||curl V||
};

struct DivCurlTable {
  std::vector<DivCurlRow> admissible;
  std::vector<DivCurlRow> violation;
  std::vector<double> violation_limit;  ///< mean(B^2) |eta|^2 <1, phi> per test function
};

DivCurlTable divcurl_experiment(const PairSpec& spec, const EpsSchedule& schedule,
                                const GridSpec& base, const std::vector<TestFunction>& phis);

/// Rank-one laminate perturbation of a base solution:
///   h^a_ij += amp_a eta_i eta_j B(m x.eta),  kappa^a_lb += eta_l m_ab C(m x.eta).
/// With `violation_c` the h amplitude eta_i eta_j is replaced by c_ij.
struct LaminateSpec {
  std::vector<int> eta;
  std::vector<double> h_amplitudes;  ///< per normal index; missing entries are 0
  Profile h_profile = Profile::Sin;
  std::vector<double> kappa_m;  ///< n_co x n_co antisymmetric, row-major; empty = 0
  Profile kappa_profile = Profile::Cos;
  std::optional<std::vector<double>> violation_c;  ///< d x d symmetric, row-major
};

void validate_laminate(const LaminateSpec& spec, int dimension, int codimension);

/// Base fields plus the laminate at eps = 1/m. Symmetries hold exactly.
ImmersionFields make_framework_sequence(const ImmersionFields& base, const LaminateSpec& spec, int m);

struct FrameworkSpec {
  std::string base = "flat-zero";
  CatalogParams base_params;
  LaminateSpec laminate;
  double p = 4.0;
};

struct FrameworkRow {
  int m = 1;
  double eps = 1.0;
  std::vector<int> resolution;
  double l2_norm = 0.0;              ///< ||(h, kappa)||_L2, sqrt|g|-weighted
  double lp_norm = 0.0;
  double strong_defect = 0.0;        ///< ||(h, kappa) - base||_L2
  double amplitude_reference = 0.0;  ///< analytic L2 norm of the perturbation
  double a2_h = 0.0;                 ///< ||d_k h_lj - d_l h_kj||_L2
  double a2_kappa = 0.0;             ///< ||d_k kappa_lb - d_l kappa_kb||_L2
  std::array<double, 3> o_l2{};      ///< codazzi, ricci, gauss residual L2 norms
  // Per test function, maxima over index tuples:
  std::vector<std::array<double, 3>> o_pairing;      ///< |<o_j, phi>|
  std::vector<double> weak_defect;                   ///< |<(h, kappa) - base, phi>|
  std::vector<std::array<double, 4>> quadratic_gap;  ///< codazzi-codazzi, ricci-ricci, ricci-codazzi, gauss
};

struct FrameworkReport {
  std::vector<FrameworkRow> rows;
  double l2_bound = 0.0;  ///< max over eps of l2_norm
};

inline constexpr std::array<const char*, 4> kQuadraticNames = {"codazzi-codazzi", "ricci-ricci",
                                                               "ricci-codazzi", "gauss"};

FrameworkReport framework_experiment(const FrameworkSpec& spec, const EpsSchedule& schedule,
                                     const GridSpec& base, const std::vector<TestFunction>& phis);

/// sqrt|g|-weighted L2 and L^p norms with full index contractions.
double immersion_l2_norm(const ImmersionFields& f, const ScalarField& density);
double immersion_lp_norm(const ImmersionFields& f, const ScalarField& density, double p);

}  // namespace gcr
