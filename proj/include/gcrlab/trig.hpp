#pragma once

#include <span>
#include <vector>

namespace gcr {

/// coef * sin(k.x) or coef * cos(k.x) with an integer wave vector k.
struct TrigTerm {
  enum class Kind { Sin, Cos };
  double coef = 0.0;
  Kind kind = Kind::Sin;
  std::vector<int> wave;
};

/// Finite trigonometric polynomial c0 + sum_t coef_t * trig(k_t . x).
struct TrigPolynomial {
  double constant = 0.0;
  std::vector<TrigTerm> terms;

  static TrigPolynomial constant_value(double c) { return {c, {}}; }

  double operator()(std::span<const double> x) const;
  /// Analytic partial derivative along a 0-based axis.
  double derivative(std::span<const double> x, int axis) const;
  /// |c0| + sum |coef|, an upper bound of |p| everywhere.
  double bound() const;
  /// Largest |k_axis| over all terms.
  int max_frequency(int axis) const;
  bool is_constant() const;
};

}  // namespace gcr
