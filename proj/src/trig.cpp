#include "gcrlab/trig.hpp"

#include <cmath>
#include <cstdlib>

namespace gcr {
namespace {

double phase(const TrigTerm& t, std::span<const double> x) {
  double s = 0.0;
  for (std::size_t i = 0; i < t.wave.size() && i < x.size(); ++i) s += t.wave[i] * x[i];
  return s;
}

}  // namespace

double TrigPolynomial::operator()(std::span<const double> x) const {
  double v = constant;
  for (const auto& t : terms) {
    const double s = phase(t, x);
    v += t.coef * (t.kind == TrigTerm::Kind::Sin ? std::sin(s) : std::cos(s));
  }
  return v;
}

double TrigPolynomial::derivative(std::span<const double> x, int axis) const {
  double v = 0.0;
  for (const auto& t : terms) {
    if (axis >= static_cast<int>(t.wave.size()) || t.wave[axis] == 0) continue;
    const double s = phase(t, x);
    const double k = t.wave[axis];
    v += t.kind == TrigTerm::Kind::Sin ? t.coef * k * std::cos(s) : -t.coef * k * std::sin(s);
  }
  return v;
}

double TrigPolynomial::bound() const {
  double b = std::abs(constant);
  for (const auto& t : terms) b += std::abs(t.coef);
  return b;
}

int TrigPolynomial::max_frequency(int axis) const {
  int m = 0;
  for (const auto& t : terms) {
    if (axis < static_cast<int>(t.wave.size())) m = std::max(m, std::abs(t.wave[axis]));
  }
  return m;
}

bool TrigPolynomial::is_constant() const {
  for (const auto& t : terms) {
    if (t.coef == 0.0) continue;
    for (int k : t.wave) {
      if (k != 0) return false;
    }
  }
  return true;
}

}  // namespace gcr
