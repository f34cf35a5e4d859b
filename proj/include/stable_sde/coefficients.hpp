#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "coeff_lang.hpp"
#include "error.hpp"
#include "exponents.hpp"
#include "numeric.hpp"

namespace stable_sde {

struct HolderDeclaration {
  double index = 1.0;
  double constant = 1.0;
};

/// Coefficients of dX = b(X) dt + sigma(X-) dZ together with the derived
/// gamma = sign(sigma) |sigma|^alpha and the regularity the caller claims.
/// Claims are checked where that is cheap (growth) and otherwise only read by
/// the experiment layer to decide whether a theorem applies.
struct CoefficientSet {
  Evaluator sigma;
  Evaluator b;
  Evaluator gamma;
  /// |sigma(x)| + |b(x)| <= declared_growth (1 + |x|); 0 disables the check.
  double declared_growth = 0.0;
  /// Monotonicity of sigma when alpha > 1, of gamma when alpha < 1.
  MonotoneClass declared_monotone = MonotoneClass::None;
  MonotoneClass declared_b_monotone = MonotoneClass::None;
  bool declared_b_constant = false;
  std::optional<HolderDeclaration> declared_holder;
  /// Human-readable description used in reports.
  std::string label;

  void check_growth(double x, double sigma_x, double b_x) const {
    if (declared_growth <= 0.0) return;
    if (std::abs(sigma_x) + std::abs(b_x) > declared_growth * (1.0 + std::abs(x)) * (1.0 + 1e-12))
      fail(ErrorKind::GrowthViolation, "|sigma(x)|+|b(x)| exceeds the declared growth bound at x=" + format_double(x));
  }
};

/// sigma recovered from gamma: sign(gamma) |gamma|^{1/alpha}.
inline double sigma_from_gamma(double gamma, double alpha) {
  if (gamma == 0.0) return 0.0;
  return sign_of(gamma) * std::pow(std::abs(gamma), 1.0 / alpha);
}

/// Coefficients given by sigma and b; gamma is derived.
inline CoefficientSet make_coefficients(Evaluator sigma, Evaluator b, double alpha) {
  CoefficientSet c;
  c.gamma = derive_gamma(sigma, alpha);
  c.sigma = std::move(sigma);
  c.b = std::move(b);
  return c;
}

/// Coefficients given by gamma and b, for finite-variation scenarios that
/// specify gamma directly; sigma is recovered from it.
inline CoefficientSet make_coefficients_from_gamma(Evaluator gamma, Evaluator b, double alpha) {
  if (!(alpha > 0.0 && alpha < 2.0) || alpha == 1.0)
    fail(ErrorKind::AlphaOutOfRange, "alpha must lie in (0,2) minus {1}");
  CoefficientSet c;
  c.sigma = [gamma, alpha](double x) { return sigma_from_gamma(gamma(x), alpha); };
  c.gamma = std::move(gamma);
  c.b = std::move(b);
  return c;
}

inline Evaluator constant_fn(double v) {
  return [v](double) { return v; };
}

}  // namespace stable_sde
