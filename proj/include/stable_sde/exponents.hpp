#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "error.hpp"
#include "numeric.hpp"
#include "stable_measure.hpp"

namespace stable_sde {

/// Critical moment exponent beta(alpha, c) together with the regime and the
/// tail ratio it was computed for.
struct BetaExponent {
  double value = 0.0;
  Regime regime = Regime::InfiniteVariation;
  double ratio_c = 0.0;
};

namespace detail {

// Arguments that leave [-1,1] by rounding alone are pulled back so that the
// boundary ratios land exactly on the endpoints.
inline double clamped_acos_over_pi(double cos_beta) {
  if (cos_beta > 1.0 && cos_beta <= 1.0 + 1e-14) cos_beta = 1.0;
  if (cos_beta < -1.0 && cos_beta >= -1.0 - 1e-14) cos_beta = -1.0;
  return std::acos(cos_beta) / kPi;
}

}  // namespace detail

/// beta for alpha in (1,2), c = a_-/a_+ in [0,1]:
///   cos(pi beta) = (c^2(1-a^2) - (1+ca)^2) / (c^2(1-a^2) + (1+ca)^2),  a = cos(pi alpha).
inline BetaExponent beta_infinite(double alpha, double c) {
  if (!(alpha > 1.0 && alpha < 2.0)) fail(ErrorKind::DomainError, "beta_infinite needs alpha in (1,2)");
  if (!(c >= 0.0 && c <= 1.0)) fail(ErrorKind::DomainError, "beta_infinite needs c in [0,1]");
  const double a = std::cos(kPi * alpha);
  const double s = c * c * (1.0 - a * a);
  const double t = (1.0 + c * a) * (1.0 + c * a);
  const double cos_beta = (s - t) / (s + t);
  return {detail::clamped_acos_over_pi(cos_beta), Regime::InfiniteVariation, c};
}

/// beta for alpha in (1/2,1), c = a_-/a_+ in [0, -cos(pi alpha)):
///   cos(pi beta) = (1 - a^2 - (c+a)^2) / (1 - a^2 + (c+a)^2).
inline BetaExponent beta_finite(double alpha, double c) {
  if (!(alpha > 0.5 && alpha < 1.0)) fail(ErrorKind::DomainError, "beta_finite needs alpha in (1/2,1)");
  const double a = std::cos(kPi * alpha);
  if (!(c >= 0.0 && c < -a))
    fail(ErrorKind::DomainError, "beta_finite needs 0 <= c < |cos(pi alpha)| = " + format_double(-a) +
                                     ", got c=" + format_double(c));
  const double one_minus = 1.0 - a * a;
  const double sq = (c + a) * (c + a);
  const double cos_beta = (one_minus - sq) / (one_minus + sq);
  return {detail::clamped_acos_over_pi(cos_beta), Regime::FiniteVariation, c};
}

/// Magnitude of the three closed-form summands; the natural yardstick for
/// "this combination vanishes".
struct ClosedFormTerms {
  double value = 0.0;
  double scale = 0.0;
};

/// Gamma-function form of I^{alpha,beta}_{a-,a+}, 0 < beta < alpha < 1.
inline ClosedFormTerms closed_form_I_gamma(double alpha, double beta, double a_minus, double a_plus) {
  const double g1a = std::tgamma(1.0 - alpha);
  const double t1 = a_minus * std::tgamma(alpha - beta) * g1a / std::tgamma(1.0 - beta);
  const double t2 = -a_plus * std::tgamma(beta) * g1a / std::tgamma(1.0 - (alpha - beta));
  const double t3 = a_plus * std::tgamma(beta) * std::tgamma(alpha - beta) / std::tgamma(alpha);
  const double k = beta / alpha;
  return {k * (t1 + t2 + t3), k * (std::abs(t1) + std::abs(t2) + std::abs(t3))};
}

/// Sine form of the same quantity, obtained through Euler's reflection formula.
inline ClosedFormTerms closed_form_I_sine(double alpha, double beta, double a_minus, double a_plus) {
  const double k = beta * std::tgamma(beta) * std::tgamma(alpha - beta) / (alpha * std::tgamma(alpha));
  const double sa = sin_pi(alpha);
  const double t1 = a_minus * sin_pi(beta) / sa;
  const double t2 = -a_plus * sin_pi(alpha - beta) / sa;
  const double t3 = a_plus;
  return {k * (t1 + t2 + t3), std::abs(k) * (std::abs(t1) + std::abs(t2) + std::abs(t3))};
}

inline void check_I_domain(double alpha, double beta, double a_minus, double a_plus) {
  if (!(alpha > 0.0 && alpha < 1.0)) fail(ErrorKind::DomainError, "I needs alpha in (0,1)");
  if (!(beta > 0.0 && beta < alpha)) fail(ErrorKind::DomainError, "I needs 0 < beta < alpha (diverges otherwise)");
  if (!(a_minus >= 0.0 && a_plus >= 0.0)) fail(ErrorKind::DomainError, "I needs non-negative intensities");
}

/// I^{alpha,beta}_{a-,a+} = int [|1-x|^beta - 1] nu(dx) in closed form, with
/// the summand scale. Both closed forms are evaluated and must agree.
inline ClosedFormTerms closed_form_I_terms(double alpha, double beta, double a_minus, double a_plus) {
  check_I_domain(alpha, beta, a_minus, a_plus);
  const auto g = closed_form_I_gamma(alpha, beta, a_minus, a_plus);
  const auto s = closed_form_I_sine(alpha, beta, a_minus, a_plus);
  const double scale = std::max(g.scale, s.scale);
  if (std::abs(g.value - s.value) > 1e-10 * std::max(scale, 1e-300))
    throw std::logic_error("Gamma and sine forms of I disagree beyond 1e-10");
  return s;
}

inline double closed_form_I(double alpha, double beta, double a_minus, double a_plus) {
  return closed_form_I_terms(alpha, beta, a_minus, a_plus).value;
}

/// I-tilde^{alpha,beta}_{a-,a+} = int [|1+x|^beta - 1 - beta x] nu(dx),
/// alpha in (1,2), beta in [alpha-1, 1].
inline ClosedFormTerms closed_form_I_tilde_terms(double alpha, double beta, double a_minus, double a_plus) {
  if (!(alpha > 1.0 && alpha < 2.0)) fail(ErrorKind::DomainError, "I-tilde needs alpha in (1,2)");
  // beta_infinite(alpha, 1) may land a rounding error below alpha - 1.
  if (!(beta >= alpha - 1.0 - 1e-12 && beta <= 1.0))
    fail(ErrorKind::DomainError, "I-tilde closed form holds for beta in [alpha-1, 1]");
  if (!(a_minus >= 0.0 && a_plus >= 0.0)) fail(ErrorKind::DomainError, "I-tilde needs non-negative intensities");
  const double k = beta * std::tgamma(beta) * std::tgamma(alpha - beta) / (alpha * std::tgamma(alpha));
  const double s1 = sin_pi(alpha - 1.0);
  const double t1 = -a_plus * sin_pi(beta) / s1;
  const double t2 = a_minus;
  const double t3 = a_minus * sin_pi(alpha - beta) / s1;
  return {k * (t1 + t2 + t3), k * (std::abs(t1) + std::abs(t2) + std::abs(t3))};
}

inline double closed_form_I_tilde(double alpha, double beta, double a_minus, double a_plus) {
  return closed_form_I_tilde_terms(alpha, beta, a_minus, a_plus).value;
}

enum class MonotoneClass { None, NonDecreasing, NonIncreasing };

/// Hoelder index required of sigma (alpha > 1) or gamma (alpha < 1) for the
/// monotone part, following the regularity table for pathwise uniqueness.
/// A monotone class that does not match the favourable direction gives the
/// no-monotonicity requirement.
inline double required_holder_index(const StableParams& p, MonotoneClass monotone) {
  const double alpha = p.alpha();
  const double lo = std::min(p.a_minus(), p.a_plus());
  const double hi = std::max(p.a_minus(), p.a_plus());
  const double c = lo / hi;
  if (p.regime() == Regime::InfiniteVariation) {
    if (p.symmetric()) return 1.0 / alpha;
    // a_- < a_+ favours non-decreasing sigma; the mirrored case flips it.
    const MonotoneClass favourable =
        p.a_minus() < p.a_plus() ? MonotoneClass::NonDecreasing : MonotoneClass::NonIncreasing;
    if (monotone != favourable) return 1.0;
    return (alpha - beta_infinite(alpha, c).value) / alpha;
  }
  if (p.symmetric()) return alpha;
  const MonotoneClass favourable =
      p.a_minus() < p.a_plus() ? MonotoneClass::NonIncreasing : MonotoneClass::NonDecreasing;
  if (monotone != favourable || alpha <= 0.5 || c >= -std::cos(kPi * alpha)) return alpha;
  return alpha - beta_finite(alpha, c).value;
}

}  // namespace stable_sde
