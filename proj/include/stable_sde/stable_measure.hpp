#pragma once

#include <cmath>
#include <string>

#include "error.hpp"
#include "numeric.hpp"

// Scalars derived from the power-law Levy measure
//   nu(dz) = |z|^{-alpha-1} [a_minus 1{z<0} + a_plus 1{z>0}] dz,
// truncated at a caller-chosen level epsilon.

namespace stable_sde {

enum class Regime { FiniteVariation, InfiniteVariation };

inline std::string_view to_string(Regime r) {
  return r == Regime::FiniteVariation ? "FiniteVariation" : "InfiniteVariation";
}

/// Validated (alpha, a_minus, a_plus). Only constructible through
/// validate_params, so every instance satisfies the invariants.
class StableParams {
 public:
  double alpha() const noexcept { return alpha_; }
  double a_minus() const noexcept { return a_minus_; }
  double a_plus() const noexcept { return a_plus_; }
  double total_mass() const noexcept { return a_minus_ + a_plus_; }

  Regime regime() const noexcept {
    return alpha_ < 1.0 ? Regime::FiniteVariation : Regime::InfiniteVariation;
  }
  bool symmetric() const noexcept { return a_minus_ == a_plus_; }

  /// Same alpha with the two tails exchanged (the law of -Z).
  StableParams mirrored() const noexcept { return StableParams(alpha_, a_plus_, a_minus_); }

  friend StableParams validate_params(double alpha, double a_minus, double a_plus);
  friend bool operator==(const StableParams&, const StableParams&) = default;

 private:
  StableParams(double alpha, double a_minus, double a_plus)
      : alpha_(alpha), a_minus_(a_minus), a_plus_(a_plus) {}

  double alpha_;
  double a_minus_;
  double a_plus_;
};

inline StableParams validate_params(double alpha, double a_minus, double a_plus) {
  if (!(alpha > 0.0 && alpha < 2.0) || alpha == 1.0)
    fail(ErrorKind::AlphaOutOfRange, "alpha must lie in (0,2) minus {1}, got " + format_double(alpha));
  if (!(a_minus >= 0.0) || !(a_plus >= 0.0) || !std::isfinite(a_minus) || !std::isfinite(a_plus))
    fail(ErrorKind::NegativeIntensity, "a_minus and a_plus must be finite and >= 0");
  if (a_minus + a_plus <= 0.0) fail(ErrorKind::ZeroMeasure, "a_minus + a_plus must be positive");
  return StableParams(alpha, a_minus, a_plus);
}

class TruncationLevel {
 public:
  explicit TruncationLevel(double epsilon) : epsilon_(epsilon) {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon))
      fail(ErrorKind::InvalidArgument, "truncation level must be finite and > 0");
  }
  double value() const noexcept { return epsilon_; }

 private:
  double epsilon_;
};

/// lambda_eps = nu({|z| > eps}) = (a_- + a_+) eps^{-alpha} / alpha.
inline double tail_mass(const StableParams& p, TruncationLevel eps) {
  const double scale = std::pow(eps.value(), -p.alpha());
  if (!std::isfinite(scale))
    fail(ErrorKind::Overflow, "eps^{-alpha} overflows for eps=" + format_double(eps.value()));
  const double out = p.total_mass() * scale / p.alpha();
  if (!std::isfinite(out)) fail(ErrorKind::Overflow, "tail mass overflows");
  return out;
}

/// Intensity of nu on the band lo < |z| <= hi.
inline double band_mass(const StableParams& p, double lo, double hi) {
  if (!(lo > 0.0 && lo < hi)) fail(ErrorKind::InvalidArgument, "band requires 0 < lo < hi");
  const double upper = std::isinf(hi) ? 0.0 : std::pow(hi, -p.alpha());
  return p.total_mass() * (std::pow(lo, -p.alpha()) - upper) / p.alpha();
}

/// Inverse-transform draw from nu restricted to {|z| > eps}, normalised.
/// Negative iff u_sign < a_-/(a_- + a_+); |z| = eps * u_mag^{-1/alpha}.
inline double sample_jump_size(const StableParams& p, TruncationLevel eps, double u_sign, double u_mag) {
  if (!(u_sign > 0.0 && u_sign < 1.0) || !(u_mag > 0.0 && u_mag < 1.0))
    fail(ErrorKind::InvalidArgument, "uniforms must lie in (0,1)");
  const double magnitude = eps.value() * std::pow(u_mag, -1.0 / p.alpha());
  const bool negative = u_sign < p.a_minus() / p.total_mass();
  return negative ? -magnitude : magnitude;
}

/// Draw from nu restricted to the band lo < |z| <= hi, normalised.
inline double sample_band_jump(const StableParams& p, double lo, double hi, double u_sign, double u_mag) {
  const double a = p.alpha();
  const double top = std::pow(hi, -a);
  const double magnitude = std::pow(top + u_mag * (std::pow(lo, -a) - top), -1.0 / a);
  const bool negative = u_sign < p.a_minus() / p.total_mass();
  return negative ? -magnitude : magnitude;
}

/// mu_eps = int_{|z|>eps} z nu(dz) = (a_+ - a_-) eps^{1-alpha} / (alpha - 1), alpha in (1,2).
inline double truncation_drift(const StableParams& p, TruncationLevel eps) {
  if (p.regime() != Regime::InfiniteVariation)
    fail(ErrorKind::WrongRegime, "truncation drift is only defined for alpha in (1,2)");
  return (p.a_plus() - p.a_minus()) * std::pow(eps.value(), 1.0 - p.alpha()) / (p.alpha() - 1.0);
}

/// m_eps = int_{|z|<=eps} z nu(dz) = (a_+ - a_-) eps^{1-alpha} / (1 - alpha), alpha in (0,1).
/// Mean rate of the jumps a truncated finite-variation driver discards.
inline double small_jump_mean(const StableParams& p, TruncationLevel eps) {
  if (p.regime() != Regime::FiniteVariation)
    fail(ErrorKind::WrongRegime, "small jump mean is only finite for alpha in (0,1)");
  return (p.a_plus() - p.a_minus()) * std::pow(eps.value(), 1.0 - p.alpha()) / (1.0 - p.alpha());
}

/// int_{|z|<=eps} z^2 nu(dz) = (a_- + a_+) eps^{2-alpha} / (2 - alpha).
inline double small_jump_variance(const StableParams& p, TruncationLevel eps) {
  return p.total_mass() * std::pow(eps.value(), 2.0 - p.alpha()) / (2.0 - p.alpha());
}

}  // namespace stable_sde
