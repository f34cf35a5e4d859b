#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "error.hpp"
#include "numeric.hpp"
#include "stable_measure.hpp"

// Numerical evaluation of integrals against the power-law Levy measure:
// the constants I and I-tilde, the smoothed families J, K, J-tilde,
// K-tilde, L-tilde, and Richardson-type extrapolation of eta -> 0 limits.
//
// Every integral is split per half-line at the kinks of its integrand. Each
// piece is mapped to (0,1) and integrated with the tanh-sinh rule, which is
// insensitive to algebraic endpoint singularities. The piece touching z = 0
// uses z = b v^p and the unbounded piece uses z = T t^{-1/d}; both
// exponents are chosen so that the transformed integrand is bounded.

namespace stable_sde {

struct QuadratureSpec {
  double abs_tol = 1e-13;
  double rel_tol = 1e-11;
  /// Maximum number of step-halving levels of the tanh-sinh rule per piece.
  int max_subdivisions = 12;
  /// Where the origin piece hands over to the tail piece on a half-line
  /// without kinks, in units of the natural length scale of the integrand.
  double singularity_split = 1.0;
};

inline void validate(const QuadratureSpec& spec) {
  if (!(spec.abs_tol > 0.0) || !(spec.rel_tol > 0.0))
    fail(ErrorKind::InvalidArgument, "quadrature tolerances must be positive");
  if (spec.max_subdivisions < 10) fail(ErrorKind::InvalidArgument, "max_subdivisions must be >= 10");
  if (!(spec.singularity_split > 0.0)) fail(ErrorKind::InvalidArgument, "singularity_split must be positive");
}

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
};

/// Evaluation point of the smoothed families. delta_small is only read by
/// the tilde families.
struct SmoothedEvalPoint {
  double delta = 1.0;
  double delta_small = 0.0;
  double eta = 0.1;
  double beta = 0.5;
  StableParams params;
};

namespace quad_detail {

/// Integrand on (0,1) receiving both x and 1-x, each to full relative precision.
using UnitIntegrand = std::function<double(double x, double xc)>;

inline constexpr double kTMax = 3.0;

/// Tanh-sinh rule on (0,1). Level k uses step 2^{-k}; the error estimate is
/// the change between consecutive levels.
inline QuadResult tanh_sinh(const UnitIntegrand& f, const QuadratureSpec& spec) {
  auto node = [&](double t, double& sum, double& l1) {
    const double e = kPi * std::sinh(t);
    const double x = 1.0 / (1.0 + std::exp(-e));
    const double xc = 1.0 / (1.0 + std::exp(e));
    const double w = kPi * std::cosh(t) * x * xc;
    if (w == 0.0) return;
    const double v = w * f(x, xc);
    sum += v;
    l1 += std::abs(v);
  };

  double sum = 0.0;
  double l1 = 0.0;
  node(0.0, sum, l1);
  for (double t = 1.0; t <= kTMax; t += 1.0) {
    node(t, sum, l1);
    node(-t, sum, l1);
  }
  double h = 1.0;
  double estimate = sum * h;
  double error = std::abs(estimate);
  for (int level = 1; level <= spec.max_subdivisions; ++level) {
    h *= 0.5;
    for (double t = h; t <= kTMax; t += 2.0 * h) {
      node(t, sum, l1);
      node(-t, sum, l1);
    }
    const double next = sum * h;
    error = std::abs(next - estimate);
    estimate = next;
    const double tol = std::max({spec.abs_tol, spec.rel_tol * std::abs(estimate), 64.0 * 2.2e-16 * l1 * h});
    if (level >= 3 && error <= tol) return {estimate, error};
  }
  fail(ErrorKind::NonConvergence, "tanh-sinh did not reach tolerance; last change " + format_double(error));
}

/// Integrand on one half-line, expressed in y = |z| > 0. The kink-sensitive
/// quantity y - anchor is passed separately so it keeps full precision
/// near the anchor.
using HalfLineIntegrand = std::function<double(double y, double anchor, double offset)>;

/// The same integrand on the unbounded piece, written in u = 1/y and scaled
/// by y^{d-alpha} (d the tail decay) so that it has a finite limit as u -> 0.
/// Part of the measure always sits beyond the largest double when d is
/// small, so the tail cannot be sampled in y directly.
using TailIntegrand = std::function<double(double u)>;

struct HalfLinePlan {
  /// Breakpoints in y, strictly increasing, all inside (lower, upper).
  std::vector<double> breakpoints;
  double lower = 0.0;
  double upper = std::numeric_limits<double>::infinity();
  /// Order of vanishing of f(y) at y = 0; required when lower == 0.
  double zero_order = 1.0;
  /// f(y) y^{-alpha-1} ~ y^{-tail_decay-1} at infinity; required when upper is infinite.
  double tail_decay = 1.0;
  /// Length used to end the origin piece when no breakpoint is available.
  double scale = 1.0;
};

/// int_lower^upper f(y) y^{-alpha-1} dy following the plan.
inline QuadResult integrate_half_line(const HalfLineIntegrand& f, const TailIntegrand& tail, double alpha,
                                      const HalfLinePlan& plan, const QuadratureSpec& spec) {
  std::vector<double> points;
  if (plan.lower > 0.0) points.push_back(plan.lower);
  for (double b : plan.breakpoints) points.push_back(b);
  if (std::isfinite(plan.upper)) points.push_back(plan.upper);
  if (plan.lower == 0.0 && points.empty()) points.push_back(plan.scale * spec.singularity_split);

  QuadResult total;
  auto add = [&](const QuadResult& r) {
    total.value += r.value;
    total.error += r.error;
  };

  if (plan.lower == 0.0) {
    // y = b v^p with p = 1/(k - alpha) makes f(y) y^{-alpha-1} dy = p b^{k-alpha} f(y)/y^k dv.
    const double b = points.front();
    const double k = plan.zero_order;
    const double p = 1.0 / (k - alpha);
    const double pref = p * std::pow(b, k - alpha);
    add(tanh_sinh(
        [&](double v, double vc) {
          // Below 1e-100 b the transformed integrand equals its limit at 0
          // to double precision; clamping keeps y^k clear of underflow.
          const double y = std::max(b * std::exp(p * std::log(v)), 1e-100 * b);
          const double offset = b * pow1pm1(-vc, p);
          return pref * f(y, b, offset) / std::pow(y, k);
        },
        spec));
  }

  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    const double lo = points[i];
    const double hi = points[i + 1];
    const double half = 0.5 * (hi - lo);
    // Each half is parametrised from its own endpoint.
    add(tanh_sinh(
        [&](double x, double) {
          const double off = half * x;
          const double y = lo + off;
          return half * f(y, lo, off) * std::pow(y, -alpha - 1.0);
        },
        spec));
    add(tanh_sinh(
        [&](double, double xc) {
          const double off = -half * xc;
          const double y = hi + off;
          return half * f(y, hi, off) * std::pow(y, -alpha - 1.0);
        },
        spec));
  }

  if (!std::isfinite(plan.upper)) {
    // y = T t^{-1/d}: f(y) y^{-alpha-1} dy = G(1/y) T^{-d} / d dt with G = f(y) y^{d-alpha}.
    const double T = points.back();
    const double d = plan.tail_decay;
    const double pref = std::pow(T, -d) / d;
    add(tanh_sinh([&](double t, double) { return pref * tail(std::exp(std::log(t) / d) / T); }, spec));
  }
  return total;
}

inline double phi(double eta, double beta, double x) { return std::pow(std::hypot(eta, x), beta); }

/// phi(A+h) - phi(A), where A+h is passed precomputed by the caller.
inline double phi_diff(double eta, double beta, double A, double h, double Aph) {
  if (std::abs(h) < 0.5 * std::abs(A)) {
    const double q = eta * eta + A * A;
    const double r = h * (2.0 * A + h) / q;
    return phi(eta, beta, A) * pow1pm1(r, 0.5 * beta);
  }
  return phi(eta, beta, Aph) - phi(eta, beta, A);
}

/// phi(A+h) - phi(A) - h phi'(A).
inline double phi_diff2(double eta, double beta, double A, double h, double Aph) {
  const double q = eta * eta + A * A;
  const double s = 0.5 * beta;
  if (std::abs(h) < 0.5 * std::abs(A)) {
    const double r = h * (2.0 * A + h) / q;
    return phi(eta, beta, A) * (pow1p_rem(r, s) + s * h * h / q);
  }
  return phi(eta, beta, Aph) - phi(eta, beta, A) - h * phi(eta, beta, A) * beta * A / q;
}

/// Shift h = kappa * z with z = side * y, and its sum with A kept precise near anchors.
struct Shift {
  double h;
  double Aph;
};

inline Shift shift(double A, double kappa, double side, double y, double anchor, double offset) {
  const double ks = kappa * side;
  return {ks * y, (A + ks * anchor) + ks * offset};
}

struct SideIntegrand {
  HalfLineIntegrand body;
  TailIntegrand tail;
};

/// Sum over both half-lines, each weighted by its tail intensity.
template <class MakeIntegrand, class MakePlan>
QuadResult integrate_measure(const StableParams& p, const QuadratureSpec& spec, MakeIntegrand make_integrand,
                             MakePlan make_plan) {
  validate(spec);
  QuadResult total;
  for (double side : {-1.0, 1.0}) {
    const double weight = side < 0.0 ? p.a_minus() : p.a_plus();
    if (weight == 0.0) continue;
    const HalfLinePlan plan = make_plan(side);
    const auto [f, tail] = make_integrand(side);
    const QuadResult r = integrate_half_line(f, tail, p.alpha(), plan, spec);
    total.value += weight * r.value;
    total.error += weight * r.error;
  }
  return total;
}

enum class FirstOrder { Signed, Absolute };

/// int [phi(A - z) - phi(A)] nu(dz) or its absolute-value variant. eta = 0 is
/// accepted here and gives the unsmoothed integrand.
inline QuadResult first_order_family(const StableParams& p, double beta, double eta, double A, FirstOrder mode,
                                     const QuadratureSpec& spec) {
  const double mag = std::abs(A);
  return integrate_measure(
      p, spec,
      [&, beta, eta, A, mode](double side) {
        auto finish = [mode](double v) { return mode == FirstOrder::Absolute ? std::abs(v) : v; };
        const double phi_a = phi(eta, beta, A);
        return SideIntegrand{[=](double y, double anchor, double offset) {
                               const Shift s = shift(A, -1.0, side, y, anchor, offset);
                               return finish(phi_diff(eta, beta, A, s.h, s.Aph));
                             },
                             // (phi(A - z) - phi(A)) y^{-beta}
                             [=](double u) {
                               return finish(std::pow(std::hypot(eta * u, A * u - side), beta) -
                                             phi_a * std::pow(u, beta));
                             }};
      },
      [&](double side) {
        HalfLinePlan plan;
        plan.zero_order = 1.0;
        plan.tail_decay = p.alpha() - beta;
        plan.scale = mag;
        // phi(A - z) has its kink at z = A and returns to phi(A) at z = 2A.
        if (side * A > 0.0) plan.breakpoints = {mag, 2.0 * mag};
        return plan;
      });
}

/// int [phi(A + dz) - phi(A) - dz phi'(A)] nu(dz), eta = 0 allowed.
inline QuadResult second_order_family(const StableParams& p, double beta, double eta, double A, double d,
                                      const QuadratureSpec& spec) {
  const double zstar = -A / d;
  const double mag = std::abs(zstar);
  return integrate_measure(
      p, spec,
      [&, beta, eta, A, d](double side) {
        const double phi_a = phi(eta, beta, A);
        const double slope = phi_a * beta * A / (eta * eta + A * A);
        return SideIntegrand{[=](double y, double anchor, double offset) {
                               const Shift s = shift(A, d, side, y, anchor, offset);
                               return phi_diff2(eta, beta, A, s.h, s.Aph);
                             },
                             // (phi(A + dz) - phi(A) - dz phi'(A)) / y
                             [=](double u) {
                               const double far = std::pow(std::hypot(eta * u, A * u + d * side), beta) *
                                                  (beta == 1.0 ? 1.0 : std::pow(u, 1.0 - beta));
                               return far - phi_a * u - d * side * slope;
                             }};
      },
      [&](double side) {
        HalfLinePlan plan;
        plan.zero_order = 2.0;
        plan.tail_decay = p.alpha() - 1.0;
        plan.scale = mag;
        if (side * zstar > 0.0) plan.breakpoints = {mag, 2.0 * mag};
        return plan;
      });
}

/// phi(x) - |x|^beta, which decays like |x|^{beta-2} for large |x|.
inline double smoothing_gap(double eta, double beta, double x) {
  if (x == 0.0) return std::pow(eta, beta);
  if (!std::isfinite(x)) return 0.0;
  return std::pow(std::abs(x), beta) * pow1pm1((eta / x) * (eta / x), 0.5 * beta);
}

/// phi(A+h) - phi(A) - |A+h|^beta + |A|^beta. Small shifts subtract two
/// first-order differences; large shifts subtract two smoothing gaps, which
/// avoids cancelling terms of size |h|^beta far out in the tail.
inline double smoothing_defect(double eta, double beta, double A, const Shift& s) {
  if (std::abs(s.h) < 0.5 * std::abs(A))
    return phi_diff(eta, beta, A, s.h, s.Aph) - phi_diff(0.0, beta, A, s.h, s.Aph);
  return smoothing_gap(eta, beta, s.Aph) - smoothing_gap(eta, beta, A);
}

}  // namespace quad_detail

/// I^{alpha,beta}_{a-,a+} = int [|1-x|^beta - 1] nu(dx) by quadrature.
inline QuadResult integral_I_numeric(double alpha, double beta, double a_minus, double a_plus,
                                     const QuadratureSpec& spec = {}) {
  const StableParams p = validate_params(alpha, a_minus, a_plus);
  if (!(alpha < 1.0 && beta > 0.0 && beta < alpha))
    fail(ErrorKind::DomainError, "integral_I_numeric needs 0 < beta < alpha < 1");
  return quad_detail::first_order_family(p, beta, 0.0, 1.0, quad_detail::FirstOrder::Signed, spec);
}

/// I-tilde^{alpha,beta}_{a-,a+} = int [|1+x|^beta - 1 - beta x] nu(dx) by quadrature.
inline QuadResult integral_I_tilde_numeric(double alpha, double beta, double a_minus, double a_plus,
                                           const QuadratureSpec& spec = {}) {
  const StableParams p = validate_params(alpha, a_minus, a_plus);
  if (!(alpha > 1.0 && beta >= alpha - 1.0 && beta <= 1.0))
    fail(ErrorKind::DomainError, "integral_I_tilde_numeric needs alpha in (1,2), beta in [alpha-1,1]");
  return quad_detail::second_order_family(p, beta, 0.0, 1.0, 1.0, spec);
}

namespace quad_detail {

inline void check_first_order_point(const SmoothedEvalPoint& pt) {
  if (pt.params.regime() != Regime::FiniteVariation)
    fail(ErrorKind::DomainError, "J and K are defined for alpha in (0,1)");
  if (!(pt.beta > 0.0 && pt.beta < pt.params.alpha())) fail(ErrorKind::DomainError, "J and K need 0 < beta < alpha");
  if (!(pt.eta > 0.0)) fail(ErrorKind::DomainError, "eta must be positive");
  if (pt.delta == 0.0 || !std::isfinite(pt.delta)) fail(ErrorKind::DomainError, "Delta must be finite and non-zero");
}

inline void check_second_order_point(const SmoothedEvalPoint& pt) {
  if (pt.params.regime() != Regime::InfiniteVariation)
    fail(ErrorKind::DomainError, "the tilde families are defined for alpha in (1,2)");
  if (!(pt.beta > 0.0 && pt.beta <= 1.0)) fail(ErrorKind::DomainError, "the tilde families need beta in (0,1]");
  if (!(pt.eta > 0.0)) fail(ErrorKind::DomainError, "eta must be positive");
  if (pt.delta == 0.0 || !std::isfinite(pt.delta)) fail(ErrorKind::DomainError, "Delta must be finite and non-zero");
  if (!std::isfinite(pt.delta_small)) fail(ErrorKind::DomainError, "delta must be finite");
}

}  // namespace quad_detail

/// J^{alpha,beta,eta}(Delta) = int [phi_eta(Delta - z) - phi_eta(Delta)] nu(dz).
inline QuadResult J_eta(const SmoothedEvalPoint& pt, const QuadratureSpec& spec = {}) {
  quad_detail::check_first_order_point(pt);
  return quad_detail::first_order_family(pt.params, pt.beta, pt.eta, pt.delta, quad_detail::FirstOrder::Signed,
                                         spec);
}

/// K^{alpha,beta,eta}(Delta) = int |phi_eta(Delta - z) - phi_eta(Delta)| nu(dz).
inline QuadResult K_eta(const SmoothedEvalPoint& pt, const QuadratureSpec& spec = {}) {
  quad_detail::check_first_order_point(pt);
  return quad_detail::first_order_family(pt.params, pt.beta, pt.eta, pt.delta, quad_detail::FirstOrder::Absolute,
                                         spec);
}

/// J-tilde^{alpha,beta,eta}(Delta, delta).
inline QuadResult tilde_J_eta(const SmoothedEvalPoint& pt, const QuadratureSpec& spec = {}) {
  quad_detail::check_second_order_point(pt);
  if (pt.delta_small == 0.0) return {};
  return quad_detail::second_order_family(pt.params, pt.beta, pt.eta, pt.delta, pt.delta_small, spec);
}

/// K-tilde: squared smoothing defect integrated over {|delta z| <= |Delta|}.
inline QuadResult tilde_K_eta(const SmoothedEvalPoint& pt, const QuadratureSpec& spec = {}) {
  using namespace quad_detail;
  check_second_order_point(pt);
  if (pt.delta_small == 0.0) return {};
  const double A = pt.delta, d = pt.delta_small, eta = pt.eta, beta = pt.beta;
  const double R = std::abs(A / d);
  return integrate_measure(
      pt.params, spec,
      [=](double side) {
        return SideIntegrand{[=](double y, double anchor, double offset) {
                               const double v = smoothing_defect(eta, beta, A, shift(A, d, side, y, anchor, offset));
                               return v * v;
                             },
                             {}};
      },
      [=](double) {
        HalfLinePlan plan;
        plan.upper = R;
        plan.zero_order = 2.0;
        return plan;
      });
}

/// L-tilde: absolute smoothing defect integrated over {|delta z| > |Delta|}.
inline QuadResult tilde_L_eta(const SmoothedEvalPoint& pt, const QuadratureSpec& spec = {}) {
  using namespace quad_detail;
  check_second_order_point(pt);
  if (pt.delta_small == 0.0) return {};
  const double A = pt.delta, d = pt.delta_small, eta = pt.eta, beta = pt.beta;
  const double zstar = -A / d;
  const double R = std::abs(zstar);
  return integrate_measure(
      pt.params, spec,
      [=](double side) {
        const double gap_a = smoothing_gap(eta, beta, A);
        return SideIntegrand{[=](double y, double anchor, double offset) {
                               return std::abs(smoothing_defect(eta, beta, A, shift(A, d, side, y, anchor, offset)));
                             },
                             [=](double u) { return std::abs(smoothing_gap(eta, beta, A + d * side / u) - gap_a); }};
      },
      [=, alpha = pt.params.alpha()](double side) {
        HalfLinePlan plan;
        plan.lower = R;
        plan.tail_decay = alpha;
        // The defect changes sign where |Delta + delta z| = |Delta|.
        if (side * zstar > 0.0) plan.breakpoints = {2.0 * R};
        return plan;
      });
}

/// Limit of J as eta -> 0: |Delta|^{beta-alpha} I with the tails exchanged for Delta < 0.
inline double J_limit(const SmoothedEvalPoint& pt, const std::function<double(double, double, double, double)>& I) {
  const auto& p = pt.params;
  const double scale = std::pow(std::abs(pt.delta), pt.beta - p.alpha());
  return pt.delta > 0.0 ? scale * I(p.alpha(), pt.beta, p.a_minus(), p.a_plus())
                        : scale * I(p.alpha(), pt.beta, p.a_plus(), p.a_minus());
}

/// Limit of J-tilde as eta -> 0: |Delta|^{beta-alpha} |delta|^alpha I-tilde, tails
/// exchanged when delta Delta < 0.
inline double tilde_J_limit(const SmoothedEvalPoint& pt,
                            const std::function<double(double, double, double, double)>& I_tilde) {
  const auto& p = pt.params;
  if (pt.delta_small == 0.0) return 0.0;
  const double scale =
      std::pow(std::abs(pt.delta), pt.beta - p.alpha()) * std::pow(std::abs(pt.delta_small), p.alpha());
  return pt.delta * pt.delta_small > 0.0 ? scale * I_tilde(p.alpha(), pt.beta, p.a_minus(), p.a_plus())
                                         : scale * I_tilde(p.alpha(), pt.beta, p.a_plus(), p.a_minus());
}

/// eta_k = 0.1 * 2^{-k}, k = 0..12.
inline std::vector<double> default_eta_sweep() {
  std::vector<double> etas;
  for (int k = 0; k <= 12; ++k) etas.push_back(0.1 * std::ldexp(1.0, -k));
  return etas;
}

struct EtaSample {
  double eta;
  double value;
};

struct Extrapolation {
  double limit = 0.0;
  double error = 0.0;
  /// Fitted convergence order p in value ~ L + c eta^p (0 when not fitted).
  double order = 0.0;
  /// False when the last differences change sign.
  bool monotone_tail = true;
};

namespace quad_detail {

// Fits v = L + c eta^p through three points.
inline std::optional<Extrapolation> fit_three(const EtaSample& a, const EtaSample& b, const EtaSample& c) {
  const double d1 = a.value - b.value;
  const double d2 = b.value - c.value;
  const double noise = 1e-12 * std::max({1.0, std::abs(a.value), std::abs(c.value)});
  if (std::abs(d1) <= noise && std::abs(d2) <= noise) return Extrapolation{c.value, std::abs(d2), 0.0, true};
  if (d1 * d2 <= 0.0) return std::nullopt;
  const double rho = d1 / d2;
  auto ratio = [&](double p) {
    return (std::pow(a.eta, p) - std::pow(b.eta, p)) / (std::pow(b.eta, p) - std::pow(c.eta, p));
  };
  // ratio(p) increases with p; at or below its p -> 0 limit the samples
  // are not approaching anything.
  double lo = 1e-6, hi = 10.0;
  if (rho <= ratio(lo)) return std::nullopt;
  if (ratio(hi) <= rho) {
    lo = hi;
  } else {
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      (ratio(mid) < rho ? lo : hi) = mid;
    }
  }
  const double p = 0.5 * (lo + hi);
  const double coef = d2 / (std::pow(b.eta, p) - std::pow(c.eta, p));
  return Extrapolation{c.value - coef * std::pow(c.eta, p), std::abs(d2), p, true};
}

}  // namespace quad_detail

/// Extrapolates eta -> 0 from samples with strictly decreasing eta, fitting
/// L + c eta^p on the last three points. The error estimate compares with
/// the fit on the preceding triple when one exists.
inline Extrapolation eta_limit_extrapolate(std::span<const EtaSample> values) {
  const std::size_t n = values.size();
  if (n < 3) fail(ErrorKind::InsufficientPoints, "extrapolation needs at least 3 points");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(values[i].eta > 0.0) || !std::isfinite(values[i].value))
      fail(ErrorKind::InsufficientPoints, "eta must be positive and values finite");
    if (i > 0 && !(values[i].eta < values[i - 1].eta))
      fail(ErrorKind::InsufficientPoints, "eta must be strictly decreasing");
  }
  const auto& a = values[n - 3];
  const auto& b = values[n - 2];
  const auto& c = values[n - 1];
  const double d1 = a.value - b.value;
  const double d2 = b.value - c.value;
  const bool monotone = d1 * d2 >= 0.0;

  std::optional<Extrapolation> fit = quad_detail::fit_three(a, b, c);
  if (!fit) {
    // Oscillating tails are accepted only while they contract.
    if (!monotone && std::abs(d2) < std::abs(d1)) {
      fit = Extrapolation{c.value, std::abs(d2), 0.0, monotone};
    } else {
      fail(ErrorKind::DivergentSequence, "successive differences do not shrink: " + format_double(d1) + ", " +
                                             format_double(d2));
    }
  }
  fit->monotone_tail = monotone;
  if (n >= 4) {
    const auto prev = quad_detail::fit_three(values[n - 4], a, b);
    fit->error = std::abs(fit->limit - (prev ? prev->limit : b.value));
  }
  return *fit;
}

/// Supremum of |family(pt)| * scale(pt) over points x etas, and again with
/// one extra level at half the smallest eta. A bound C |Delta|^a |delta|^b
/// shows up as a finite supremum that barely moves under the extra level.
struct BoundConstant {
  double sup = 0.0;
  double sup_refined = 0.0;
  double relative_change = 0.0;

  bool finite() const { return std::isfinite(sup) && std::isfinite(sup_refined); }
};

using SmoothedFamily = std::function<QuadResult(const SmoothedEvalPoint&, const QuadratureSpec&)>;

inline BoundConstant empirical_bound_constant(const SmoothedFamily& family,
                                              const std::function<double(const SmoothedEvalPoint&)>& scale,
                                              std::span<const SmoothedEvalPoint> points, std::vector<double> etas,
                                              const QuadratureSpec& spec = {}) {
  if (points.empty() || etas.empty()) fail(ErrorKind::InvalidArgument, "bound sweep needs points and etas");
  std::sort(etas.begin(), etas.end(), std::greater<>());
  BoundConstant out;
  for (SmoothedEvalPoint pt : points) {
    for (double eta : etas) {
      pt.eta = eta;
      out.sup = std::max(out.sup, std::abs(family(pt, spec).value) * scale(pt));
    }
    pt.eta = 0.5 * etas.back();
    out.sup_refined = std::max(out.sup_refined, std::abs(family(pt, spec).value) * scale(pt));
  }
  out.sup_refined = std::max(out.sup_refined, out.sup);
  out.relative_change = out.sup > 0.0 ? (out.sup_refined - out.sup) / out.sup : 0.0;
  return out;
}

}  // namespace stable_sde
