#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "coefficients.hpp"
#include "driving_noise.hpp"
#include "error.hpp"
#include "rng.hpp"
#include "stable_measure.hpp"

namespace stable_sde {

/// Domination of |gamma| by the u-marks of the finite-variation stream. The
/// ladder starts at `initial` (automatic when unset) and each regeneration
/// appends a layer `growth` times higher.
struct UBoundPolicy {
  std::optional<double> initial;
  double growth = 4.0;
  int max_regenerations = 12;
};

struct SolveConfig {
  double horizon = 1.0;
  double euler_step = 1e-3;
  double epsilon = 1e-2;
  UBoundPolicy u_bound_policy;
  std::uint64_t seed = 0;
  std::vector<double> checkpoint_times;
  bool record_path = false;
  double blowup_guard = 1e12;
  /// Brownian stand-in for the discarded jumps |z| <= eps (alpha > 1 only).
  bool gaussian_refinement = false;
  /// Adds gamma(Y) * m_eps, the mean of the discarded jumps, to the drift (alpha < 1 only).
  bool small_jump_drift = false;
  double max_expected_events = kDefaultEventBudget;
};

inline void validate(const SolveConfig& c, Regime regime) {
  if (!(c.horizon > 0.0) || !std::isfinite(c.horizon)) fail(ErrorKind::InvalidArgument, "horizon must be > 0");
  if (!(c.euler_step > 0.0)) fail(ErrorKind::InvalidArgument, "euler_step must be > 0");
  if (!(c.epsilon > 0.0)) fail(ErrorKind::InvalidArgument, "epsilon must be > 0");
  if (!(c.blowup_guard > 0.0)) fail(ErrorKind::InvalidArgument, "blowup_guard must be > 0");
  for (std::size_t i = 0; i < c.checkpoint_times.size(); ++i) {
    const double t = c.checkpoint_times[i];
    if (!(t >= 0.0 && t <= c.horizon)) fail(ErrorKind::InvalidArgument, "checkpoint times must lie in [0, horizon]");
    if (i > 0 && !(t > c.checkpoint_times[i - 1]))
      fail(ErrorKind::InvalidArgument, "checkpoint times must be strictly increasing");
  }
  if (regime == Regime::FiniteVariation) {
    if (c.gaussian_refinement) fail(ErrorKind::InvalidArgument, "gaussian refinement applies to alpha in (1,2) only");
    const auto& pol = c.u_bound_policy;
    if (pol.initial && !(*pol.initial > 0.0)) fail(ErrorKind::InvalidArgument, "initial u_bound must be > 0");
    if (!(pol.growth > 1.0)) fail(ErrorKind::InvalidArgument, "u_bound growth factor must exceed 1");
    if (pol.max_regenerations < 0) fail(ErrorKind::InvalidArgument, "max_regenerations must be >= 0");
  } else if (c.small_jump_drift) {
    fail(ErrorKind::InvalidArgument, "small_jump_drift applies to alpha in (0,1) only");
  }
}

struct CoupledResult {
  PathSkeleton path_x;
  PathSkeleton path_x_tilde;
  std::vector<double> delta_at_checkpoints;
  /// sup |Delta| over (t_{k-1}, t_k] for checkpoint k.
  std::vector<double> delta_interval_sup;
  double delta_final = 0.0;
};

namespace engine_detail {

template <std::size_t N>
struct KernelOutput {
  std::array<PathSkeleton, N> paths;
  std::vector<double> delta_interval_sup;
};

/// Advances N solutions from different starts on one stream. Between stops
/// (events, checkpoints, horizon) the drift is integrated by explicit Euler;
/// at an event the jump is applied exactly.
template <std::size_t N>
KernelOutput<N> run(const CoefficientSet& c, const StableParams& p, std::array<double, N> x,
                    const EventStream& s, const SolveConfig& cfg) {
  const Regime regime = p.regime();
  validate(cfg, regime);
  if (s.params != p) fail(ErrorKind::RegimeMismatch, "stream was generated for different stable parameters");
  if (regime == Regime::FiniteVariation && !s.has_u())
    fail(ErrorKind::RegimeMismatch, "alpha < 1 needs an M-form stream with u marks");
  if (regime == Regime::InfiniteVariation && s.has_u())
    fail(ErrorKind::RegimeMismatch, "alpha in (1,2) needs an N-form stream");
  if (std::abs(s.horizon - cfg.horizon) > 1e-12 * cfg.horizon)
    fail(ErrorKind::InvalidArgument, "stream horizon differs from the configured horizon");

  const TruncationLevel eps(s.epsilon);
  const double mu = regime == Regime::InfiniteVariation ? truncation_drift(p, eps) : 0.0;
  const double m_eps = (regime == Regime::FiniteVariation && cfg.small_jump_drift) ? small_jump_mean(p, eps) : 0.0;
  const double var_rate = cfg.gaussian_refinement ? small_jump_variance(p, eps) : 0.0;
  const double u_bound = s.u_bound.value_or(0.0);
  Rng gauss(sub_seed(s.seed, 0x6a09e667ULL, static_cast<std::uint64_t>(s.plan.z_levels)));

  KernelOutput<N> out;
  const auto& cps = cfg.checkpoint_times;
  std::array<double, N> sup{};
  double delta_sup = 0.0;

  auto guard = [&](double v) {
    if (!std::isfinite(v) || std::abs(v) > cfg.blowup_guard)
      fail(ErrorKind::Blowup, "|X| exceeded " + format_double(cfg.blowup_guard) + "; reduce euler_step");
  };
  auto touch = [&]() {
    for (std::size_t i = 0; i < N; ++i) sup[i] = std::max(sup[i], std::abs(x[i]));
    if constexpr (N == 2) delta_sup = std::max(delta_sup, std::abs(x[0] - x[1]));
  };
  auto drift = [&](double v) {
    const double bv = c.b(v);
    double rate = bv;
    if (regime == Regime::InfiniteVariation) {
      const double sv = c.sigma(v);
      if (mu != 0.0) rate -= sv * mu;
      c.check_growth(v, sv, bv);
    } else {
      if (m_eps != 0.0) rate += c.gamma(v) * m_eps;
      if (c.declared_growth > 0.0) c.check_growth(v, c.sigma(v), bv);
    }
    return rate;
  };

  for (std::size_t i = 0; i < N; ++i) {
    guard(x[i]);
    out.paths[i].push(0.0, x[i], x[i], false);
  }
  touch();

  double t = 0.0;
  std::size_t e = 0;
  std::size_t k = 0;
  const std::size_t n_events = s.events.size();
  for (;;) {
    const double next_event = e < n_events ? s.events[e].t : INFINITY;
    const double next_cp = k < cps.size() ? cps[k] : INFINITY;
    const double stop = std::min({next_event, next_cp, cfg.horizon});

    if (stop > t) {
      const double span = stop - t;
      const auto n_sub = static_cast<long>(std::max(1.0, std::ceil(span / cfg.euler_step - 1e-9)));
      const double dt = span / static_cast<double>(n_sub);
      const double noise_sd = var_rate > 0.0 ? std::sqrt(var_rate * dt) : 0.0;
      for (long j = 0; j < n_sub; ++j) {
        const double dw = noise_sd > 0.0 ? noise_sd * gauss.normal() : 0.0;
        for (std::size_t i = 0; i < N; ++i) {
          double step = drift(x[i]) * dt;
          if (dw != 0.0) step += c.sigma(x[i]) * dw;
          x[i] += step;
          guard(x[i]);
        }
        touch();
        if (cfg.record_path && j + 1 < n_sub) {
          const double ts = t + dt * static_cast<double>(j + 1);
          for (std::size_t i = 0; i < N; ++i) out.paths[i].push(ts, x[i], x[i], false);
        }
      }
      t = stop;
    }

    bool recorded = false;
    if (stop == next_event) {
      const Event& ev = s.events[e];
      for (std::size_t i = 0; i < N; ++i) {
        const double left = x[i];
        bool jumped = false;
        if (regime == Regime::InfiniteVariation) {
          const double sv = c.sigma(left);
          if (sv != 0.0) {
            x[i] = left + sv * ev.z;
            jumped = true;
          }
        } else {
          const double g = c.gamma(left);
          if (std::abs(g) > u_bound) throw DominationError(std::abs(g), u_bound);
          if (0.0 < ev.u && ev.u < g) {
            x[i] = left + ev.z;
            jumped = true;
          } else if (g < ev.u && ev.u < 0.0) {
            x[i] = left - ev.z;
            jumped = true;
          }
        }
        guard(x[i]);
        if (cfg.record_path) out.paths[i].push(t, left, x[i], jumped);
      }
      touch();
      recorded = cfg.record_path;
      ++e;
    }
    if (stop == next_cp) {
      for (std::size_t i = 0; i < N; ++i) {
        out.paths[i].checkpoint_times.push_back(t);
        out.paths[i].checkpoint_values.push_back(x[i]);
        out.paths[i].interval_sup_abs.push_back(sup[i]);
        if (cfg.record_path && !recorded && t > 0.0) out.paths[i].push(t, x[i], x[i], false);
        sup[i] = 0.0;
      }
      recorded = recorded || cfg.record_path;
      if constexpr (N == 2) {
        out.delta_interval_sup.push_back(delta_sup);
        delta_sup = 0.0;
      }
      ++k;
    }
    if (t >= cfg.horizon && e == n_events && k == cps.size()) {
      for (std::size_t i = 0; i < N; ++i) {
        out.paths[i].final_value = x[i];
        if (out.paths[i].times.back() < t) out.paths[i].push(t, x[i], x[i], false);
      }
      break;
    }
  }
  return out;
}

inline double auto_u_bound(const CoefficientSet& c, double x_max) {
  const double r = 10.0 * (1.0 + x_max);
  double top = 0.0;
  constexpr int kGrid = 2000;
  for (int i = 0; i <= kGrid; ++i) top = std::max(top, std::abs(c.gamma(-r + 2.0 * r * i / kGrid)));
  return top > 0.0 ? 2.0 * top : 1.0;
}

/// Runs `attempt` on streams of growing u-ladders until the stream dominates
/// |gamma| along every path. Each regeneration keeps the existing layers, so
/// the events below the old bound are the same ones.
template <class Attempt>
auto with_domination(const CoefficientSet& c, const StableParams& p, double x_max, const SolveConfig& cfg,
                     int z_levels, Attempt attempt) {
  StreamPlan plan;
  plan.epsilon0 = cfg.epsilon;
  plan.z_levels = z_levels;
  if (p.regime() == Regime::FiniteVariation)
    plan.u_ladder = {cfg.u_bound_policy.initial.value_or(auto_u_bound(c, x_max))};
  for (int regen = 0;; ++regen) {
    EventStream s = generate_planned_stream(p, plan, cfg.horizon, cfg.seed, cfg.max_expected_events);
    try {
      return attempt(std::move(s), regen);
    } catch (const DominationError& err) {
      if (regen >= cfg.u_bound_policy.max_regenerations) throw;
      double top = plan.u_ladder.back();
      while (top < err.high_water()) {
        top *= cfg.u_bound_policy.growth;
        plan.u_ladder.push_back(top);
      }
    }
  }
}

}  // namespace engine_detail

/// Jump-adapted Euler scheme for dX = b(X) dt + sigma(X-) dZ, alpha in (1,2).
inline PathSkeleton solve_infinite_variation(const CoefficientSet& c, double x0, const EventStream& s,
                                             const SolveConfig& cfg) {
  if (s.params.regime() != Regime::InfiniteVariation)
    fail(ErrorKind::RegimeMismatch, "solve_infinite_variation needs alpha in (1,2)");
  return std::move(engine_detail::run<1>(c, s.params, {x0}, s, cfg).paths[0]);
}

/// Thinning scheme: an event (t,z,u) moves Y by +z if 0 < u < gamma(Y-) and
/// by -z if gamma(Y-) < u < 0. Throws DominationError when |gamma| > u_bound.
inline PathSkeleton solve_finite_variation(const CoefficientSet& c, double y0, const EventStream& s,
                                           const SolveConfig& cfg) {
  if (s.params.regime() != Regime::FiniteVariation)
    fail(ErrorKind::RegimeMismatch, "solve_finite_variation needs alpha in (0,1)");
  return std::move(engine_detail::run<1>(c, s.params, {y0}, s, cfg).paths[0]);
}

inline CoupledResult solve_coupled_pair(const CoefficientSet& c, double x0, double x0_tilde, const EventStream& s,
                                        const SolveConfig& cfg, Regime regime) {
  if (regime != s.params.regime())
    fail(ErrorKind::RegimeMismatch, "requested regime does not match alpha=" + format_double(s.params.alpha()));
  auto k = engine_detail::run<2>(c, s.params, {x0, x0_tilde}, s, cfg);
  CoupledResult r;
  r.path_x = std::move(k.paths[0]);
  r.path_x_tilde = std::move(k.paths[1]);
  r.delta_interval_sup = std::move(k.delta_interval_sup);
  for (std::size_t i = 0; i < r.path_x.checkpoint_values.size(); ++i)
    r.delta_at_checkpoints.push_back(r.path_x.checkpoint_values[i] - r.path_x_tilde.checkpoint_values[i]);
  r.delta_final = r.path_x.final_value - r.path_x_tilde.final_value;
  return r;
}

template <class Result>
struct Simulated {
  Result result;
  EventStream stream;
  int regenerations = 0;
};

/// Generates the noise from cfg.seed and solves, regenerating with a larger
/// u_bound when alpha < 1 and the stream fails to dominate gamma.
/// z_levels > 0 solves on the same noise refined to eps / 2^z_levels.
inline Simulated<PathSkeleton> simulate_path(const CoefficientSet& c, const StableParams& p, double x0,
                                             const SolveConfig& cfg, int z_levels = 0) {
  validate(cfg, p.regime());
  return engine_detail::with_domination(c, p, std::abs(x0), cfg, z_levels, [&](EventStream s, int regen) {
    auto k = engine_detail::run<1>(c, p, {x0}, s, cfg);
    return Simulated<PathSkeleton>{std::move(k.paths[0]), std::move(s), regen};
  });
}

inline Simulated<CoupledResult> simulate_coupled(const CoefficientSet& c, const StableParams& p, double x0,
                                                 double x0_tilde, const SolveConfig& cfg, int z_levels = 0) {
  validate(cfg, p.regime());
  const double x_max = std::max(std::abs(x0), std::abs(x0_tilde));
  return engine_detail::with_domination(c, p, x_max, cfg, z_levels, [&](EventStream s, int regen) {
    auto r = solve_coupled_pair(c, x0, x0_tilde, s, cfg, p.regime());
    return Simulated<CoupledResult>{std::move(r), std::move(s), regen};
  });
}

}  // namespace stable_sde
