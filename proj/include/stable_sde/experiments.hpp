#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "coefficients.hpp"
#include "error.hpp"
#include "exponents.hpp"
#include "numeric.hpp"
#include "parallel.hpp"
#include "sde_engine.hpp"
#include "stable_measure.hpp"

namespace stable_sde {

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  long n_paths = 0;
  double bias_budget = 0.0;
};

enum class Verdict { Pass, Fail, Info };

inline std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "PASS";
    case Verdict::Fail: return "FAIL";
    case Verdict::Info: return "INFO";
  }
  return "INFO";
}

struct CheckpointRow {
  double t = 0.0;
  McEstimate estimate;
  /// Value the estimate is compared against; NaN when the row is informational.
  double target = NAN;
  Verdict verdict = Verdict::Info;
};

struct CouplingReport {
  std::string scenario;
  double beta_used = 0.0;
  double initial_gap = 0.0;
  std::vector<CheckpointRow> rows;

  bool passed() const {
    return std::none_of(rows.begin(), rows.end(), [](const CheckpointRow& r) { return r.verdict == Verdict::Fail; });
  }
};

inline void write_report_header(std::ostream& out) {
  out << "scenario,t,beta,mean,std_error,n_paths,bias_budget,target,verdict\n";
}

inline void write_report_rows(std::ostream& out, const CouplingReport& r) {
  for (const auto& row : r.rows) {
    out << r.scenario << ',' << format_double(row.t) << ',' << format_double(r.beta_used) << ','
        << format_double(row.estimate.mean) << ',' << format_double(row.estimate.std_error) << ','
        << row.estimate.n_paths << ',' << format_double(row.estimate.bias_budget) << ','
        << (std::isnan(row.target) ? std::string() : format_double(row.target)) << ',' << to_string(row.verdict)
        << '\n';
  }
}

inline void write_report_csv(std::ostream& out, const CouplingReport& r) {
  write_report_header(out);
  write_report_rows(out, r);
}

/// A named experiment: stable law, coefficients, starting points and the
/// solver settings it is meant to be run with.
struct Scenario {
  std::string name;
  StableParams params = validate_params(1.5, 1.0, 1.0);
  CoefficientSet coeffs;
  double x0 = 0.0;
  double x0_tilde = 1.0;
  SolveConfig config;
};

namespace experiment_detail {

inline double e1_sigma(double x) { return 1.0 + std::min(std::cbrt(x * x), 5.0); }

inline double e2_gamma(double x) {
  return 1.5 - 0.5 * std::clamp(sign_of(x) * std::sqrt(std::sqrt(std::abs(x))), -1.0, 1.0);
}

inline SolveConfig base_config(double horizon, double eps, double step, std::vector<double> checkpoints) {
  SolveConfig c;
  c.horizon = horizon;
  c.epsilon = eps;
  c.euler_step = step;
  c.checkpoint_times = std::move(checkpoints);
  c.seed = 20240601;
  return c;
}

}  // namespace experiment_detail

inline std::vector<std::string> builtin_scenario_names() {
  return {"E1", "E2", "lipschitz", "holder", "additive", "contraction"};
}

/// Built-in scenarios use native coefficient functions. The same formulas
/// written in the coefficient language agree up to rounding, at about twice
/// the cost.
inline Scenario builtin_scenario(std::string_view name) {
  using namespace experiment_detail;
  Scenario s;
  s.name = std::string(name);
  if (name == "E1") {
    s.params = validate_params(1.5, 1.0, 1.0);
    s.coeffs = make_coefficients(e1_sigma, constant_fn(0.0), 1.5);
    s.coeffs.declared_b_constant = true;
    s.coeffs.declared_b_monotone = MonotoneClass::NonIncreasing;
    s.coeffs.declared_holder = HolderDeclaration{2.0 / 3.0, 1.0};
    s.coeffs.label = "sigma=1+min(|x|^(2/3),5), b=0";
    s.config = base_config(1.0, 1e-3, 0.01, {0.25, 0.5, 1.0});
  } else if (name == "E2") {
    s.params = validate_params(0.75, 0.0, 1.0);
    s.coeffs = make_coefficients_from_gamma(e2_gamma, constant_fn(0.0), 0.75);
    s.coeffs.declared_b_constant = true;
    s.coeffs.declared_monotone = MonotoneClass::NonIncreasing;
    s.coeffs.declared_holder = HolderDeclaration{0.25, 0.5};
    s.coeffs.label = "gamma=1.5-0.5*clamp(sign(x)|x|^(1/4),-1,1), b=0";
    s.config = base_config(1.0, 1e-3, 0.01, {0.25, 0.5, 1.0});
    s.config.small_jump_drift = true;
  } else if (name == "lipschitz") {
    s.params = validate_params(1.5, 1.0, 1.0);
    s.coeffs = make_coefficients([](double x) { return 1.0 + 0.1 * std::min(std::abs(x), 10.0); },
                                 [](double x) { return -x; }, 1.5);
    s.coeffs.declared_growth = 3.0;
    s.coeffs.declared_holder = HolderDeclaration{1.0, 0.1};
    s.coeffs.label = "sigma=1+0.1*min(|x|,10), b=-x";
    s.config = base_config(2.0, 1e-2, 0.01, {0.25, 0.5, 0.75, 1.0, 1.5, 2.0});
  } else if (name == "holder") {
    s.params = validate_params(0.75, 1.0, 1.0);
    s.coeffs = make_coefficients_from_gamma([](double x) { return 1.0 + 0.5 * std::min(std::pow(std::abs(x), 0.75), 1.0); },
                                            [](double x) { return -x; }, 0.75);
    s.coeffs.declared_holder = HolderDeclaration{0.75, 0.5};
    s.coeffs.label = "gamma=1+0.5*min(|x|^0.75,1), b=-x";
    s.config = base_config(2.0, 1e-2, 0.01, {0.25, 0.5, 0.75, 1.0, 1.5, 2.0});
    s.config.small_jump_drift = true;
  } else if (name == "additive") {
    s.params = validate_params(1.5, 1.0, 1.0);
    s.coeffs = make_coefficients(constant_fn(1.0), constant_fn(0.0), 1.5);
    s.coeffs.declared_b_constant = true;
    s.coeffs.label = "sigma=1, b=0";
    s.config = base_config(4.0, 1e-2, 0.01, {1.0, 2.0, 4.0});
  } else if (name == "contraction") {
    s.params = validate_params(1.5, 1.0, 1.0);
    s.coeffs = make_coefficients([](double x) { return 1.0 + std::min(std::cbrt(x * x), 1.0); },
                                 [](double x) { return -x; }, 1.5);
    s.coeffs.declared_b_monotone = MonotoneClass::NonIncreasing;
    s.coeffs.declared_holder = HolderDeclaration{2.0 / 3.0, 1.0};
    s.coeffs.label = "sigma=1+min(|x|^(2/3),1), b=-x";
    s.config = base_config(50.0, 1e-2, 0.01, {});
  } else {
    fail(ErrorKind::InvalidArgument, "unknown scenario '" + std::string(name) + "'");
  }
  return s;
}

struct CouplingOptions {
  /// Every bias_stride-th path is re-run at (eps/2, euler_step/2); 0 disables.
  int bias_stride = 10;
};

inline void check_beta(const StableParams& p, double beta) {
  if (!(beta > 0.0 && beta < p.alpha()))
    fail(ErrorKind::DomainError, "beta must lie in (0, alpha); got " + format_double(beta));
}

/// Monte Carlo estimate of E|Delta_t|^beta at the configured checkpoints.
/// Path i uses seed sub_seed(config.seed, i), so estimates are bit-identical
/// for any worker count.
inline CouplingReport estimate_coupling_moment(const CoefficientSet& c, double x0, double x0_tilde,
                                               const StableParams& p, double beta, const SolveConfig& config,
                                               long n_paths, const CouplingOptions& opt = {}) {
  check_beta(p, beta);
  if (n_paths < 100) fail(ErrorKind::InsufficientPaths, "need at least 100 paths, got " + std::to_string(n_paths));
  validate(config, p.regime());
  const std::size_t n = static_cast<std::size_t>(n_paths);
  const std::size_t k = config.checkpoint_times.size();
  std::vector<double> f(n * k, 0.0);
  const bool want_bias = opt.bias_stride > 0 && x0 != x0_tilde;
  const std::size_t stride = want_bias ? static_cast<std::size_t>(opt.bias_stride) : 1;
  const std::size_t n_bias = want_bias ? (n + stride - 1) / stride : 0;
  std::vector<double> diff(n_bias * k, 0.0);

  parallel_for(n, [&](std::size_t i) {
    SolveConfig cfg = config;
    cfg.seed = sub_seed(config.seed, i);
    const auto coarse = simulate_coupled(c, p, x0, x0_tilde, cfg).result;
    for (std::size_t j = 0; j < k; ++j) f[i * k + j] = std::pow(std::abs(coarse.delta_at_checkpoints[j]), beta);
    if (want_bias && i % stride == 0) {
      cfg.euler_step *= 0.5;
      const auto fine = simulate_coupled(c, p, x0, x0_tilde, cfg, 1).result;
      for (std::size_t j = 0; j < k; ++j)
        diff[(i / stride) * k + j] = std::pow(std::abs(fine.delta_at_checkpoints[j]), beta) - f[i * k + j];
    }
  });

  CouplingReport r;
  r.beta_used = beta;
  r.initial_gap = std::abs(x0 - x0_tilde);
  std::vector<double> column(n), bias_column(n_bias);
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t i = 0; i < n; ++i) column[i] = f[i * k + j];
    const auto m = mean_and_se(column);
    CheckpointRow row;
    row.t = config.checkpoint_times[j];
    row.estimate = {m.mean, m.std_error, n_paths, 0.0};
    if (n_bias > 0) {
      for (std::size_t i = 0; i < n_bias; ++i) bias_column[i] = diff[i * k + j];
      row.estimate.bias_budget = std::abs(mean_and_se(bias_column).mean);
    }
    r.rows.push_back(row);
  }
  return r;
}

/// Critical exponent and theorem hypotheses for the equality case.
/// Returns beta or throws ScenarioAssumptionViolation.
inline double equality_beta(const Scenario& s) {
  const auto& p = s.params;
  const auto& c = s.coeffs;
  auto violation = [&](const std::string& why) -> void {
    fail(ErrorKind::ScenarioAssumptionViolation, s.name + ": " + why);
  };
  if (!c.declared_b_constant) violation("the equality case needs a constant drift b");
  const double lo = std::min(p.a_minus(), p.a_plus());
  const double hi = std::max(p.a_minus(), p.a_plus());
  double beta = 0.0;
  if (p.regime() == Regime::InfiniteVariation) {
    if (!p.symmetric()) {
      const MonotoneClass needed = p.a_plus() > p.a_minus() ? MonotoneClass::NonDecreasing : MonotoneClass::NonIncreasing;
      if (c.declared_monotone != needed) violation("(a+ - a-) sigma must be declared non-decreasing");
    }
    beta = beta_infinite(p.alpha(), lo / hi).value;
  } else {
    if (!(p.alpha() > 0.5)) violation("the finite-variation equality case needs alpha in (1/2,1)");
    const double bound = -std::cos(kPi * p.alpha());
    if (!(lo / hi < bound)) violation("min(a-,a+)/max(a-,a+) must be below |cos(pi alpha)|");
    const MonotoneClass needed = p.a_minus() < p.a_plus() ? MonotoneClass::NonIncreasing : MonotoneClass::NonDecreasing;
    if (c.declared_monotone != needed) violation("gamma must be declared monotone in the favourable direction");
    beta = beta_finite(p.alpha(), lo / hi).value;
  }
  if (c.declared_holder) {
    const double needed = required_holder_index(p, c.declared_monotone);
    if (c.declared_holder->index + 1e-12 < needed)
      violation("declared Hoelder index " + format_double(c.declared_holder->index) + " is below the required " +
                format_double(needed));
  }
  return beta;
}

/// E|Delta_t|^beta = |x - x~|^beta within 3 SE + bias budget at every checkpoint.
inline CouplingReport verify_equality_case(const Scenario& s, long n_paths, const CouplingOptions& opt = {}) {
  const double beta = equality_beta(s);
  auto r = estimate_coupling_moment(s.coeffs, s.x0, s.x0_tilde, s.params, beta, s.config, n_paths, opt);
  r.scenario = s.name;
  const double target = std::pow(std::abs(s.x0 - s.x0_tilde), beta);
  for (auto& row : r.rows) {
    row.target = target;
    const double tol = 3.0 * row.estimate.std_error + row.estimate.bias_budget;
    row.verdict = std::abs(row.estimate.mean - target) <= tol ? Verdict::Pass : Verdict::Fail;
  }
  return r;
}

struct GronwallReport {
  std::vector<double> gaps;
  std::vector<CouplingReport> per_gap;
  /// ratios[g][k] = E|Delta_{t_k}|^beta / gap^beta.
  std::vector<std::vector<double>> ratios;
  std::vector<double> spread;
  double fitted_c = 0.0;
  double log_slope = 0.0;
  bool bounded = false;
  bool envelope_holds = false;
  bool continuous = false;

  bool passed() const { return bounded && envelope_holds && continuous && std::isfinite(fitted_c); }
};

/// Bound case E|Delta_t|^beta <= gap^beta e^{Ct}. C is fitted on the first
/// half of the checkpoints and the envelope is tested on the second half.
inline GronwallReport verify_gronwall_bound(const CoefficientSet& c, std::vector<double> gaps, const StableParams& p,
                                            double beta, const SolveConfig& config, long n_paths, double x0 = 0.0,
                                            const std::string& name = "gronwall") {
  check_beta(p, beta);
  if (gaps.empty()) fail(ErrorKind::InvalidArgument, "no gaps");
  std::sort(gaps.begin(), gaps.end(), std::greater<>());
  const auto& times = config.checkpoint_times;
  if (times.size() < 2) fail(ErrorKind::InvalidArgument, "need at least two checkpoints to fit and test");
  const std::size_t half = times.size() / 2;

  GronwallReport g;
  g.gaps = gaps;
  CouplingOptions no_bias;
  no_bias.bias_stride = 0;
  for (double gap : gaps) {
    auto r = estimate_coupling_moment(c, x0, x0 + gap, p, beta, config, n_paths, no_bias);
    r.scenario = name + "/gap=" + format_double(gap);
    std::vector<double> ratio;
    for (const auto& row : r.rows) ratio.push_back(gap > 0.0 ? row.estimate.mean / std::pow(gap, beta) : 0.0);
    g.ratios.push_back(ratio);
    g.per_gap.push_back(std::move(r));
  }

  g.bounded = true;
  for (std::size_t k = 0; k < times.size(); ++k) {
    double lo = INFINITY, hi = 0.0;
    for (std::size_t i = 0; i < gaps.size(); ++i) {
      if (gaps[i] <= 0.0) continue;
      lo = std::min(lo, g.ratios[i][k]);
      hi = std::max(hi, g.ratios[i][k]);
    }
    const double spread = lo > 0.0 ? hi / lo : INFINITY;
    g.spread.push_back(spread);
    g.bounded = g.bounded && std::isfinite(spread) && spread < 10.0;
  }

  g.fitted_c = 0.0;
  std::vector<double> ts, logs;
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    if (gaps[i] <= 0.0) continue;
    for (std::size_t k = 0; k < times.size(); ++k) {
      if (times[k] <= 0.0 || !(g.ratios[i][k] > 0.0)) continue;
      if (k < half) g.fitted_c = std::max(g.fitted_c, std::log(g.ratios[i][k]) / times[k]);
      ts.push_back(times[k]);
      logs.push_back(std::log(g.ratios[i][k]));
    }
  }
  if (ts.size() >= 2) g.log_slope = least_squares(ts, logs).slope;

  g.envelope_holds = true;
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    const double base = std::pow(gaps[i], beta);
    for (std::size_t k = 0; k < times.size(); ++k) {
      auto& row = g.per_gap[i].rows[k];
      row.target = base * std::exp(g.fitted_c * times[k]);
      if (k < half) continue;
      const bool ok = row.estimate.mean <= row.target + 3.0 * row.estimate.std_error;
      row.verdict = ok ? Verdict::Pass : Verdict::Fail;
      g.envelope_holds = g.envelope_holds && ok;
    }
  }

  g.continuous = true;
  for (std::size_t i = 0; i + 1 < gaps.size(); ++i)
    for (std::size_t k = 0; k < times.size(); ++k) {
      const auto& big = g.per_gap[i].rows[k].estimate;
      const auto& small = g.per_gap[i + 1].rows[k].estimate;
      if (small.mean > big.mean + big.std_error + small.std_error) g.continuous = false;
    }
  return g;
}

struct MomentRow {
  double horizon = 0.0;
  McEstimate half;
  McEstimate full;
  bool stable = false;
};

struct MomentReport {
  double beta = 0.0;
  std::vector<MomentRow> rows;
  bool finite = false;
  bool non_decreasing = false;
  /// Largest log growth rate of the estimate per unit horizon between consecutive rows.
  double growth_rate = 0.0;

  bool passed() const {
    return finite && non_decreasing &&
           std::all_of(rows.begin(), rows.end(), [](const MomentRow& r) { return r.stable; });
  }
};

/// E sup_{[0,T]} |X_t|^beta for each horizon T, estimated with n_paths and
/// again with 2 n_paths (the first n_paths are shared).
inline MomentReport moment_boundedness_study(const CoefficientSet& c, double x0, const StableParams& p, double beta,
                                             std::vector<double> horizons, long n_paths, SolveConfig config) {
  check_beta(p, beta);
  if (n_paths < 100) fail(ErrorKind::InsufficientPaths, "need at least 100 paths, got " + std::to_string(n_paths));
  if (horizons.empty()) fail(ErrorKind::InvalidArgument, "no horizons");
  std::sort(horizons.begin(), horizons.end());
  config.horizon = horizons.back();
  config.checkpoint_times = horizons;
  validate(config, p.regime());

  const std::size_t n = 2 * static_cast<std::size_t>(n_paths);
  const std::size_t k = horizons.size();
  std::vector<double> f(n * k);
  parallel_for(n, [&](std::size_t i) {
    SolveConfig cfg = config;
    cfg.seed = sub_seed(config.seed, i);
    const auto path = simulate_path(c, p, x0, cfg).result;
    double running = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      running = std::max(running, path.interval_sup_abs[j]);
      f[i * k + j] = std::pow(running, beta);
    }
  });

  MomentReport r;
  r.beta = beta;
  r.finite = true;
  r.non_decreasing = true;
  std::vector<double> column;
  for (std::size_t j = 0; j < k; ++j) {
    column.clear();
    for (std::size_t i = 0; i < n; ++i) column.push_back(f[i * k + j]);
    const auto half = mean_and_se(std::span<const double>(column).first(n / 2));
    const auto full = mean_and_se(column);
    MomentRow row;
    row.horizon = horizons[j];
    row.half = {half.mean, half.std_error, n_paths, 0.0};
    row.full = {full.mean, full.std_error, static_cast<long>(n), 0.0};
    row.stable = std::abs(full.mean - half.mean) <= 2.0 * half.std_error;
    r.finite = r.finite && std::isfinite(full.mean) && std::isfinite(full.std_error);
    if (j > 0) {
      const auto& prev = r.rows.back().full;
      if (full.mean + 2.0 * full.std_error < prev.mean) r.non_decreasing = false;
      if (prev.mean > 0.0 && full.mean > 0.0)
        r.growth_rate = std::max(r.growth_rate, std::log(full.mean / prev.mean) / (horizons[j] - horizons[j - 1]));
    }
    r.rows.push_back(row);
  }
  return r;
}

struct ContractionConfig {
  CoefficientSet coeffs;
  double horizon = 50.0;
  std::vector<double> window_times;
  /// Modulus for the separation condition; checked on a grid when present.
  std::function<double(double)> rho;
  /// Last-window median must fall below threshold_fraction * |x - x~|.
  double threshold_fraction = 0.05;
  SolveConfig solver;
};

struct ContractionReport {
  std::vector<double> window_starts;
  std::vector<double> median_tail_sup;
  double threshold = 0.0;
  bool per_path_monotone = false;
  bool medians_monotone = false;
  bool below_threshold = false;
  /// Kolmogorov distance between the two terminal marginals (informational).
  double terminal_ks = 0.0;
  long n_paths = 0;

  bool passed() const { return per_path_monotone && medians_monotone && below_threshold; }
};

inline double median_of(std::vector<double> v) {
  if (v.empty()) return NAN;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) m = 0.5 * (m + *std::max_element(v.begin(), v.begin() + mid));
  return m;
}

/// Tracks s -> sup_{[s, horizon]} |Delta_t| for each window start s.
inline ContractionReport contraction_study(const ContractionConfig& cfg, const StableParams& p, double x0,
                                           double x0_tilde, long n_paths) {
  if (p.regime() != Regime::InfiniteVariation) fail(ErrorKind::RegimeMismatch, "contraction study needs alpha in (1,2)");
  if (!p.symmetric()) fail(ErrorKind::RegimeMismatch, "contraction study needs a- = a+");
  if (cfg.coeffs.declared_b_monotone != MonotoneClass::NonIncreasing)
    fail(ErrorKind::ScenarioAssumptionViolation, "b must be declared non-increasing");
  if (cfg.coeffs.declared_holder && cfg.coeffs.declared_holder->index + 1e-12 < 1.0 / p.alpha())
    fail(ErrorKind::ScenarioAssumptionViolation, "sigma must be Hoelder with index at least 1/alpha");
  if (n_paths < 1) fail(ErrorKind::InsufficientPaths, "need at least one path");
  const auto& w = cfg.window_times;
  if (w.empty()) fail(ErrorKind::InvalidArgument, "no window times");
  for (std::size_t i = 0; i < w.size(); ++i)
    if (!(w[i] >= 0.0 && w[i] <= cfg.horizon) || (i > 0 && !(w[i] > w[i - 1])))
      fail(ErrorKind::InvalidArgument, "window times must increase within [0, horizon]");

  if (cfg.rho) {
    const double alpha = p.alpha();
    for (int i = 0; i <= 80; ++i)
      for (int j = 0; j <= 80; ++j) {
        const double x = -4.0 + 0.1 * i, y = -4.0 + 0.1 * j + 0.0371;
        const double d = std::abs(x - y);
        const double lhs = std::pow(d, alpha - 2.0) *
                           (std::abs(cfg.coeffs.b(x) - cfg.coeffs.b(y)) +
                            std::pow(std::abs(cfg.coeffs.sigma(x) - cfg.coeffs.sigma(y)), alpha));
        if (lhs < cfg.rho(d) * (1.0 - 1e-12))
          fail(ErrorKind::ScenarioAssumptionViolation,
               "separation condition fails at x=" + format_double(x) + ", y=" + format_double(y));
      }
  }

  SolveConfig solver = cfg.solver;
  solver.horizon = cfg.horizon;
  solver.checkpoint_times = w;
  if (w.back() < cfg.horizon) solver.checkpoint_times.push_back(cfg.horizon);
  validate(solver, p.regime());
  const std::size_t nw = w.size();
  const std::size_t nc = solver.checkpoint_times.size();
  const std::size_t n = static_cast<std::size_t>(n_paths);
  std::vector<double> tail(n * nw);
  std::vector<double> end_x(n), end_y(n);
  std::vector<char> monotone(n, 1);

  parallel_for(n, [&](std::size_t i) {
    SolveConfig sc = solver;
    sc.seed = sub_seed(solver.seed, i);
    const auto r = simulate_coupled(cfg.coeffs, p, x0, x0_tilde, sc).result;
    // sup over [w_j, horizon] = max(|Delta(w_j)|, sups of the later intervals).
    double suffix = 0.0;
    for (std::size_t k = nc; k-- > 0;) {
      if (k < nw) {
        tail[i * nw + k] = std::max(suffix, std::abs(r.delta_at_checkpoints[k]));
        suffix = tail[i * nw + k];
      }
      if (k > 0) suffix = std::max(suffix, r.delta_interval_sup[k]);
    }
    for (std::size_t j = 1; j < nw; ++j)
      if (tail[i * nw + j] > tail[i * nw + j - 1]) monotone[i] = 0;
    end_x[i] = r.path_x.final_value;
    end_y[i] = r.path_x_tilde.final_value;
  });

  ContractionReport rep;
  rep.window_starts = w;
  rep.n_paths = n_paths;
  rep.threshold = cfg.threshold_fraction * std::abs(x0 - x0_tilde);
  rep.per_path_monotone = std::all_of(monotone.begin(), monotone.end(), [](char m) { return m != 0; });
  std::vector<double> column(n);
  for (std::size_t j = 0; j < nw; ++j) {
    for (std::size_t i = 0; i < n; ++i) column[i] = tail[i * nw + j];
    rep.median_tail_sup.push_back(median_of(column));
  }
  rep.medians_monotone = true;
  for (std::size_t j = 1; j < nw; ++j)
    if (rep.median_tail_sup[j] > rep.median_tail_sup[j - 1]) rep.medians_monotone = false;
  rep.below_threshold = x0 == x0_tilde ? rep.median_tail_sup.back() == 0.0
                                       : rep.median_tail_sup.back() < rep.threshold;

  std::sort(end_x.begin(), end_x.end());
  std::sort(end_y.begin(), end_y.end());
  std::size_t a = 0, b = 0;
  while (a < n && b < n) {
    if (end_x[a] <= end_y[b]) ++a;
    else ++b;
    rep.terminal_ks = std::max(rep.terminal_ks, std::abs(static_cast<double>(a) - static_cast<double>(b)) / n);
  }
  return rep;
}

inline ContractionConfig builtin_contraction_config() {
  const auto s = builtin_scenario("contraction");
  ContractionConfig cfg;
  cfg.coeffs = s.coeffs;
  cfg.horizon = s.config.horizon;
  for (int k = 0; k <= 10; ++k) cfg.window_times.push_back(5.0 * k);
  const double alpha = s.params.alpha();
  // b(x) = -x alone gives |x-y|^{alpha-1}.
  cfg.rho = [alpha](double r) { return std::pow(r, alpha - 1.0); };
  cfg.solver = s.config;
  return cfg;
}

}  // namespace stable_sde
