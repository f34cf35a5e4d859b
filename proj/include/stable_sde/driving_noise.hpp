#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <complex>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "coefficients.hpp"
#include "error.hpp"
#include "numeric.hpp"
#include "rng.hpp"
#include "stable_measure.hpp"

namespace stable_sde {

struct Event {
  double t = 0.0;
  double z = 0.0;
  /// Thinning mark; only meaningful when the stream carries a u_bound.
  double u = 0.0;
};

/// How a stream was assembled from independent layers. Layer (zi, ui) holds
/// the jumps with |z| in band zi of the epsilon ladder and |u| in band ui of
/// the u ladder, and is generated from sub_seed(seed, zi, ui) alone. Adding
/// layers therefore never changes the events already present, which is what
/// lets a solver refine epsilon or enlarge u_bound on the same noise.
struct StreamPlan {
  double epsilon0 = 1.0;
  /// Number of halvings below epsilon0; the stream's epsilon is epsilon0 / 2^z_levels.
  int z_levels = 0;
  /// Upper |u| edge of each u layer, increasing. Empty for the N-form.
  std::vector<double> u_ladder;

  double epsilon() const { return std::ldexp(epsilon0, -z_levels); }
};

struct EventStream {
  StableParams params = validate_params(1.5, 1.0, 1.0);
  double horizon = 0.0;
  double epsilon = 0.0;
  std::optional<double> u_bound;
  std::uint64_t seed = 0;
  StreamPlan plan;
  std::vector<Event> events;

  bool has_u() const { return u_bound.has_value(); }
};

/// Default cap on the expected number of events in one stream.
inline constexpr double kDefaultEventBudget = 2e7;

namespace noise_detail {

inline double z_band_mass(const StableParams& p, const StreamPlan& plan, int zi) {
  if (zi == 0) return tail_mass(p, TruncationLevel(plan.epsilon0));
  return band_mass(p, std::ldexp(plan.epsilon0, -zi), std::ldexp(plan.epsilon0, -zi + 1));
}

inline double u_width(const StreamPlan& plan, int ui) {
  if (plan.u_ladder.empty()) return 1.0;
  const double lo = ui == 0 ? 0.0 : plan.u_ladder[ui - 1];
  return 2.0 * (plan.u_ladder[ui] - lo);
}

inline void append_layer(const StableParams& p, const StreamPlan& plan, int zi, int ui, double horizon,
                         std::uint64_t seed, std::vector<Event>& out) {
  const double rate = z_band_mass(p, plan, zi) * u_width(plan, ui);
  if (!(rate > 0.0)) return;
  Rng rng(sub_seed(seed, static_cast<std::uint64_t>(zi), static_cast<std::uint64_t>(ui)));
  const double lo = std::ldexp(plan.epsilon0, -zi);
  const double hi = zi == 0 ? INFINITY : std::ldexp(plan.epsilon0, -zi + 1);
  const bool m_form = !plan.u_ladder.empty();
  const double u_lo = (m_form && ui > 0) ? plan.u_ladder[ui - 1] : 0.0;
  const double u_hi = m_form ? plan.u_ladder[ui] : 0.0;
  double t = 0.0;
  for (;;) {
    t += rng.exponential(rate);
    if (t > horizon) break;
    Event e;
    e.t = t;
    const double u_sign = rng.uniform_open();
    const double u_mag = rng.uniform_open();
    e.z = zi == 0 ? sample_jump_size(p, TruncationLevel(lo), u_sign, u_mag)
                  : sample_band_jump(p, lo, hi, u_sign, u_mag);
    if (m_form) {
      const double side = rng.uniform_open() < 0.5 ? -1.0 : 1.0;
      e.u = side * (u_lo + (u_hi - u_lo) * rng.uniform_open());
    }
    out.push_back(e);
  }
}

}  // namespace noise_detail

inline double expected_event_count(const StableParams& p, const StreamPlan& plan, double horizon) {
  double total = 0.0;
  const int u_layers = plan.u_ladder.empty() ? 1 : static_cast<int>(plan.u_ladder.size());
  for (int zi = 0; zi <= plan.z_levels; ++zi)
    for (int ui = 0; ui < u_layers; ++ui)
      total += noise_detail::z_band_mass(p, plan, zi) * noise_detail::u_width(plan, ui);
  return total * horizon;
}

/// Superposes every layer of the plan into one time-ordered stream.
inline EventStream generate_planned_stream(const StableParams& p, const StreamPlan& plan, double horizon,
                                           std::uint64_t seed, double max_expected_events = kDefaultEventBudget) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) fail(ErrorKind::InvalidArgument, "horizon must be > 0");
  if (plan.z_levels < 0) fail(ErrorKind::InvalidArgument, "z_levels must be >= 0");
  for (std::size_t i = 0; i < plan.u_ladder.size(); ++i)
    if (!(plan.u_ladder[i] > 0.0) || (i > 0 && !(plan.u_ladder[i] > plan.u_ladder[i - 1])))
      fail(ErrorKind::InvalidArgument, "u ladder must be positive and increasing");
  const double expected = expected_event_count(p, plan, horizon);
  if (!(expected <= max_expected_events))
    fail(ErrorKind::BudgetExceeded, "expected " + format_double(expected) + " events exceeds the budget of " +
                                        format_double(max_expected_events) + "; raise epsilon or lower u_bound");
  EventStream s{p, horizon, plan.epsilon(), std::nullopt, seed, plan, {}};
  if (!plan.u_ladder.empty()) s.u_bound = plan.u_ladder.back();
  s.events.reserve(static_cast<std::size_t>(expected + 6.0 * std::sqrt(expected) + 16.0));
  const int u_layers = plan.u_ladder.empty() ? 1 : static_cast<int>(plan.u_ladder.size());
  for (int zi = 0; zi <= plan.z_levels; ++zi)
    for (int ui = 0; ui < u_layers; ++ui) noise_detail::append_layer(p, plan, zi, ui, horizon, seed, s.events);
  if (plan.z_levels > 0 || u_layers > 1)
    std::stable_sort(s.events.begin(), s.events.end(), [](const Event& a, const Event& b) { return a.t < b.t; });
  return s;
}

/// Poisson events of N (no u_bound) or M (|u| <= u_bound) restricted to
/// |z| > eps on (0, horizon].
inline EventStream generate_event_stream(const StableParams& p, double eps, double horizon,
                                         std::optional<double> u_bound, std::uint64_t seed,
                                         double max_expected_events = kDefaultEventBudget) {
  TruncationLevel level(eps);
  StreamPlan plan;
  plan.epsilon0 = level.value();
  if (u_bound) {
    if (!(*u_bound > 0.0) || !std::isfinite(*u_bound)) fail(ErrorKind::InvalidArgument, "u_bound must be > 0");
    plan.u_ladder = {*u_bound};
  }
  return generate_planned_stream(p, plan, horizon, seed, max_expected_events);
}

/// The same noise with epsilon halved: the coarse events are kept and the
/// band eps/2 < |z| <= eps is superposed.
inline EventStream refine_event_stream(const EventStream& s, double max_expected_events = kDefaultEventBudget) {
  StreamPlan plan = s.plan;
  ++plan.z_levels;
  return generate_planned_stream(s.params, plan, s.horizon, s.seed, max_expected_events);
}

struct PathSkeleton {
  std::vector<double> times;
  std::vector<double> values;
  std::vector<bool> jump_flags;
  /// Value just before each entry; differs from values only at jumps.
  std::vector<double> left_limits;
  /// Constant slope between entries when the path is piecewise linear, NaN otherwise.
  double drift_rate = NAN;
  std::vector<double> checkpoint_times;
  std::vector<double> checkpoint_values;
  /// sup |value| over (t_{k-1}, t_k] for checkpoint k, with t_0 = 0 closed.
  std::vector<double> interval_sup_abs;
  double final_value = 0.0;

  void push(double t, double left, double value, bool jump) {
    times.push_back(t);
    left_limits.push_back(left);
    values.push_back(value);
    jump_flags.push_back(jump);
  }
};

inline void write_path_csv(std::ostream& out, const PathSkeleton& path) {
  out << "t,value,is_jump\n";
  for (std::size_t i = 0; i < path.times.size(); ++i)
    out << format_double(path.times[i]) << ',' << format_double(path.values[i]) << ','
        << (path.jump_flags[i] ? 1 : 0) << '\n';
}

/// Z_t = sum of z_i over t_i <= t, minus t * mu_eps when compensated.
inline PathSkeleton build_stable_path(const EventStream& s, const StableParams& p, bool compensate) {
  if (s.has_u())
    fail(ErrorKind::InvalidArgument, "build_stable_path needs an N-form stream (no u marks)");
  if (compensate != (p.regime() == Regime::InfiniteVariation))
    fail(ErrorKind::RegimeMismatch, compensate ? "compensation requested for alpha < 1"
                                               : "alpha in (1,2) requires the compensated sum");
  const double slope = compensate ? -truncation_drift(p, TruncationLevel(s.epsilon)) : 0.0;
  PathSkeleton path;
  path.drift_rate = slope;
  path.push(0.0, 0.0, 0.0, false);
  double jumps = 0.0;
  for (const Event& e : s.events) {
    const double left = jumps + slope * e.t;
    jumps += e.z;
    path.push(e.t, left, jumps + slope * e.t, true);
  }
  path.final_value = jumps + slope * s.horizon;
  if (path.times.back() < s.horizon) path.push(s.horizon, path.final_value, path.final_value, false);
  return path;
}

/// Terminal value Z_t of a truncated stable process, one stream per call.
inline double sample_stable_value(const StableParams& p, double eps, double t, std::uint64_t seed) {
  return build_stable_path(generate_event_stream(p, eps, t, std::nullopt, seed), p,
                           p.regime() == Regime::InfiniteVariation)
      .final_value;
}

struct ReconstructedZ {
  PathSkeleton z;
  /// |Delta Y - sigma(Y-) Delta Z| at every stream event, in stream order.
  std::vector<double> residuals;
  double max_residual = 0.0;
};

/// Recovers the driving stable process of a finite-variation solution from the
/// M-form stream it consumed: Delta Z = z / sigma(Y-) on the accepted gamma
/// band, and z 1{0<u<1} where sigma(Y-) = 0.
inline ReconstructedZ reconstruct_Z(const EventStream& s, const PathSkeleton& y, const CoefficientSet& coeffs,
                                    const StableParams& p) {
  if (!s.has_u()) fail(ErrorKind::InvalidArgument, "reconstruct_Z needs an M-form stream");
  if (p.regime() != Regime::FiniteVariation) fail(ErrorKind::RegimeMismatch, "reconstruct_Z is for alpha < 1");
  if (y.times.empty()) fail(ErrorKind::StreamPathMismatch, "empty path");

  ReconstructedZ out;
  out.z.drift_rate = 0.0;
  out.z.push(0.0, 0.0, 0.0, false);
  out.residuals.reserve(s.events.size());
  double z_sum = 0.0;
  std::size_t j = 0;
  for (const Event& e : s.events) {
    while (j < y.times.size() && y.times[j] < e.t) {
      if (y.jump_flags[j])
        fail(ErrorKind::StreamPathMismatch, "path jumps at t=" + format_double(y.times[j]) + " with no stream event");
      ++j;
    }
    if (j == y.times.size() || y.times[j] != e.t)
      fail(ErrorKind::StreamPathMismatch, "stream event at t=" + format_double(e.t) + " is missing from the path");
    const double left = y.left_limits[j];
    const double sig = coeffs.sigma(left);
    const double gam = coeffs.gamma(left);
    double dz = 0.0;
    if (sig != 0.0) {
      const double accepted = (0.0 < e.u && e.u < gam) ? 1.0 : ((gam < e.u && e.u < 0.0) ? -1.0 : 0.0);
      dz = accepted * e.z / sig;
    } else if (0.0 < e.u && e.u < 1.0) {
      dz = e.z;
    }
    const double dy = y.values[j] - left;
    const double r = std::abs(dy - sig * dz);
    out.residuals.push_back(r);
    out.max_residual = std::max(out.max_residual, r);
    const double before = z_sum;
    z_sum += dz;
    out.z.push(e.t, before, z_sum, dz != 0.0);
    ++j;
  }
  for (; j < y.times.size(); ++j)
    if (y.jump_flags[j])
      fail(ErrorKind::StreamPathMismatch, "path jumps at t=" + format_double(y.times[j]) + " with no stream event");
  out.z.final_value = z_sum;
  if (out.z.times.back() < s.horizon) out.z.push(s.horizon, z_sum, z_sum, false);
  return out;
}

/// Frequencies of the characteristic-function distance: 64 points on [-5, 5].
inline std::vector<double> ecf_grid() {
  std::vector<double> xi(64);
  for (int k = 0; k < 64; ++k) xi[k] = -5.0 + 10.0 * k / 63.0;
  return xi;
}

inline std::vector<std::complex<double>> empirical_cf(std::span<const double> sample) {
  const auto xi = ecf_grid();
  std::vector<std::complex<double>> out(xi.size());
  std::vector<double> re(sample.size()), im(sample.size());
  for (std::size_t k = 0; k < xi.size(); ++k) {
    for (std::size_t i = 0; i < sample.size(); ++i) {
      re[i] = std::cos(xi[k] * sample[i]);
      im[i] = std::sin(xi[k] * sample[i]);
    }
    const double n = static_cast<double>(sample.size());
    out[k] = {ordered_sum(re) / n, ordered_sum(im) / n};
  }
  return out;
}

/// Null distance between two independent 2e4-samples of the same truncated
/// stable law: the max over 40 calibration replicates (alpha 0.75 and 1.5,
/// eps 0.1, t 1) was 0.0261.
inline constexpr double kCfNullThreshold20k = 0.027;

/// sup over the frequency grid of |ecf_a - ecf_b|.
inline double self_similarity_distance(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) fail(ErrorKind::EmptySample, "characteristic-function distance needs samples");
  const auto ca = empirical_cf(a);
  const auto cb = empirical_cf(b);
  double worst = 0.0;
  for (std::size_t k = 0; k < ca.size(); ++k)
    worst = std::max(worst, std::hypot(ca[k].real() - cb[k].real(), ca[k].imag() - cb[k].imag()));
  return worst;
}

// Text form: header line, then one "t<TAB>z[<TAB>u]" line per event.

inline void write_event_stream(std::ostream& out, const EventStream& s) {
  out << "#levy-stream v1 alpha=" << format_double(s.params.alpha()) << " a-=" << format_double(s.params.a_minus())
      << " a+=" << format_double(s.params.a_plus()) << " eps=" << format_double(s.epsilon)
      << " T=" << format_double(s.horizon) << " seed=" << s.seed;
  if (s.u_bound) out << " u_bound=" << format_double(*s.u_bound);
  out << '\n';
  for (const Event& e : s.events) {
    out << format_double(e.t) << '\t' << format_double(e.z);
    if (s.u_bound) out << '\t' << format_double(e.u);
    out << '\n';
  }
}

inline std::string to_text(const EventStream& s) {
  std::ostringstream os;
  write_event_stream(os, s);
  return os.str();
}

inline EventStream read_event_stream(std::istream& in) {
  auto bad = [](const std::string& what) -> void { fail(ErrorKind::IoError, "event stream: " + what); };
  std::string line;
  if (!std::getline(in, line)) bad("missing header");
  std::istringstream hs(line);
  std::string tag, version;
  hs >> tag >> version;
  if (tag != "#levy-stream" || version != "v1") bad("unrecognised header '" + line + "'");

  std::optional<double> alpha, am, ap, eps, horizon, u_bound;
  std::optional<std::uint64_t> seed;
  std::string field;
  while (hs >> field) {
    const auto eq = field.find('=');
    if (eq == std::string::npos) bad("malformed header field '" + field + "'");
    const std::string key = field.substr(0, eq);
    const std::string value = field.substr(eq + 1);
    if (key == "seed") {
      std::uint64_t v = 0;
      auto res = std::from_chars(value.data(), value.data() + value.size(), v);
      if (res.ec != std::errc() || res.ptr != value.data() + value.size()) bad("bad seed '" + value + "'");
      seed = v;
      continue;
    }
    const auto v = parse_double(value);
    if (!v) bad("bad number in '" + field + "'");
    if (key == "alpha") alpha = v;
    else if (key == "a-") am = v;
    else if (key == "a+") ap = v;
    else if (key == "eps") eps = v;
    else if (key == "T") horizon = v;
    else if (key == "u_bound") u_bound = v;
    else bad("unknown header key '" + key + "'");
  }
  if (!alpha || !am || !ap || !eps || !horizon || !seed) bad("header is missing a required field");

  EventStream s{validate_params(*alpha, *am, *ap), *horizon, *eps, u_bound, *seed, {}, {}};
  s.plan.epsilon0 = *eps;
  if (u_bound) s.plan.u_ladder = {*u_bound};
  double last_t = 0.0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string_view> cols;
    std::string_view rest(line);
    for (;;) {
      const auto tab = rest.find('\t');
      cols.push_back(rest.substr(0, tab));
      if (tab == std::string_view::npos) break;
      rest.remove_prefix(tab + 1);
    }
    if (cols.size() != (u_bound ? 3u : 2u)) bad("wrong column count in '" + line + "'");
    Event e;
    const auto t = parse_double(cols[0]);
    const auto z = parse_double(cols[1]);
    if (!t || !z) bad("bad number in '" + line + "'");
    e.t = *t;
    e.z = *z;
    if (u_bound) {
      const auto u = parse_double(cols[2]);
      if (!u || std::abs(*u) > *u_bound) bad("u outside [-u_bound, u_bound] in '" + line + "'");
      e.u = *u;
    }
    if (!(e.t > last_t) || e.t > s.horizon) bad("event times must increase within (0, T]");
    if (!(std::abs(e.z) > s.epsilon)) bad("jump at or below eps in '" + line + "'");
    last_t = e.t;
    s.events.push_back(e);
  }
  return s;
}

inline EventStream from_text(const std::string& text) {
  std::istringstream is(text);
  return read_event_stream(is);
}

}  // namespace stable_sde
