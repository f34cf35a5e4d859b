#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <system_error>

namespace stable_sde {

inline constexpr double kPi = std::numbers::pi;

/// (1+x)^s - 1 for x > -1, accurate when x is tiny.
inline double pow1pm1(double x, double s) { return std::expm1(s * std::log1p(x)); }

/// (1+x)^s - 1 - s*x for x > -1. The binomial series is used on |x| < 1/2,
/// where the direct formula cancels catastrophically.
inline double pow1p_rem(double x, double s) {
  if (std::abs(x) < 0.5) {
    double term = s * (s - 1.0) * 0.5 * x * x;
    double sum = term;
    for (int k = 3; k < 200; ++k) {
      term *= (s - (k - 1)) / k * x;
      sum += term;
      if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
    }
    return sum;
  }
  return std::pow(1.0 + x, s) - 1.0 - s * x;
}

/// Shortest decimal representation that round-trips to the same double.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

/// Strict full-string parse; rejects trailing garbage and empty input.
inline std::optional<double> parse_double(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r'))
    text.remove_suffix(1);
  if (text.empty()) return std::nullopt;
  if (text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) return std::nullopt;
  return v;
}

/// Neumaier-compensated sum in index order. Used wherever results must be
/// independent of how the work was scheduled.
inline double ordered_sum(std::span<const double> values) {
  double sum = 0.0;
  double comp = 0.0;
  for (double v : values) {
    double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      comp += (sum - t) + v;
    else
      comp += (v - t) + sum;
    sum = t;
  }
  return sum + comp;
}

struct MeanSe {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Sample mean and standard error of the mean (n-1 normalisation).
inline MeanSe mean_and_se(std::span<const double> values) {
  MeanSe out;
  const std::size_t n = values.size();
  if (n == 0) return out;
  out.mean = ordered_sum(values) / static_cast<double>(n);
  if (n < 2) return out;
  double ss = 0.0;
  double comp = 0.0;
  for (double v : values) {
    double d = (v - out.mean) * (v - out.mean);
    double y = d - comp;
    double t = ss + y;
    comp = (t - ss) - y;
    ss = t;
  }
  out.std_error = std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
  return out;
}

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Ordinary least squares y = intercept + slope * x.
inline LinearFit least_squares(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  LinearFit fit;
  fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  fit.intercept = my - fit.slope * mx;
  return fit;
}

/// sin(pi x) with exact zeros at the integers.
inline double sin_pi(double x) {
  double r = std::fmod(x, 2.0);
  if (r > 1.0) r -= 2.0;
  if (r < -1.0) r += 2.0;
  if (r > 0.5) r = 1.0 - r;
  if (r < -0.5) r = -1.0 - r;
  return std::sin(kPi * r);
}

inline double sign_of(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace stable_sde
