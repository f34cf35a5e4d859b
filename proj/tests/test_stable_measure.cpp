#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "stable_sde/rng.hpp"
#include "stable_sde/stable_measure.hpp"

using namespace stable_sde;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorKind::IoError;
}

}  // namespace

TEST(StableParams, ValidatesDomain) {
  const auto p = validate_params(1.5, 1, 1);
  EXPECT_EQ(p.regime(), Regime::InfiniteVariation);
  EXPECT_EQ(validate_params(0.75, 0, 1).regime(), Regime::FiniteVariation);
  EXPECT_EQ(kind_of([] { validate_params(1.0, 1, 1); }), ErrorKind::AlphaOutOfRange);
  EXPECT_EQ(kind_of([] { validate_params(2.0, 1, 1); }), ErrorKind::AlphaOutOfRange);
  EXPECT_EQ(kind_of([] { validate_params(0.0, 1, 1); }), ErrorKind::AlphaOutOfRange);
  EXPECT_EQ(kind_of([] { validate_params(1.5, -1, 1); }), ErrorKind::NegativeIntensity);
  EXPECT_EQ(kind_of([] { validate_params(1.5, 0, 0); }), ErrorKind::ZeroMeasure);
  EXPECT_EQ(kind_of([] { TruncationLevel(0.0); }), ErrorKind::InvalidArgument);
}

// Reference values from tests/oracle/mp_oracle.py (mpmath quadrature).
TEST(StableMeasure, OracleValues) {
  EXPECT_NEAR(tail_mass(validate_params(0.5, 1, 1), TruncationLevel(1)), 4.0, 1e-14);
  EXPECT_NEAR(tail_mass(validate_params(1.5, 0, 1), TruncationLevel(1)), 2.0 / 3.0, 1e-14);
  EXPECT_NEAR(truncation_drift(validate_params(1.5, 0, 1), TruncationLevel(0.01)), 20.0, 1e-12);
  EXPECT_NEAR(truncation_drift(validate_params(1.5, 1, 0), TruncationLevel(0.01)), -20.0, 1e-12);
  EXPECT_EQ(truncation_drift(validate_params(1.5, 1, 1), TruncationLevel(0.01)), 0.0);
  EXPECT_NEAR(small_jump_variance(validate_params(1.5, 1, 1), TruncationLevel(1)), 4.0, 1e-14);
  EXPECT_EQ(kind_of([] { truncation_drift(validate_params(0.5, 0, 1), TruncationLevel(1)); }),
            ErrorKind::WrongRegime);
  EXPECT_EQ(kind_of([] { tail_mass(validate_params(1.9, 1, 1), TruncationLevel(1e-200)); }), ErrorKind::Overflow);
}

TEST(StableMeasure, Homogeneity) {
  for (double alpha : {0.3, 0.75, 1.2, 1.5, 1.9}) {
    for (auto [am, ap] : {std::pair{1.0, 1.0}, {0.0, 2.0}, {0.3, 1.7}}) {
      const auto p = validate_params(alpha, am, ap);
      for (double eps : {1e-3, 0.1, 1.0, 7.0}) {
        for (double c : {0.5, 2.0, 10.0}) {
          const TruncationLevel e1(eps), e2(c * eps);
          EXPECT_NEAR(tail_mass(p, e2) / tail_mass(p, e1), std::pow(c, -alpha), 1e-12 * std::pow(c, -alpha));
          EXPECT_NEAR(small_jump_variance(p, e2) / small_jump_variance(p, e1), std::pow(c, 2 - alpha),
                      1e-12 * std::pow(c, 2 - alpha));
          if (alpha > 1 && am != ap) {
            EXPECT_NEAR(truncation_drift(p, e2) / truncation_drift(p, e1), std::pow(c, 1 - alpha),
                        1e-12 * std::pow(c, 1 - alpha));
          }
        }
      }
    }
  }
}

TEST(StableMeasure, ExchangeSymmetry) {
  const auto p = validate_params(1.4, 0.3, 1.2);
  const auto q = p.mirrored();
  const TruncationLevel eps(0.05);
  EXPECT_DOUBLE_EQ(tail_mass(p, eps), tail_mass(q, eps));
  EXPECT_DOUBLE_EQ(small_jump_variance(p, eps), small_jump_variance(q, eps));
  EXPECT_DOUBLE_EQ(truncation_drift(p, eps), -truncation_drift(q, eps));
}

TEST(SampleJumpSize, InverseTransform) {
  const auto p = validate_params(0.5, 1, 1);
  EXPECT_NEAR(sample_jump_size(p, TruncationLevel(0.1), 0.9, 0.25), 1.6, 1e-14);
  EXPECT_LT(sample_jump_size(p, TruncationLevel(0.1), 0.1, 0.25), 0.0);
  const auto one_sided = validate_params(0.5, 0, 1);
  for (double us : {1e-9, 0.3, 0.999999}) EXPECT_GT(sample_jump_size(one_sided, TruncationLevel(1), us, 0.5), 0);
  EXPECT_NEAR(std::abs(sample_jump_size(p, TruncationLevel(0.1), 0.9, 1 - 1e-12)), 0.1, 1e-12);
}

TEST(SampleJumpSize, TailMatchesPowerLawKs) {
  const auto p = validate_params(1.3, 0.4, 1.0);
  const TruncationLevel eps(0.2);
  Rng rng(12345);
  const std::size_t n = 100000;
  std::vector<double> mags(n);
  std::size_t negatives = 0;
  for (auto& m : mags) {
    const double z = sample_jump_size(p, eps, rng.uniform_open(), rng.uniform_open());
    negatives += z < 0;
    m = std::abs(z);
  }
  std::sort(mags.begin(), mags.end());
  double ks = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double cdf = 1.0 - std::pow(mags[i] / 0.2, -1.3);
    ks = std::max({ks, std::abs(cdf - double(i) / n), std::abs(cdf - double(i + 1) / n)});
  }
  EXPECT_LT(ks, 1.63 / std::sqrt(double(n)));
  const double frac = double(negatives) / n, target = 0.4 / 1.4;
  EXPECT_NEAR(frac, target, 4 * std::sqrt(target * (1 - target) / n));
}

TEST(SampleBandJump, StaysInBand) {
  const auto p = validate_params(1.5, 1, 1);
  Rng rng(7);
  for (int i = 0; i < 10000; ++i) {
    const double z = sample_band_jump(p, 0.01, 0.02, rng.uniform_open(), rng.uniform_open());
    EXPECT_GT(std::abs(z), 0.01);
    EXPECT_LE(std::abs(z), 0.02 * (1 + 1e-15));
  }
  EXPECT_NEAR(band_mass(p, 0.01, 0.02), tail_mass(p, TruncationLevel(0.01)) - tail_mass(p, TruncationLevel(0.02)),
              1e-9);
}
