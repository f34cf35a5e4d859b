#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace stable_sde {

enum class ErrorKind {
  AlphaOutOfRange,
  NegativeIntensity,
  ZeroMeasure,
  Overflow,
  WrongRegime,
  DomainError,
  NonConvergence,
  InsufficientPoints,
  DivergentSequence,
  BudgetExceeded,
  RegimeMismatch,
  StreamPathMismatch,
  EmptySample,
  Blowup,
  DominationExceeded,
  GrowthViolation,
  InsufficientPaths,
  ScenarioAssumptionViolation,
  SyntaxError,
  UnknownIdentifier,
  EvalError,
  DegenerateSample,
  ConfigError,
  InvalidArgument,
  IoError,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::AlphaOutOfRange: return "AlphaOutOfRange";
    case ErrorKind::NegativeIntensity: return "NegativeIntensity";
    case ErrorKind::ZeroMeasure: return "ZeroMeasure";
    case ErrorKind::Overflow: return "Overflow";
    case ErrorKind::WrongRegime: return "WrongRegime";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::InsufficientPoints: return "InsufficientPoints";
    case ErrorKind::DivergentSequence: return "DivergentSequence";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::RegimeMismatch: return "RegimeMismatch";
    case ErrorKind::StreamPathMismatch: return "StreamPathMismatch";
    case ErrorKind::EmptySample: return "EmptySample";
    case ErrorKind::Blowup: return "Blowup";
    case ErrorKind::DominationExceeded: return "DominationExceeded";
    case ErrorKind::GrowthViolation: return "GrowthViolation";
    case ErrorKind::InsufficientPaths: return "InsufficientPaths";
    case ErrorKind::ScenarioAssumptionViolation: return "ScenarioAssumptionViolation";
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::UnknownIdentifier: return "UnknownIdentifier";
    case ErrorKind::EvalError: return "EvalError";
    case ErrorKind::DegenerateSample: return "DegenerateSample";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

/// Base exception for every failure raised by the library. The kind is the
/// stable, machine-checkable part; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised by the finite-variation solvers when |gamma| leaves the u-band of
/// the driving stream. Carries the largest |gamma| seen so the caller can
/// regenerate with a sufficient bound.
class DominationError : public Error {
 public:
  DominationError(double high_water, double u_bound)
      : Error(ErrorKind::DominationExceeded,
              "|gamma| reached " + std::to_string(high_water) + " above u_bound " +
                  std::to_string(u_bound)),
        high_water_(high_water) {}

  double high_water() const noexcept { return high_water_; }

 private:
  double high_water_;
};

/// Parse failure in the coefficient language, with the byte offset of the
/// offending token and a human-readable list of what was expected there.
class ParseError : public Error {
 public:
  ParseError(ErrorKind kind, std::size_t offset, std::string expected, const std::string& what)
      : Error(kind, what + " at offset " + std::to_string(offset) +
                        (expected.empty() ? std::string() : " (expected " + expected + ")")),
        offset_(offset),
        expected_(std::move(expected)) {}

  std::size_t offset() const noexcept { return offset_; }
  const std::string& expected() const noexcept { return expected_; }

 private:
  std::size_t offset_;
  std::string expected_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace stable_sde
