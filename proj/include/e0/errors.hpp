#pragma once

#include <stdexcept>
#include <string>

namespace e0 {

enum class ErrorKind {
  DimensionMismatch,
  NotHermitian,
  NotAProjection,
  NotMember,
  UnitalityViolation,
  MultiplicativityViolation,
  AdjointViolation,
  NotIncreasing,
  CommutationViolation,
  CocycleIdentityViolation,
  ZeroEntry,
  NotStabilized,
  InvalidModel,
  SearchExhausted,
  // Internal consistency failures: a theorem-level cross-check did not hold.
  FactorizationMismatch,
  InvariantViolation,
};

inline const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

  /// True for failures that indicate a bug or tolerance breakdown rather than bad input.
  bool internal() const {
    return kind_ == ErrorKind::FactorizationMismatch || kind_ == ErrorKind::InvariantViolation;
  }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NotAProjection: return "NotAProjection";
    case ErrorKind::NotMember: return "NotMember";
    case ErrorKind::UnitalityViolation: return "UnitalityViolation";
    case ErrorKind::MultiplicativityViolation: return "MultiplicativityViolation";
    case ErrorKind::AdjointViolation: return "AdjointViolation";
    case ErrorKind::NotIncreasing: return "NotIncreasing";
    case ErrorKind::CommutationViolation: return "CommutationViolation";
    case ErrorKind::CocycleIdentityViolation: return "CocycleIdentityViolation";
    case ErrorKind::ZeroEntry: return "ZeroEntry";
    case ErrorKind::NotStabilized: return "NotStabilized";
    case ErrorKind::InvalidModel: return "InvalidModel";
    case ErrorKind::SearchExhausted: return "SearchExhausted";
    case ErrorKind::FactorizationMismatch: return "FactorizationMismatch";
    case ErrorKind::InvariantViolation: return "InvariantViolation";
  }
  return "Unknown";
}

}  // namespace e0
