#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace maple {

enum class ErrorKind {
  RankDeficient,
  FullRankKernel,
  DependentColumns,
  LengthMismatch,
  TooLarge,
  BadBounds,
  ZeroDirection,
  InfeasibleStart,
  SchemaError,
  DimensionError,
  BoundsError,
  RankError,
  UnsupportedFeature,
  Io,
};

// Stable lowercase discriminator used in CLI error objects.
inline std::string_view error_tag(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::RankDeficient: return "rank_deficient";
    case ErrorKind::FullRankKernel: return "full_rank_kernel";
    case ErrorKind::DependentColumns: return "dependent_columns";
    case ErrorKind::LengthMismatch: return "length_mismatch";
    case ErrorKind::TooLarge: return "too_large";
    case ErrorKind::BadBounds: return "bad_bounds";
    case ErrorKind::ZeroDirection: return "zero_direction";
    case ErrorKind::InfeasibleStart: return "infeasible_start";
    case ErrorKind::SchemaError: return "schema";
    case ErrorKind::DimensionError: return "dimension";
    case ErrorKind::BoundsError: return "bounds";
    case ErrorKind::RankError: return "rank";
    case ErrorKind::UnsupportedFeature: return "unsupported_feature";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require_length(std::size_t got, std::size_t want,
                           std::string_view what) {
  if (got != want) {
    fail(ErrorKind::LengthMismatch,
         std::string(what) + ": expected length " + std::to_string(want) +
             ", got " + std::to_string(got));
  }
}

}  // namespace maple
