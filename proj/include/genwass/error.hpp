#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace genwass {

enum class ErrorCode {
  ShapeMismatch,
  NegativeEntry,
  NonzeroDiagonal,
  AsymmetricEntry,
  ZeroOffDiagonal,
  TriangleViolation,
  NotPermutation,
  MissingIdentity,
  NotClosed,
  NotInverseClosed,
  NotIsometry,
  SpaceMismatch,
  NegativeWeight,
  TargetIndexOutOfRange,
  IndexOutOfRange,
  InvalidParams,
  MassMismatch,
  InfeasibleInputs,
  GroupMismatch,
  NotInvariant,
  TooLarge,
  NotInteger,
  SolverFailure,
  ParseError,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NegativeEntry: return "NegativeEntry";
    case ErrorCode::NonzeroDiagonal: return "NonzeroDiagonal";
    case ErrorCode::AsymmetricEntry: return "AsymmetricEntry";
    case ErrorCode::ZeroOffDiagonal: return "ZeroOffDiagonal";
    case ErrorCode::TriangleViolation: return "TriangleViolation";
    case ErrorCode::NotPermutation: return "NotPermutation";
    case ErrorCode::MissingIdentity: return "MissingIdentity";
    case ErrorCode::NotClosed: return "NotClosed";
    case ErrorCode::NotInverseClosed: return "NotInverseClosed";
    case ErrorCode::NotIsometry: return "NotIsometry";
    case ErrorCode::SpaceMismatch: return "SpaceMismatch";
    case ErrorCode::NegativeWeight: return "NegativeWeight";
    case ErrorCode::TargetIndexOutOfRange: return "TargetIndexOutOfRange";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::MassMismatch: return "MassMismatch";
    case ErrorCode::InfeasibleInputs: return "InfeasibleInputs";
    case ErrorCode::GroupMismatch: return "GroupMismatch";
    case ErrorCode::NotInvariant: return "NotInvariant";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::NotInteger: return "NotInteger";
    case ErrorCode::SolverFailure: return "SolverFailure";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

/// Structured failure: the violated condition plus the indices that witness it.
///
/// `what()` renders as `Code(name,name,...): detail`, using point labels when the
/// thrower knows them.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::vector<std::size_t> indices, const std::string& message)
      : std::runtime_error(message), code_(code), indices_(std::move(indices)) {}

  Error(ErrorCode code, const std::string& message) : Error(code, {}, message) {}

  ErrorCode code() const noexcept { return code_; }
  const std::vector<std::size_t>& indices() const noexcept { return indices_; }

 private:
  ErrorCode code_;
  std::vector<std::size_t> indices_;
};

namespace detail {

inline std::string witness(ErrorCode code, const std::vector<std::string>& names,
                           std::string_view detail = {}) {
  std::string out{to_string(code)};
  out += '(';
  for (std::size_t k = 0; k < names.size(); ++k) {
    if (k) out += ',';
    out += names[k];
  }
  out += ')';
  if (!detail.empty()) {
    out += ": ";
    out += detail;
  }
  return out;
}

}  // namespace detail
}  // namespace genwass
