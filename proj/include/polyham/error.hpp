#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace polyham {

enum class ErrorCode {
  IndexOutOfRange,
  DuplicateEntry,
  MemoryCapExceeded,
  NonFiniteValue,
  DimensionMismatch,
  SizeMismatch,
  OrderTooSmall,
  OrderCapExceeded,
  OddDimension,
  OddOrder,
  NotHamiltonian,
  NotSupersymmetric,
  NotSymmetric,
  NotAnEquilibrium,
  NoConvergence,
  SingularJacobian,
  SyntaxError,
  ConstantTermNotAllowed,
  DegreeZeroRhs,
  DegreeTooLow,
  UnknownVariable,
  DimMismatch,
  FileError,
  UsageError,
};

constexpr const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::DuplicateEntry: return "DuplicateEntry";
    case ErrorCode::MemoryCapExceeded: return "MemoryCapExceeded";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::SizeMismatch: return "SizeMismatch";
    case ErrorCode::OrderTooSmall: return "OrderTooSmall";
    case ErrorCode::OrderCapExceeded: return "OrderCapExceeded";
    case ErrorCode::OddDimension: return "OddDimension";
    case ErrorCode::OddOrder: return "OddOrder";
    case ErrorCode::NotHamiltonian: return "NotHamiltonian";
    case ErrorCode::NotSupersymmetric: return "NotSupersymmetric";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::NotAnEquilibrium: return "NotAnEquilibrium";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::SingularJacobian: return "SingularJacobian";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::ConstantTermNotAllowed: return "ConstantTermNotAllowed";
    case ErrorCode::DegreeZeroRhs: return "DegreeZeroRhs";
    case ErrorCode::DegreeTooLow: return "DegreeTooLow";
    case ErrorCode::UnknownVariable: return "UnknownVariable";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::FileError: return "FileError";
    case ErrorCode::UsageError: return "UsageError";
  }
  return "UnknownError";
}

/// Location of a token in parsed source text. Lines and columns are 1-based,
/// col_end is inclusive.
struct SourceSpan {
  int line = 0;
  int col_begin = 0;
  int col_end = 0;
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  Error(ErrorCode code, const std::string& message, SourceSpan span)
      : std::runtime_error(std::string(to_string(code)) + " at " +
                           std::to_string(span.line) + ":" +
                           std::to_string(span.col_begin) + ": " + message),
        code_(code),
        span_(span) {}

  ErrorCode code() const noexcept { return code_; }
  const std::optional<SourceSpan>& span() const noexcept { return span_; }

 private:
  ErrorCode code_;
  std::optional<SourceSpan> span_;
};

}  // namespace polyham
