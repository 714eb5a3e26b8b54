#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pdpredict {

enum class ErrorCode {
  kMissingColumn,
  kHeaderMismatch,
  kNonNumericCell,
  kRangeViolation,
  kRatioMismatch,
  kDivisionByZeroDenominator,
  kFileNotFound,
  kIoError,
  kEmptyDataset,
  kMissingFeatureStats,
  kClassTooSmall,
  kBinsTooFew,
  kSingleClassTraining,
  kSingleClassWeight,
  kNonNormalizedInput,
  kNonFiniteFeature,
  kInconsistentCounts,
  kEmptyModel,
  kEmptyInput,
  kLengthMismatch,
  kSingleClassLabels,
  kEmptyMatrix,
  kEmptyCohort,
  kInvalidConfig,
  kMalformedModel,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMissingColumn: return "MissingColumn";
    case ErrorCode::kHeaderMismatch: return "HeaderMismatch";
    case ErrorCode::kNonNumericCell: return "NonNumericCell";
    case ErrorCode::kRangeViolation: return "RangeViolation";
    case ErrorCode::kRatioMismatch: return "RatioMismatch";
    case ErrorCode::kDivisionByZeroDenominator: return "DivisionByZeroDenominator";
    case ErrorCode::kFileNotFound: return "FileNotFound";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kEmptyDataset: return "EmptyDataset";
    case ErrorCode::kMissingFeatureStats: return "MissingFeatureStats";
    case ErrorCode::kClassTooSmall: return "ClassTooSmall";
    case ErrorCode::kBinsTooFew: return "BinsTooFew";
    case ErrorCode::kSingleClassTraining: return "SingleClassTraining";
    case ErrorCode::kSingleClassWeight: return "SingleClassWeight";
    case ErrorCode::kNonNormalizedInput: return "NonNormalizedInput";
    case ErrorCode::kNonFiniteFeature: return "NonFiniteFeature";
    case ErrorCode::kInconsistentCounts: return "InconsistentCounts";
    case ErrorCode::kEmptyModel: return "EmptyModel";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kSingleClassLabels: return "SingleClassLabels";
    case ErrorCode::kEmptyMatrix: return "EmptyMatrix";
    case ErrorCode::kEmptyCohort: return "EmptyCohort";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kMalformedModel: return "MalformedModel";
  }
  return "Unknown";
}

// Single exception type for the library. Data-level errors carry the
// offending 1-based data row and column name when known.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::size_t> row = std::nullopt,
        std::optional<std::string> column = std::nullopt)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code),
        row_(row),
        column_(std::move(column)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::optional<std::size_t>& row() const noexcept { return row_; }
  const std::optional<std::string>& column() const noexcept { return column_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> row_;
  std::optional<std::string> column_;
};

}  // namespace pdpredict
