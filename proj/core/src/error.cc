#include "svgauge/error.h"

namespace svgauge {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedMarkup: return "MalformedMarkup";
    case ErrorCode::kWrongRoot: return "WrongRoot";
    case ErrorCode::kRenderFailure: return "RenderFailure";
    case ErrorCode::kBackendUnavailable: return "BackendUnavailable";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kEmptyText: return "EmptyText";
    case ErrorCode::kEmptyCaption: return "EmptyCaption";
    case ErrorCode::kMissingCls: return "MissingCls";
    case ErrorCode::kInvalidExponent: return "InvalidExponent";
    case ErrorCode::kEmptyCorpus: return "EmptyCorpus";
    case ErrorCode::kDegenerateCorpus: return "DegenerateCorpus";
    case ErrorCode::kZeroVector: return "ZeroVector";
    case ErrorCode::kAllEmptyTexts: return "AllEmptyTexts";
    case ErrorCode::kInvalidModel: return "InvalidModel";
    case ErrorCode::kSchemaViolation: return "SchemaViolation";
    case ErrorCode::kDuplicateId: return "DuplicateId";
    case ErrorCode::kGenerationMissing: return "GenerationMissing";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kTooFew: return "TooFew";
    case ErrorCode::kNoRatedRecords: return "NoRatedRecords";
    case ErrorCode::kTooFewGenerators: return "TooFewGenerators";
    case ErrorCode::kUndefinedCorrelation: return "UndefinedCorrelation";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

ErrorClass ClassOf(ErrorCode code) {
  switch (code) {
    case ErrorCode::kBackendUnavailable:
      return ErrorClass::kBackend;
    default:
      return ErrorClass::kData;
  }
}

}  // namespace svgauge
