#ifndef SVGAUGE_ERROR_H_
#define SVGAUGE_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace svgauge {

enum class ErrorCode {
  // vector-io
  kMalformedMarkup,
  kWrongRoot,
  kRenderFailure,
  // embedding backends
  kBackendUnavailable,
  kDimensionMismatch,
  kEmptyText,
  kEmptyCaption,
  kMissingCls,
  kInvalidExponent,
  // feature space / semantic similarity
  kEmptyCorpus,
  kDegenerateCorpus,
  kZeroVector,
  kAllEmptyTexts,
  kInvalidModel,
  // harness
  kSchemaViolation,
  kDuplicateId,
  kGenerationMissing,
  kLengthMismatch,
  kTooFew,
  kNoRatedRecords,
  kTooFewGenerators,
  kUndefinedCorrelation,
  kConfigError,
  kIoError,
};

// Coarse grouping used for process exit codes.
enum class ErrorClass { kData, kBackend };

std::string_view ErrorCodeName(ErrorCode code);
ErrorClass ClassOf(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace svgauge

#endif  // SVGAUGE_ERROR_H_
