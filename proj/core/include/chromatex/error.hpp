#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace chromatex {

/// Failure categories surfaced by the library. The CLI maps each one to a
/// distinct process exit code, so the numeric values are part of the
/// tool's contract and must not be reordered.
enum class ErrorCode {
  InvalidArgument = 1,
  InvalidColorSpace,
  InvalidBox,
  BorderViolation,
  ImageTooSmall,
  EmptySequence,
  DegenerateTrainingSet,
  DimMismatch,
  NotEnoughSubjects,
  EmptyScores,
  ManifestError,
  IoError,
  FormatError,
  OutputExists,
};

std::string_view error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace chromatex
