#include "chromatex/error.hpp"

namespace chromatex {

std::string_view error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidColorSpace: return "InvalidColorSpace";
    case ErrorCode::InvalidBox: return "InvalidBox";
    case ErrorCode::BorderViolation: return "BorderViolation";
    case ErrorCode::ImageTooSmall: return "ImageTooSmall";
    case ErrorCode::EmptySequence: return "EmptySequence";
    case ErrorCode::DegenerateTrainingSet: return "DegenerateTrainingSet";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::NotEnoughSubjects: return "NotEnoughSubjects";
    case ErrorCode::EmptyScores: return "EmptyScores";
    case ErrorCode::ManifestError: return "ManifestError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::FormatError: return "FormatError";
    case ErrorCode::OutputExists: return "OutputExists";
  }
  return "Unknown";
}

}  // namespace chromatex
