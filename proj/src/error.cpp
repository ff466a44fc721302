#include "simspace/error.hpp"

namespace simspace {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::MalformedCsv: return "MalformedCsv";
    case ErrorKind::AsymmetricMatrix: return "AsymmetricMatrix";
    case ErrorKind::NonzeroDiagonal: return "NonzeroDiagonal";
    case ErrorKind::NegativeEntry: return "NegativeEntry";
    case ErrorKind::DuplicateLabel: return "DuplicateLabel";
    case ErrorKind::Io: return "IoError";
    case ErrorKind::DegenerateConfiguration: return "DegenerateConfiguration";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::NonpositiveWeight: return "NonpositiveWeight";
    case ErrorKind::LabelMismatch: return "LabelMismatch";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::ConstantInput: return "ConstantInput";
    case ErrorKind::FoldTooSmall: return "FoldTooSmall";
    case ErrorKind::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorKind::Decode: return "DecodeError";
    case ErrorKind::InvalidBlockSize: return "InvalidBlockSize";
    case ErrorKind::EmptyTrainingSet: return "EmptyTrainingSet";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::IndivisibleGroups: return "IndivisibleGroups";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Config: return "ConfigError";
  }
  return "Unknown";
}

bool is_validation_error(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Io:
    case ErrorKind::Decode:
    case ErrorKind::UnsupportedFormat:
      return false;
    default:
      return true;
  }
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

}  // namespace simspace
