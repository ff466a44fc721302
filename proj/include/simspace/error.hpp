#pragma once

#include <stdexcept>
#include <string>

namespace simspace {

enum class ErrorKind {
  MalformedCsv,
  AsymmetricMatrix,
  NonzeroDiagonal,
  NegativeEntry,
  DuplicateLabel,
  Io,
  DegenerateConfiguration,
  EmptyInput,
  NonpositiveWeight,
  LabelMismatch,
  DimensionMismatch,
  ConstantInput,
  FoldTooSmall,
  UnsupportedFormat,
  Decode,
  InvalidBlockSize,
  EmptyTrainingSet,
  ShapeMismatch,
  IndivisibleGroups,
  InvalidArgument,
  Config,
};

const char* to_string(ErrorKind kind) noexcept;

// Errors caused by bad input data or options; everything else (I/O,
// decoding) is a runtime failure. The CLI maps these to exit codes 1 and 2.
bool is_validation_error(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace simspace
