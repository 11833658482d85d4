#pragma once

#include <stdexcept>
#include <string>

namespace uwbfp {

enum class Errc {
  InvalidArgument,
  CollinearAnchors,
  NonFiniteRange,
  EmptySeries,
  DegeneratePair,
  NonPositiveSlope,
  InsufficientData,
  LabelOutOfRange,
  OutOfArea,
  EmptyTrainingSet,
  KOutOfRange,
  MismatchedTestPoints,
  MissingReferencePoint,
  Parse,
  Io,
};

const char* to_string(Errc code) noexcept;

/// Exception carrying a machine-checkable error category.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace uwbfp
