#include "uwbfp/error.hpp"

namespace uwbfp {

const char* to_string(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::CollinearAnchors: return "CollinearAnchors";
    case Errc::NonFiniteRange: return "NonFiniteRange";
    case Errc::EmptySeries: return "EmptySeries";
    case Errc::DegeneratePair: return "DegeneratePair";
    case Errc::NonPositiveSlope: return "NonPositiveSlope";
    case Errc::InsufficientData: return "InsufficientData";
    case Errc::LabelOutOfRange: return "LabelOutOfRange";
    case Errc::OutOfArea: return "OutOfArea";
    case Errc::EmptyTrainingSet: return "EmptyTrainingSet";
    case Errc::KOutOfRange: return "KOutOfRange";
    case Errc::MismatchedTestPoints: return "MismatchedTestPoints";
    case Errc::MissingReferencePoint: return "MissingReferencePoint";
    case Errc::Parse: return "Parse";
    case Errc::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace uwbfp
