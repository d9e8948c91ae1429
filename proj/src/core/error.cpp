#include "core/error.hpp"

namespace tg {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument:          return "invalid_argument";
    case ErrorCode::DegenerateData:           return "degenerate_data";
    case ErrorCode::FitFailure:               return "fit_failure";
    case ErrorCode::InsufficientTrainingData: return "insufficient_training_data";
    case ErrorCode::PadsNotFound:             return "pads_not_found";
    case ErrorCode::AmbiguousAxis:            return "ambiguous_axis";
    case ErrorCode::Geometry:                 return "geometry";
    case ErrorCode::Parse:                    return "parse";
  }
  return "unknown";
}

}  // namespace tg
