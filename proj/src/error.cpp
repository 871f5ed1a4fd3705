#include "selbias/error.hpp"

namespace selbias {

ErrorClass classify(Errc code) {
  switch (code) {
    case Errc::grid_syntax:
    case Errc::empty_grid:
      return ErrorClass::usage;
    case Errc::parse:
      return ErrorClass::parse;
    case Errc::zero_conditioning_event:
    case Errc::positivity_violation:
    case Errc::numerical_overflow:
      return ErrorClass::numeric;
    default:
      return ErrorClass::validation;
  }
}

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::parse: return "ParseError";
    case Errc::grid_syntax: return "GridSyntax";
    case Errc::empty_grid: return "EmptyGrid";
    case Errc::cycle_detected: return "CycleDetected";
    case Errc::unknown_endpoint: return "UnknownEndpoint";
    case Errc::duplicate_node: return "DuplicateNode";
    case Errc::duplicate_edge: return "DuplicateEdge";
    case Errc::unknown_node: return "UnknownNode";
    case Errc::invalid_name: return "InvalidName";
    case Errc::name_clash: return "NameClash";
    case Errc::overlapping_sets: return "OverlappingSets";
    case Errc::invalid_query: return "InvalidQuery";
    case Errc::invalid_params: return "InvalidParams";
    case Errc::arity_mismatch: return "ArityMismatch";
    case Errc::too_large: return "TooLarge";
    case Errc::zero_conditioning_event: return "ZeroConditioningEvent";
    case Errc::positivity_violation: return "PositivityViolation";
    case Errc::numerical_overflow: return "NumericalOverflow";
  }
  return "Error";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

void fail(Errc code, const std::string& message) { throw Error(code, message); }

}  // namespace selbias
