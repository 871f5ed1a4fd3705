#pragma once

#include <stdexcept>
#include <string>

namespace selbias {

enum class Errc {
  // text input
  parse,
  grid_syntax,
  empty_grid,
  // graph / model validation
  cycle_detected,
  unknown_endpoint,
  duplicate_node,
  duplicate_edge,
  unknown_node,
  invalid_name,
  name_clash,
  overlapping_sets,
  invalid_query,
  invalid_params,
  arity_mismatch,
  too_large,
  // numeric failures
  zero_conditioning_event,
  positivity_violation,
  numerical_overflow,
};

/// Broad failure categories; the CLI maps them one-to-one onto exit codes.
enum class ErrorClass { usage = 1, parse = 2, validation = 3, numeric = 4 };

ErrorClass classify(Errc code);
const char* errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);
  Errc code() const { return code_; }
  ErrorClass error_class() const { return classify(code_); }

 private:
  Errc code_;
};

[[noreturn]] void fail(Errc code, const std::string& message);

}  // namespace selbias
