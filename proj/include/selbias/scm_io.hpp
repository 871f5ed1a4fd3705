#pragma once

#include <iosfwd>
#include <string>

#include "selbias/scm.hpp"

namespace selbias {

/// SCM text format, one variable per line:
///   var <name> parents <p1> <p2> ... : bernoulli <p>
///                                    | logistic <intercept> <coef1> ...
///                                    | and
///                                    | or
///                                    | table <v...>   (2^parents values,
///                                      P(var=1) for parent bits big-endian
///                                      in declared order)
/// `#` starts a comment. Parents may be declared after use; the graph is
/// assembled once the whole file is read.
DiscreteScm parse_scm_text(std::istream& in, const std::string& filename);
DiscreteScm parse_scm_file(const std::string& path);

}  // namespace selbias
