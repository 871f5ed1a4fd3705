#pragma once

#include <string>
#include <vector>

#include "selbias/study.hpp"

namespace selbias {

/// Grid specification: `name=value` or `name=lo:step:hi` clauses joined by
/// `;` over {alpha_x, beta_x, gamma_v, beta_v, gamma_f, nu}. The Cartesian
/// product is taken in clause order, first clause outermost. Omitted
/// parameters keep their defaults (alpha_x = beta_x = gamma_v = 0,
/// beta_v = 1, gamma_f = 4, nu = 13, offset_sign = -1).
std::vector<StudyParams> parse_grid(const std::string& spec);

/// alpha_x, beta_x and gamma_v each swept over {0, 1, 2, 3}.
std::vector<StudyParams> default_grid();

}  // namespace selbias
