#include "selbias/grid.hpp"

#include <cmath>
#include <cstdlib>

namespace selbias {

namespace {

double grid_number(const std::string& tok) {
  const char* begin = tok.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (tok.empty() || end != begin + tok.size() || !std::isfinite(v))
    fail(Errc::grid_syntax, "expected a number, got '" + tok + "'");
  return v;
}

std::vector<double> parse_range(const std::string& rhs) {
  const auto c1 = rhs.find(':');
  if (c1 == std::string::npos) return {grid_number(rhs)};
  const auto c2 = rhs.find(':', c1 + 1);
  if (c2 == std::string::npos) fail(Errc::grid_syntax, "range needs lo:step:hi, got '" + rhs + "'");
  const double lo = grid_number(rhs.substr(0, c1));
  const double step = grid_number(rhs.substr(c1 + 1, c2 - c1 - 1));
  const double hi = grid_number(rhs.substr(c2 + 1));
  if (step <= 0.0) fail(Errc::grid_syntax, "range step must be positive in '" + rhs + "'");
  std::vector<double> out;
  for (double v = lo; v <= hi + step * 1e-9; v += step) out.push_back(v);
  return out;
}

}  // namespace

std::vector<StudyParams> parse_grid(const std::string& spec) {
  std::vector<std::pair<std::string, std::vector<double>>> clauses;
  std::size_t pos = 0;
  while (pos <= spec.size()) {
    const auto semi = spec.find(';', pos);
    const std::string clause =
        spec.substr(pos, semi == std::string::npos ? std::string::npos : semi - pos);
    pos = semi == std::string::npos ? spec.size() + 1 : semi + 1;
    if (clause.empty()) continue;
    const auto eq = clause.find('=');
    if (eq == std::string::npos) fail(Errc::grid_syntax, "clause '" + clause + "' needs name=values");
    const std::string name = clause.substr(0, eq);
    static const char* known[] = {"alpha_x", "beta_x", "gamma_v", "beta_v", "gamma_f", "nu"};
    bool ok = false;
    for (const char* k : known) ok = ok || name == k;
    if (!ok) fail(Errc::grid_syntax, "unknown grid parameter '" + name + "'");
    for (const auto& c : clauses)
      if (c.first == name) fail(Errc::grid_syntax, "parameter '" + name + "' appears twice");
    clauses.emplace_back(name, parse_range(clause.substr(eq + 1)));
    if (clauses.back().second.empty())
      fail(Errc::empty_grid, "clause '" + clause + "' produces no values");
  }
  if (clauses.empty()) fail(Errc::grid_syntax, "empty grid specification");

  std::vector<StudyParams> grid{StudyParams{}};
  for (const auto& [name, values] : clauses) {
    std::vector<StudyParams> next;
    next.reserve(grid.size() * values.size());
    for (const StudyParams& base : grid)
      for (double v : values) {
        StudyParams p = base;
        if (name == "alpha_x") p.alpha_x = v;
        else if (name == "beta_x") p.beta_x = v;
        else if (name == "gamma_v") p.gamma_v = v;
        else if (name == "beta_v") p.beta_v = v;
        else if (name == "gamma_f") p.gamma_f = v;
        else p.nu = v;
        next.push_back(p);
      }
    grid = std::move(next);
  }
  if (grid.empty()) fail(Errc::empty_grid, "grid has no points");
  return grid;
}

std::vector<StudyParams> default_grid() {
  return parse_grid("alpha_x=0:1:3;beta_x=0:1:3;gamma_v=0:1:3");
}

}  // namespace selbias
