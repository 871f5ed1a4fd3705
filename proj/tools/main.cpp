#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "selbias/graph_io.hpp"
#include "selbias/grid.hpp"
#include "selbias/recoverability.hpp"
#include "selbias/scm_io.hpp"
#include "selbias/study.hpp"

namespace {

using namespace selbias;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// --query "P(F=1 | X=1, A=1)" or "P(R=1 | do(X=1), W=0)"
struct EvalQuery {
  std::map<NodeId, int> targets;
  std::map<NodeId, int> given;
  std::map<NodeId, int> interventions;
};

EvalQuery parse_query(const std::string& text) {
  auto bad = [&](const std::string& what) {
    fail(Errc::parse, "query '" + text + "': " + what);
  };
  std::string s;
  for (char c : text)
    if (c != ' ' && c != '\t') s += c;
  if (s.size() < 4 || s.compare(0, 2, "P(") != 0 || s.back() != ')')
    bad("expected P(...)");
  s = s.substr(2, s.size() - 3);
  const auto bar = s.find('|');
  const std::string thead = s.substr(0, bar);
  const std::string tail = bar == std::string::npos ? "" : s.substr(bar + 1);

  auto parse_assign = [&](const std::string& item, std::map<NodeId, int>& into) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) bad("expected name=bit in '" + item + "'");
    const std::string name = item.substr(0, eq);
    const std::string bit = item.substr(eq + 1);
    if (bit != "0" && bit != "1") bad("value must be 0 or 1 in '" + item + "'");
    if (!is_bare_node_name(name)) bad("invalid variable name '" + name + "'");
    into[name] = bit == "1" ? 1 : 0;
  };
  auto split_commas = [&](const std::string& part) {
    std::vector<std::string> items;
    std::size_t pos = 0;
    int depth = 0;
    std::string cur;
    while (pos < part.size()) {
      const char c = part[pos++];
      if (c == '(') ++depth;
      if (c == ')') --depth;
      if (c == ',' && depth == 0) {
        items.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    if (!cur.empty()) items.push_back(cur);
    return items;
  };

  EvalQuery q;
  for (const std::string& item : split_commas(thead)) parse_assign(item, q.targets);
  if (q.targets.empty()) bad("no target assignment");
  for (const std::string& item : split_commas(tail)) {
    if (item.compare(0, 3, "do(") == 0 && item.back() == ')')
      parse_assign(item.substr(3, item.size() - 4), q.interventions);
    else
      parse_assign(item, q.given);
  }
  return q;
}

int cmd_check(const std::string& file, const std::string& exposure, const std::string& outcome,
              const std::vector<std::string>& adjust, const std::string& selection) {
  const ParsedDag parsed = parse_dag_file(file);
  NodeId sel;
  if (parsed.selection) {
    sel = *parsed.selection;
    if (!selection.empty() && selection != sel)
      fail(Errc::invalid_query, "--selection disagrees with the file's snode '" + sel + "'");
  } else {
    if (selection.empty())
      fail(Errc::invalid_query, file + " declares no snode; pass --selection");
    sel = selection;
  }
  const SelectionDag gs = SelectionDag::make(parsed.dag, sel);
  Query q{exposure, outcome, std::set<NodeId>(adjust.begin(), adjust.end()), sel};
  std::cout << render_report(recoverability_report(gs, q));
  return 0;
}

int cmd_eval(const std::string& file, const std::string& query_text) {
  const DiscreteScm m = parse_scm_file(file);
  const EvalQuery q = parse_query(query_text);
  const DiscreteScm target = q.interventions.empty() ? m : intervene(m, q.interventions);
  const double p = prob(joint(target), q.targets, q.given);
  std::cout << fmt(p) << "\n";
  return 0;
}

int cmd_sweep(const std::string& grid_spec, bool paper_default, const std::string& out_path,
              std::size_t mc_n, std::uint64_t seed) {
  if (paper_default == !grid_spec.empty())
    fail(Errc::grid_syntax, "pass exactly one of --grid and --paper-default");
  const std::vector<StudyParams> grid = paper_default ? default_grid() : parse_grid(grid_spec);
  const std::vector<SweepRow> rows =
      mc_n > 0 ? sweep_monte_carlo(grid, mc_n, seed) : sweep(grid);
  const std::string csv = sweep_csv(rows);
  std::ofstream out(out_path, std::ios::binary);
  if (!out) fail(Errc::parse, out_path + ": cannot open for writing");
  out << csv;
  std::size_t failed = 0;
  for (const SweepRow& r : rows)
    if (!r.ok) {
      ++failed;
      std::cerr << "row flagged: " << r.error << "\n";
    }
  std::cout << rows.size() << " rows written to " << out_path;
  if (failed > 0) std::cout << " (" << failed << " flagged)";
  std::cout << "\n";
  return 0;
}

int cmd_paf(const std::string& file, const std::string& exposure, const std::string& outcome,
            const std::vector<std::string>& adjust) {
  const DiscreteScm m = parse_scm_file(file);
  const PafResult r = paf(m, exposure, outcome, std::set<NodeId>(adjust.begin(), adjust.end()));
  std::cout << "PAF exact:  " << fmt(r.paf_exact) << "\n";
  std::cout << "PAF approx: " << fmt(r.paf_approx) << " (odds-ratio surrogate)\n";
  for (const PafStratum& st : r.components) {
    std::cout << "stratum {";
    for (std::size_t i = 0; i < st.w_bits.size(); ++i)
      std::cout << (i ? "," : "") << st.w_bits[i];
    std::cout << "}: p1w=" << fmt(st.share[1]) << " RR1w=" << fmt(st.risk_ratio[1])
              << " OR1w=" << fmt(st.odds_ratio) << "\n";
  }
  return 0;
}

int cmd_demo(const std::string& which) {
  if (which == "appendix-d") {
    const DemoReport r = appendix_d_demo();
    std::cout << "chain X -> A -> R with selection S = A\n";
    std::cout << "P(R_1=1) by intervention:        " << fmt(r.p_r1_do) << "\n";
    std::cout << "sum_s P(R=1|S=s) P(S=s):         " << fmt(r.mixture) << "\n";
    std::cout << "difference:                      " << fmt(r.difference) << "\n";
    std::cout << "ACE:                             " << fmt(r.ace) << "\n";
    std::cout << "ACE via back-door cross-check:   " << fmt(r.ace_adjusted) << "\n";
    std::cout << "difference with zeroed exposure: " << fmt(r.zeroed_difference) << "\n";
    return 0;
  }
  if (which == "appendix-e") {
    StudyParams p;
    p.alpha_x = 2.0;
    p.beta_x = 1.0;
    p.gamma_v = 2.0;
    p.nu = 0.0;
    const CfReport r = cf_independence_check(p);
    std::cout << "confounder-augmented model at alpha_x=2, beta_x=1, gamma_v=2, nu=0\n";
    std::cout << "violation of R_x _||_ X | (W, A_x), x=0: " << fmt(r.coupled_violation[0]) << "\n";
    std::cout << "violation of R_x _||_ X | (W, A_x), x=1: " << fmt(r.coupled_violation[1]) << "\n";
    std::cout << "max |P(R=1|X=x,W,A=1) - P(R_x=1|W,A_x=1)|: " << fmt(r.eq_selected_max_diff)
              << "\n";
    std::cout << "violation of R_x _||_ X | (W, A):        " << fmt(r.naive_violation) << "\n";
    return 0;
  }
  fail(Errc::invalid_query, "unknown demo '" + which + "' (expected appendix-d or appendix-e)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Recoverability of causal effects under selection bias"};
  app.name("selbias");
  app.require_subcommand(1);

  auto* check = app.add_subcommand("check", "Recoverability report for a DAG file");
  std::string check_file, exposure, outcome, selection;
  std::vector<std::string> adjust;
  check->add_option("dag-file", check_file, "DAG text file")->required();
  check->add_option("--exposure", exposure, "exposure node X")->required();
  check->add_option("--outcome", outcome, "outcome node Y")->required();
  check->add_option("--adjust", adjust, "adjustment nodes W");
  check->add_option("--selection", selection, "selection node (defaults to the file's snode)");

  auto* eval = app.add_subcommand("eval", "Exact probability query on an SCM file");
  std::string eval_file, query_text;
  eval->add_option("scm-file", eval_file, "SCM text file")->required();
  eval->add_option("--query", query_text, "e.g. \"P(F=1 | X=1, A=1)\" or \"P(R=1 | do(X=1))\"")
      ->required();

  auto* sweepc = app.add_subcommand("sweep", "Bias sweep over a parameter grid, CSV output");
  std::string grid_spec, out_path;
  bool paper_default = false;
  std::size_t mc_n = 0;
  std::uint64_t seed = 1;
  sweepc->add_option("--grid", grid_spec, "grid spec, e.g. alpha_x=0:1:3;beta_x=1;gamma_v=0:1:3");
  sweepc->add_flag("--paper-default", paper_default, "alpha_x, beta_x, gamma_v over {0,1,2,3}");
  sweepc->add_option("--out", out_path, "CSV output path")->required();
  sweepc->add_option("--mc", mc_n, "estimate measures from this many samples instead of exactly");
  sweepc->add_option("--seed", seed, "sampling seed used with --mc");

  auto* pafc = app.add_subcommand("paf", "Population attributable fraction on an SCM file");
  std::string paf_file, paf_x, paf_y;
  std::vector<std::string> paf_adjust;
  pafc->add_option("scm-file", paf_file, "SCM text file")->required();
  pafc->add_option("--exposure", paf_x, "exposure node")->required();
  pafc->add_option("--outcome", paf_y, "outcome node")->required();
  pafc->add_option("--adjust", paf_adjust, "adjustment nodes");

  auto* demo = app.add_subcommand("demo", "Built-in demonstrations");
  std::string which_demo;
  demo->add_option("name", which_demo, "appendix-d or appendix-e")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 1;
  }

  try {
    if (*check) return cmd_check(check_file, exposure, outcome, adjust, selection);
    if (*eval) return cmd_eval(eval_file, query_text);
    if (*sweepc) return cmd_sweep(grid_spec, paper_default, out_path, mc_n, seed);
    if (*pafc) return cmd_paf(paf_file, paf_x, paf_y, paf_adjust);
    if (*demo) return cmd_demo(which_demo);
  } catch (const selbias::Error& e) {
    std::cerr << e.what() << "\n";
    return static_cast<int>(e.error_class());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
