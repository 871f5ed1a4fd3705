// Timing harness for the enumeration, sampling and sweep kernels: runs each
// once serially and once with the OpenMP path and reports the speedup.
// Results must agree bit for bit; the run aborts if they do not.

#include <chrono>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "selbias/grid.hpp"
#include "selbias/rng.hpp"
#include "selbias/scm.hpp"
#include "selbias/study.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace selbias;

namespace {

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

// Layered random model: wide enough that the 2^n enumeration dominates.
DiscreteScm bench_model(std::size_t n_vars) {
  SplitMix64 rng{4096};
  std::vector<NodeId> nodes;
  for (std::size_t i = 0; i < n_vars; ++i)
    nodes.push_back("N" + std::to_string(100 + i));  // fixed-width names keep the order stable
  std::vector<std::pair<NodeId, NodeId>> edges;
  std::map<NodeId, DiscreteScm::VariableDef> defs;
  for (std::size_t i = 0; i < n_vars; ++i) {
    std::vector<NodeId> parents;
    for (std::size_t j = i >= 3 ? i - 3 : 0; j < i; ++j)
      if (rng.next_unit() < 0.7) {
        parents.push_back(nodes[j]);
        edges.emplace_back(nodes[j], nodes[i]);
      }
    std::vector<double> rows(std::size_t{1} << parents.size());
    for (double& r : rows) r = 0.05 + 0.9 * rng.next_unit();
    defs[nodes[i]] = {parents, Table{rows}};
  }
  return DiscreteScm::make(build_dag(nodes, edges), defs);
}

template <typename Fn>
double time_best_of(int reps, Fn&& fn) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const double t0 = now_seconds();
    fn();
    best = std::min(best, now_seconds() - t0);
  }
  return best;
}

void row(const char* name, double serial, double parallel) {
  std::printf("%-28s %10.3f ms %10.3f ms %8.2fx\n", name, serial * 1e3, parallel * 1e3,
              serial / parallel);
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP enabled, max threads = %d\n", omp_get_max_threads());
#else
  std::printf("built without OpenMP; both columns run the serial kernel\n");
#endif
  std::printf("%-28s %13s %13s %9s\n", "kernel", "serial", "parallel", "speedup");

  {
    const DiscreteScm m = bench_model(20);
    std::vector<double> serial_mass, parallel_mass;
    const double ts = time_best_of(3, [&] { serial_mass = joint(m, Execution::serial).mass(); });
    const double tp = time_best_of(3, [&] { parallel_mass = joint(m, Execution::parallel).mass(); });
    if (serial_mass != parallel_mass) {
      std::fprintf(stderr, "joint kernels disagree\n");
      return 1;
    }
    row("joint enumeration, 2^20", ts, tp);
  }
  {
    const DiscreteScm m = bench_model(12);
    std::vector<std::uint8_t> a, b;
    const double ts =
        time_best_of(3, [&] { a = sample(m, 2000000, 11, Execution::serial).data; });
    const double tp =
        time_best_of(3, [&] { b = sample(m, 2000000, 11, Execution::parallel).data; });
    if (a != b) {
      std::fprintf(stderr, "sampling kernels disagree\n");
      return 1;
    }
    row("ancestral sampling, 2e6", ts, tp);
  }
  {
    const std::vector<StudyParams> grid = parse_grid("alpha_x=0:0.0005:3;beta_x=1;gamma_v=0:1:3");
    std::vector<SweepRow> a, b;
    const double ts = time_best_of(3, [&] { a = sweep(grid, Execution::serial); });
    const double tp = time_best_of(3, [&] { b = sweep(grid, Execution::parallel); });
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a[i].bias_ratio != b[i].bias_ratio) {
        std::fprintf(stderr, "sweep kernels disagree\n");
        return 1;
      }
    row("closed-form sweep, 24k pts", ts, tp);
  }
  return 0;
}
