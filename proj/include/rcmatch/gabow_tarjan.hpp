#ifndef RCMATCH_GABOW_TARJAN_HPP
#define RCMATCH_GABOW_TARJAN_HPP

#include <vector>

#include "rcmatch/graph.hpp"

namespace rcmatch {

// Slack under the 1-feasibility conditions: c+1-y(u)-y(v) off the matching,
// y(u)+y(v)-c+1 on it.
inline Weight gt_slack(const BipartiteGraph& g, const std::vector<Weight>& costs, EdgeId e,
                       bool matched, const std::vector<Weight>& y) {
  Vertex a = g.endpoint_a(e), b = g.endpoint_b(e);
  Weight ysum = y[a] + y[b];
  return matched ? ysum - costs[e] + 1 : costs[e] + 1 - ysum;
}

struct GtStats {
  long long stage1_backtracks = 0;
  long long stage1_cycles = 0;
  long long stage1_augments = 0;
  long long stage1_path_edges = 0;  // sum |P_j| over stage-1 paths
  long long stage2_augments = 0;
  int free_after_stage1 = 0;
};

struct GtScaleResult {
  Matching matching;
  std::vector<Weight> y;
};

// Stage 1 of a scale: `iterations` sweeps of partial DFS over the admissible
// graph, starting from the empty matching and zero duals. Backtracked
// B-vertices gain +1 dual, A-vertices -1; admissible cycles are switched
// immediately. Costs must satisfy c(e) >= 1. On return the matching is
// 1-feasible, free A-duals are 0 and free B-duals equal `iterations`.
GtScaleResult gt_stage1(const BipartiteGraph& g, const std::vector<Weight>& costs, int iterations,
                        bool debug = false, GtStats* stats = nullptr);

// One full scale: stage 1 with ceil(sqrt(n)) iterations followed by Hungarian
// searches until the matching is perfect. Returns a 1-optimal matching.
// Throws infeasible_error when no perfect matching exists.
GtScaleResult gt_scale(const BipartiteGraph& g, const std::vector<Weight>& costs,
                       bool debug = false, GtStats* stats = nullptr);

// Verifies 1-feasibility of (M, y) under `costs`; throws feasibility_error.
void check_one_feasible(const BipartiteGraph& g, const std::vector<Weight>& costs,
                        const Matching& m, const std::vector<Weight>& y);

struct GtSolveResult {
  Matching matching;
  Weight cost = 0;
  int scales = 0;
};

// Exact minimum-cost perfect matching via bit scaling of (2n+1)*c with
// between-scale dual transfer. Throws infeasible_error when the graph has no
// perfect matching.
GtSolveResult gt_solve(const BipartiteGraph& g, bool debug = false);

}  // namespace rcmatch

#endif  // RCMATCH_GABOW_TARJAN_HPP
