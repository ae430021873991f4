#ifndef RCMATCH_SCALE_SOLVER_HPP
#define RCMATCH_SCALE_SOLVER_HPP

#include <functional>
#include <memory>
#include <vector>

#include "rcmatch/compressed.hpp"
#include "rcmatch/feasibility.hpp"

namespace rcmatch {

struct ScaleInput;
struct ScaleOutput;

struct SolveOptions {
  bool debug_invariants = false;
  // Safety cap on FastMatch phases; <=0 picks 4*ceil(sqrt(n)/r^{1/4}) + 4.
  int max_phases_cap = 0;
  bool collect_path_log = false;
  // Instrumentation: called after every scale with its input and output.
  std::function<void(const ScaleInput&, const ScaleOutput&)> on_scale;
};

struct PathRecord {
  WalkKind kind;
  int h_length;             // edges of the path/cycle in H
  Weight delta_sum;         // sum of delta over the projection's edges
  Weight delta_min_free;    // min free-B dual at the switch (Delta_i)
  int free_b;               // |B_F| at the switch
  bool augmenting;          // kappa_i
};

struct ScaleStats {
  int scale_index = 0;
  int free_after_step1 = 0;  // free B-vertices after step 1
  int free_after_step2 = 0;  // free B-vertices after step 2
  int phases = 0;
  bool phase_cap_hit = false;
  long long augmenting_paths = 0;
  long long alternating_paths = 0;
  long long cycles = 0;
  long long backtracks = 0;
  long long sum_h_path_edges = 0;     // sum |P_i| over H paths/cycles
  long long sum_projection_delta = 0; // sum of delta over projected edges
  // Augmentations where |B_F| * Delta exceeded k*n. The provable budget
  // adds the optimal matching cost of the scale, so this is a statistic,
  // not an error counter.
  long long dual_budget_excesses = 0;
  int h_vertices = 0;
  int h_edges = 0;
  std::vector<PathRecord> path_log;   // when collect_path_log
};

struct SolveResult {
  Matching matching;
  Weight cost = 0;
  int scales = 0;
  long long k = 0;  // ceil(2k1+4k2+2) used by the scaling driver
  std::vector<ScaleStats> per_scale;
};

// Input to one scale: reduced costs satisfying c^i(e) >= delta(e).
struct ScaleInput {
  const BipartiteGraph* g;
  const RClustering* ctx;
  std::vector<Weight> reduced_costs;
};

struct ScaleOutput {
  Matching matching;
  std::vector<Weight> y;  // scale-local duals, R-optimal w.r.t. reduced costs
  ScaleStats stats;
};

// One scale: Step 1 = ceil(sqrt(r)) GT stage-1 sweeps; Step 2 = FastMatch
// phases on the compressed graph until no active free B-vertex remains;
// Step 3 = Hungarian searches until the matching is perfect.
ScaleOutput solve_scale(const ScaleInput& input, const SolveOptions& opts = {});

// One FastMatch phase: invokes the DFS search on every active free B-vertex
// of H. Each processed vertex is matched, goes inactive, or gains sqrt(r)
// of dual weight.
void fast_match_phase(CompressedState& st, ScaleStats& stats, const SolveOptions& opts = {});

// FastMatch phases until no active free B-vertex remains (or the cap hits;
// stats.phase_cap_hit records that).
void run_fast_match(CompressedState& st, ScaleStats& stats, int phase_cap,
                    const SolveOptions& opts = {});

// The DFS-and-switch search from one active free B-vertex of H.
void search_and_switch(CompressedState& st, int hid, ScaleStats& stats,
                       const SolveOptions& opts = {});

// Exact minimum-cost perfect matching via the scaling driver over
// c* = (k*n+1)*c. Throws infeasible_error when no perfect matching exists.
SolveResult solve(const BipartiteGraph& g, const RClustering& ctx, const SolveOptions& opts = {});

// Step 3 standalone: repeated Hungarian searches on the R-slack graph until
// no free B-vertex remains. Preserves R-feasibility each iteration.
void step3(const CostModel& cm, Matching& m, std::vector<Weight>& y, ScaleStats* stats = nullptr,
           bool debug = false);

// Doubled-graph reduction from minimum-cost maximum-cardinality matching to
// minimum-cost perfect matching: mirrors G, joins each vertex to its copy by
// an edge of cost (total cost + 1), and mirrors the clustering (cross edges
// join the piece of their original vertex).
struct PerfectReduction {
  std::unique_ptr<BipartiteGraph> graph;
  std::unique_ptr<RClustering> clustering;
  Weight cross_cost = 0;
  // Maps a matching on the doubled graph back to G and reports its cost.
  Weight original_cost(const Matching& doubled, Matching* restored = nullptr) const;
  int original_na = 0;
  int original_nb = 0;
  int original_edges = 0;
  const BipartiteGraph* orig_ = nullptr;
};
PerfectReduction to_perfect_reduction(const BipartiteGraph& g, const RClustering& ctx);

}  // namespace rcmatch

#endif  // RCMATCH_SCALE_SOLVER_HPP
