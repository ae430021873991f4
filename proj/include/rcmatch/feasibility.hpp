#ifndef RCMATCH_FEASIBILITY_HPP
#define RCMATCH_FEASIBILITY_HPP

#include <string>
#include <vector>

#include "rcmatch/clustering.hpp"
#include "rcmatch/graph.hpp"

namespace rcmatch {

// Cost view used throughout a scale: per-edge costs (possibly reduced costs)
// plus the clustering that supplies delta. Owns neither.
struct CostModel {
  const BipartiteGraph* g;
  const RClustering* ctx;
  const std::vector<Weight>* costs;  // size == g->num_edges()

  Weight cost(EdgeId e) const { return (*costs)[e]; }
  Weight delta(EdgeId e) const { return ctx->delta(e); }
};

inline CostModel make_cost_model(const BipartiteGraph& g, const RClustering& ctx,
                                 const std::vector<Weight>& costs) {
  return CostModel{&g, &ctx, &costs};
}

// phi(e): c+delta off the matching, -c+delta on it.
inline Weight net_cost(const CostModel& cm, EdgeId e, const Matching& m) {
  return m.contains(e) ? -cm.cost(e) + cm.delta(e) : cm.cost(e) + cm.delta(e);
}

// s(e): c+delta-y(u)-y(v) off the matching, y(u)+y(v)-c+delta on it.
// Non-negative at e iff the duals are R-feasible there.
inline Weight slack(const CostModel& cm, EdgeId e, const Matching& m, const std::vector<Weight>& y) {
  Vertex a = cm.g->endpoint_a(e), b = cm.g->endpoint_b(e);
  Weight ysum = y[a] + y[b];
  return m.contains(e) ? ysum - cm.cost(e) + cm.delta(e) : cm.cost(e) + cm.delta(e) - ysum;
}

// Interior edges are admissible at slack 0, boundary edges at 0..ceil(sqrt r).
// A negative slack is an R-feasibility violation; with debug set it throws
// feasibility_error instead of returning false.
inline bool is_admissible(const CostModel& cm, EdgeId e, const Matching& m,
                          const std::vector<Weight>& y, bool debug = false) {
  Weight s = slack(cm, e, m, y);
  if (s < 0) {
    if (debug)
      throw feasibility_error("negative slack on edge " + std::to_string(e) + ": " + std::to_string(s));
    return false;
  }
  return cm.ctx->is_boundary_edge(e) ? s <= cm.ctx->sqrt_r() : s == 0;
}

struct FeasibilityReport {
  struct Violation {
    EdgeId edge;
    Weight slack;
    bool matched;
  };
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

// Lists every edge violating y(u)+y(v) <= c+delta (unmatched) or
// y(u)+y(v) >= c-delta (matched). Empty report iff R-feasible.
FeasibilityReport verify_r_feasible(const CostModel& cm, const Matching& m,
                                    const std::vector<Weight>& y);

// phi of a residual walk: sum of edge net-costs. Equals
// c(M (+) W) - c(M) + sum of deltas along W.
Weight walk_net_cost(const CostModel& cm, const Matching& m, const AlternatingWalk& walk);

// Total slack along a residual walk.
Weight walk_slack(const CostModel& cm, const Matching& m, const AlternatingWalk& walk,
                  const std::vector<Weight>& y);

}  // namespace rcmatch

#endif  // RCMATCH_FEASIBILITY_HPP
