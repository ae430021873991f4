#include "rcmatch/feasibility.hpp"

namespace rcmatch {

FeasibilityReport verify_r_feasible(const CostModel& cm, const Matching& m,
                                    const std::vector<Weight>& y) {
  FeasibilityReport rep;
  for (EdgeId e = 0; e < cm.g->num_edges(); ++e) {
    Weight s = slack(cm, e, m, y);
    if (s < 0) rep.violations.push_back({e, s, m.contains(e)});
  }
  return rep;
}

Weight walk_net_cost(const CostModel& cm, const Matching& m, const AlternatingWalk& walk) {
  Weight phi = 0;
  const auto& vs = walk.vertices;
  for (size_t i = 0; i + 1 < vs.size(); ++i) {
    EdgeId e = cm.g->edge_between(vs[i], vs[i + 1]);
    if (e == kNoEdge) throw std::invalid_argument("walk uses a non-edge");
    phi += net_cost(cm, e, m);
  }
  return phi;
}

Weight walk_slack(const CostModel& cm, const Matching& m, const AlternatingWalk& walk,
                  const std::vector<Weight>& y) {
  Weight s = 0;
  const auto& vs = walk.vertices;
  for (size_t i = 0; i + 1 < vs.size(); ++i) {
    EdgeId e = cm.g->edge_between(vs[i], vs[i + 1]);
    if (e == kNoEdge) throw std::invalid_argument("walk uses a non-edge");
    s += slack(cm, e, m, y);
  }
  return s;
}

}  // namespace rcmatch
