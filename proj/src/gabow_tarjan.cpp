#include "rcmatch/gabow_tarjan.hpp"

#include <algorithm>
#include <cmath>

#include "rcmatch/clustering.hpp"
#include "rcmatch/hungarian.hpp"

namespace rcmatch {

void check_one_feasible(const BipartiteGraph& g, const std::vector<Weight>& costs,
                        const Matching& m, const std::vector<Weight>& y) {
  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    Weight s = gt_slack(g, costs, e, m.contains(e), y);
    if (s < 0)
      throw feasibility_error("1-feasibility violated on edge " + std::to_string(e) +
                              " (slack " + std::to_string(s) + ")");
  }
}

namespace {

class Stage1Dfs {
 public:
  Stage1Dfs(const BipartiteGraph& g, const std::vector<Weight>& costs, Matching& m,
            std::vector<Weight>& y, GtStats* stats)
      : g_(g), costs_(costs), m_(m), y_(y), stats_(stats), pos_(g.num_vertices(), -1) {}

  void run_from(Vertex b) {
    pathv_ = {b};
    pathe_.clear();
    pos_[b] = 0;
    while (!pathv_.empty()) {
      Vertex vk = pathv_.back();
      EdgeId chosen = find_admissible_out(vk);
      if (chosen == kNoEdge) {
        backtrack();
        continue;
      }
      Vertex t = g_.other_endpoint(chosen, vk);
      if (g_.is_a(t) && !m_.is_matched(t)) {
        augment(chosen);
        return;
      }
      if (pos_[t] >= 0) {
        switch_cycle(pos_[t], chosen);
        continue;
      }
      pathe_.push_back(chosen);
      pos_[t] = static_cast<int>(pathv_.size());
      pathv_.push_back(t);
    }
  }

 private:
  EdgeId find_admissible_out(Vertex vk) {
    if (g_.is_a(vk)) {
      EdgeId e = m_.matched_edge(vk);
      if (e != kNoEdge && gt_slack(g_, costs_, e, true, y_) == 0) return e;
      return kNoEdge;
    }
    for (EdgeId e : g_.incident(vk)) {
      if (m_.contains(e)) continue;
      if (gt_slack(g_, costs_, e, false, y_) == 0) return e;
    }
    return kNoEdge;
  }

  void backtrack() {
    Vertex vk = pathv_.back();
    pathv_.pop_back();
    if (!pathe_.empty()) pathe_.pop_back();
    pos_[vk] = -1;
    y_[vk] += g_.is_b(vk) ? 1 : -1;
    if (stats_) ++stats_->stage1_backtracks;
  }

  void augment(EdgeId last) {
    pathe_.push_back(last);
    flip(pathe_);
    if (stats_) {
      ++stats_->stage1_augments;
      stats_->stage1_path_edges += static_cast<long long>(pathe_.size());
    }
    for (Vertex v : pathv_) pos_[v] = -1;
    pathv_.clear();
    pathe_.clear();
  }

  void switch_cycle(int x, EdgeId closing) {
    std::vector<EdgeId> cycle(pathe_.begin() + x, pathe_.end());
    cycle.push_back(closing);
    flip(cycle);
    if (stats_) {
      ++stats_->stage1_cycles;
      stats_->stage1_path_edges += static_cast<long long>(cycle.size());
    }
    for (size_t i = x; i < pathv_.size(); ++i) pos_[pathv_[i]] = -1;
    pathv_.resize(x);
    pathe_.resize(x > 0 ? x - 1 : 0);
    // x >= 1 always: free B-vertices have no residual in-edges, so the DFS
    // root cannot be re-entered.
  }

  void flip(const std::vector<EdgeId>& edges) {
    std::vector<EdgeId> to_add;
    for (EdgeId e : edges) {
      if (m_.contains(e))
        m_.remove(e);
      else
        to_add.push_back(e);
    }
    for (EdgeId e : to_add) m_.add(e);
  }

  const BipartiteGraph& g_;
  const std::vector<Weight>& costs_;
  Matching& m_;
  std::vector<Weight>& y_;
  GtStats* stats_;
  std::vector<int> pos_;
  std::vector<Vertex> pathv_;
  std::vector<EdgeId> pathe_;
};

}  // namespace

GtScaleResult gt_stage1(const BipartiteGraph& g, const std::vector<Weight>& costs, int iterations,
                        bool debug, GtStats* stats) {
  for (EdgeId e = 0; e < g.num_edges(); ++e)
    if (costs[e] < 1) throw std::invalid_argument("stage 1 requires costs >= 1");
  GtScaleResult res{Matching(g), std::vector<Weight>(g.num_vertices(), 0)};
  Stage1Dfs dfs(g, costs, res.matching, res.y, stats);
  for (int it = 0; it < iterations; ++it) {
    for (Vertex b = g.num_a(); b < g.num_vertices(); ++b) {
      if (!res.matching.is_matched(b)) dfs.run_from(b);
    }
    if (debug) {
      check_one_feasible(g, costs, res.matching, res.y);
      // Free A-duals stay 0; free B-duals advance in lockstep, one per sweep.
      for (Vertex v = 0; v < g.num_vertices(); ++v) {
        if (res.matching.is_matched(v)) continue;
        Weight want = g.is_a(v) ? 0 : it + 1;
        if (res.y[v] != want)
          throw feasibility_error("stage-1 free dual drifted at vertex " + std::to_string(v));
      }
    }
  }
  if (stats) {
    stats->free_after_stage1 = 0;
    for (Vertex v = 0; v < g.num_vertices(); ++v)
      if (!res.matching.is_matched(v)) ++stats->free_after_stage1;
  }
  return res;
}

GtScaleResult gt_scale(const BipartiteGraph& g, const std::vector<Weight>& costs, bool debug,
                       GtStats* stats) {
  int iterations = static_cast<int>(ceil_sqrt(g.num_vertices()));
  GtScaleResult res = gt_stage1(g, costs, iterations, debug, stats);
  auto slack_of = [&](EdgeId e) { return gt_slack(g, costs, e, res.matching.contains(e), res.y); };
  while (res.matching.size() < g.num_a()) {
    HungarianStep step = hungarian_search(g, res.matching, res.y, slack_of);
    if (!step.found) throw infeasible_error("no perfect matching exists");
    res.matching = switch_along(g, res.matching, step.path);
    if (stats) ++stats->stage2_augments;
    if (debug) check_one_feasible(g, costs, res.matching, res.y);
  }
  return res;
}

GtSolveResult gt_solve(const BipartiteGraph& g, bool debug) {
  if (g.num_a() != g.num_b())
    throw infeasible_error("perfect matching needs equal part sizes");
  GtSolveResult out;
  out.matching = Matching(g);
  if (g.num_a() == 0) return out;
  const Weight factor = 2LL * g.num_a() + 1;
  if (g.max_cost() > (1LL << 62) / std::max<Weight>(1, factor * g.num_vertices()))
    throw std::invalid_argument("costs too large for the scaling driver");
  std::vector<Weight> cstar(g.num_edges());
  Weight cmax = 0;
  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    cstar[e] = factor * g.edge(e).cost;
    cmax = std::max(cmax, cstar[e]);
  }
  int bits = 1;
  while ((cmax >> bits) > 0) ++bits;

  std::vector<Weight> y(g.num_vertices(), 0);
  for (Vertex v = g.num_a(); v < g.num_vertices(); ++v) y[v] = -1;
  std::vector<Weight> ci(g.num_edges()), reduced(g.num_edges());
  for (int scale = 1; scale <= bits; ++scale) {
    for (EdgeId e = 0; e < g.num_edges(); ++e) {
      ci[e] = cstar[e] >> (bits - scale);
      reduced[e] = ci[e] - y[g.endpoint_a(e)] - y[g.endpoint_b(e)];
      if (reduced[e] < 1) throw feasibility_error("scale input lost reduced-cost bound");
    }
    GtScaleResult sc = gt_scale(g, reduced, debug);
    for (Vertex v = 0; v < g.num_vertices(); ++v) y[v] += sc.y[v];
    out.matching = sc.matching;
    if (scale < bits) {
      for (EdgeId e : out.matching.edge_ids()) {
        Vertex a = g.endpoint_a(e), b = g.endpoint_b(e);
        Weight s = y[a] + y[b] - ci[e] + 1;
        y[b] -= s;  // zero the matched-edge slack before doubling
      }
      for (Vertex v = 0; v < g.num_vertices(); ++v) y[v] = 2 * y[v] - 2;
    }
  }
  out.cost = out.matching.cost();
  out.scales = bits;
  return out;
}

}  // namespace rcmatch
