#include "rcmatch/scale_solver.hpp"

#include <algorithm>
#include <cmath>

#include "rcmatch/gabow_tarjan.hpp"
#include "rcmatch/hungarian.hpp"

namespace rcmatch {

namespace {

// Step 2 driver: runs FastMatch phases over the compressed state.
class FastMatch {
 public:
  FastMatch(CompressedState& st, ScaleStats& stats, const SolveOptions& opts)
      : st_(st),
        stats_(stats),
        opts_(opts),
        k_(clustering_constant_k(st.clustering())),
        path_pos_(st.num_hids(), -1) {}

  void run(int phase_cap) {
    while (true) {
      if (st_.active_free_b_hids().empty()) break;
      if (stats_.phases >= phase_cap) {
        stats_.phase_cap_hit = true;
        break;
      }
      run_one_phase();
    }
  }

  void run_one_phase() {
    for (int u : st_.active_free_b_hids()) search_and_switch(u);
    ++stats_.phases;
    if (opts_.debug_invariants) check_state();
  }

  void search_from(int u0) { search_and_switch(u0); }

 private:
  void check_state() const {
    auto rep = st_.verify_compressed_feasible();
    if (!rep.ok()) throw feasibility_error("compressed feasibility lost: " + rep.violations.front());
  }

  Weight min_free_b_dual() const {
    Weight best = kUnreached;
    for (int h = 0; h < st_.num_hids(); ++h)
      if (st_.is_free_b(h)) best = std::min(best, st_.ymag(h));
    return best == kUnreached ? 0 : best;
  }

  int count_free_b() const {
    const BipartiteGraph& g = st_.graph();
    int c = 0;
    for (Vertex v = g.num_a(); v < g.num_vertices(); ++v)
      if (!st_.matching().is_matched(v)) ++c;
    return c;
  }

  void reset_path(int u0) {
    for (int h : path_) path_pos_[h] = -1;
    path_.clear();
    pedges_.clear();
    path_.push_back(u0);
    path_pos_[u0] = 0;
  }

  // Backtrack dual raise; re-homes an active representative that crossed beta.
  void bump(int hid) {
    st_.raise_ytilde(hid, st_.sqrt_r());
    ++stats_.backtracks;
    if (st_.kind(hid) == HKind::FreeBActive && st_.exists(hid) && st_.ymag(hid) >= st_.beta())
      st_.inactivate_piece_actives(st_.piece_of_rep(hid));
  }

  bool terminal(int v) const {
    if (st_.is_free_a(v)) return true;
    if (st_.kind(v) != HKind::Boundary) return false;
    Vertex vid = st_.boundary_vid(v);
    const BipartiteGraph& g = st_.graph();
    if (g.is_b(vid)) return st_.ymag(v) >= st_.beta();
    return st_.ymag(v) >= st_.beta() + st_.clustering().max_delta_at(vid);
  }

  void search_and_switch(int u0) {
    if (!st_.exists(u0) || !st_.is_active_free_b(u0)) return;
    reset_path(u0);
    long long guard = 0;
    const long long guard_limit =
        64 + 16LL * (st_.num_hids() + 2) * (st_.beta() / std::max<Weight>(1, st_.sqrt_r()) + 2);
    while (true) {
      if (++guard > guard_limit) throw std::logic_error("search did not terminate");
      int us = path_.back();
      auto e = st_.min_out_edge(us, path_pos_);
      if (!e || st_.h_slack(*e) > st_.sqrt_r()) {
        // (i) no admissible out-edge: backtrack and raise the dual.
        path_pos_[us] = -1;
        path_.pop_back();
        if (!pedges_.empty()) pedges_.pop_back();
        bump(us);
        if (path_.empty()) return;  // stopping condition (I)
        continue;
      }
      if (opts_.debug_invariants && st_.h_slack(*e) < 0)
        throw feasibility_error("negative H slack during search");
      int v = e->to;
      if (path_pos_[v] >= 0) {
        // Cycle detected; switch it immediately and resume before it.
        int x = path_pos_[v];
        std::vector<HEdgeRef> cyc(pedges_.begin() + x, pedges_.end());
        cyc.push_back(*e);
        for (size_t i = x; i < path_.size(); ++i) path_pos_[path_[i]] = -1;
        path_.resize(x);
        pedges_.resize(x > 0 ? x - 1 : 0);
        do_switch(cyc, WalkKind::AlternatingCycle);
        if (path_.empty()) return;  // cannot happen: free-B roots have no in-edges
        if (opts_.debug_invariants) check_path_properties();
        continue;
      }
      if (terminal(v)) {
        std::vector<HEdgeRef> pe = pedges_;
        pe.push_back(*e);
        WalkKind kind = st_.is_free_a(v) ? WalkKind::AugmentingPath : WalkKind::AlternatingPath;
        do_switch(pe, kind);
        if (!st_.exists(u0) || !st_.is_active_free_b(u0)) return;  // (II)/(III)
        reset_path(u0);
        continue;
      }
      pedges_.push_back(*e);
      path_pos_[v] = static_cast<int>(path_.size());
      path_.push_back(v);
    }
  }

  // (P1)-(P3) re-check for the remaining search path after a cycle switch.
  void check_path_properties() const {
    for (size_t i = 0; i + 1 < path_.size(); ++i) {
      auto cur = st_.find_edge(pedges_[i].from, pedges_[i].to, pedges_[i].piece);
      if (!cur) throw feasibility_error("search path edge vanished");
      Weight s = st_.h_slack(*cur);
      if (s > st_.sqrt_r()) throw feasibility_error("(P1) violated on the search path");
      for (const HEdgeRef& oe : st_.out_edges(path_[i])) {
        if (st_.h_slack(oe) < s) throw feasibility_error("(P2) violated on the search path");
        int pos = path_pos_[oe.to];
        if (pos >= 0 && pos < static_cast<int>(i) && st_.h_slack(oe) <= s)
          throw feasibility_error("(P3) violated on the search path");
      }
    }
  }

  void do_switch(std::vector<HEdgeRef> edges, WalkKind kind) {
    bool is_cycle = kind == WalkKind::AlternatingCycle;
    // Resolve current edge versions; reconstruction may have lowered weights.
    for (auto& e : edges) {
      auto cur = st_.find_edge(e.from, e.to, e.piece);
      if (!cur) throw stale_edge_error("switch input edge vanished");
      e = *cur;
    }
    std::vector<int> affected;
    for (const auto& e : edges) affected.push_back(e.piece);
    std::sort(affected.begin(), affected.end());
    affected.erase(std::unique(affected.begin(), affected.end()), affected.end());

    Weight delta_min = min_free_b_dual();
    free_b_at_switch_ = count_free_b();
    int free_b = free_b_at_switch_;

    // (a) synchronize every affected piece.
    for (int j : affected) st_.sync_piece(j);

    // (b) record alpha; raise each edge's tail by the pre-update slack of its
    // outgoing path edge, then re-synchronize.
    int u0 = edges.front().from;
    Weight alpha = st_.ytilde(u0);
    std::vector<Weight> sig(edges.size());
    for (size_t i = 0; i < edges.size(); ++i) sig[i] = st_.h_slack(edges[i]);
    for (size_t i = 0; i < edges.size(); ++i) st_.raise_ytilde(edges[i].from, sig[i]);
    for (int j : affected) st_.sync_piece(j);

    // (c) project and concatenate; retry once after a re-sync on staleness.
    Projection proj;
    try {
      proj = st_.project_h_path(edges);
    } catch (const stale_edge_error&) {
      for (int j : affected) st_.sync_piece(j);
      proj = st_.project_h_path(edges);
    }

    // (d) alternating paths into a matched A-vertex append its matching edge.
    bool freed_internal_b = false;
    int freed_piece = -1;
    if (!is_cycle && kind == WalkKind::AlternatingPath) {
      int vt = edges.back().to;
      Vertex vt_vid = st_.kind(vt) == HKind::Boundary ? st_.boundary_vid(vt) : kNoVertex;
      if (vt_vid != kNoVertex && st_.graph().is_a(vt_vid)) {
        EdgeId me = st_.matching().matched_edge(vt_vid);
        if (me == kNoEdge) throw std::logic_error("alternating path must end at a matched vertex");
        int jm = st_.clustering().piece_of_edge(me);
        if (!std::binary_search(affected.begin(), affected.end(), jm)) {
          affected.insert(std::lower_bound(affected.begin(), affected.end(), jm), jm);
          st_.sync_piece(jm);
        }
        Vertex partner = st_.graph().other_endpoint(me, vt_vid);
        st_.reduce_slack(partner);
        proj.vertices.push_back(partner);
        proj.edges.push_back(me);
        if (!st_.clustering().is_boundary(partner)) {
          freed_internal_b = true;
          freed_piece = jm;
        }
      }
    }

    if (kind == WalkKind::AugmentingPath) {
      // |B_F| * Delta_i stays within k*n plus the scale's optimal matching
      // cost; the k*n part alone is tracked as a statistic.
      long long lhs = static_cast<long long>(free_b) * delta_min;
      long long rhs = k_ * static_cast<long long>(st_.graph().num_vertices());
      if (lhs > rhs) ++stats_.dual_budget_excesses;
    }

    // (e) flip the projection, level freshly inactive internal vertices,
    // reconstruct every affected piece.
    st_.flip_walk(proj);
    if (freed_internal_b) st_.reduce(st_.b_inactive_rep(freed_piece), st_.beta());
    for (int j : affected) st_.construct_piece(j);

    // (f) restore the duals of the representative the search started from.
    if (!is_cycle && st_.kind(u0) == HKind::FreeBActive && st_.exists(u0))
      st_.reduce(u0, alpha);

    record_stats(edges, proj, kind, delta_min);
    if (opts_.debug_invariants) check_state();
  }

  void record_stats(const std::vector<HEdgeRef>& edges, const Projection& proj, WalkKind kind,
                    Weight delta_min) {
    Weight dsum = 0;
    for (EdgeId ge : proj.edges) dsum += st_.clustering().delta(ge);
    stats_.sum_h_path_edges += static_cast<long long>(edges.size());
    stats_.sum_projection_delta += dsum;
    switch (kind) {
      case WalkKind::AugmentingPath:
        ++stats_.augmenting_paths;
        break;
      case WalkKind::AlternatingPath:
        ++stats_.alternating_paths;
        break;
      case WalkKind::AlternatingCycle:
        ++stats_.cycles;
        break;
    }
    if (opts_.collect_path_log)
      stats_.path_log.push_back(PathRecord{kind, static_cast<int>(edges.size()), dsum, delta_min,
                                           free_b_at_switch_, kind == WalkKind::AugmentingPath});
  }

  CompressedState& st_;
  ScaleStats& stats_;
  const SolveOptions& opts_;
  long long k_;
  int free_b_at_switch_ = 0;
  std::vector<int> path_pos_;
  std::vector<int> path_;
  std::vector<HEdgeRef> pedges_;
};

int default_phase_cap(const BipartiteGraph& g, const RClustering& ctx) {
  double n = static_cast<double>(std::max(1, g.num_vertices()));
  double quarter = std::pow(static_cast<double>(ctx.r()), 0.25);
  return 4 * static_cast<int>(std::ceil(std::sqrt(n) / quarter)) + 4;
}

}  // namespace

void fast_match_phase(CompressedState& st, ScaleStats& stats, const SolveOptions& opts) {
  FastMatch fm(st, stats, opts);
  fm.run_one_phase();
}

void run_fast_match(CompressedState& st, ScaleStats& stats, int phase_cap,
                    const SolveOptions& opts) {
  FastMatch fm(st, stats, opts);
  fm.run(phase_cap > 0 ? phase_cap : default_phase_cap(st.graph(), st.clustering()));
}

void search_and_switch(CompressedState& st, int hid, ScaleStats& stats, const SolveOptions& opts) {
  FastMatch fm(st, stats, opts);
  fm.search_from(hid);
}

void step3(const CostModel& cm, Matching& m, std::vector<Weight>& y, ScaleStats* stats,
           bool debug) {
  const BipartiteGraph& g = *cm.g;
  auto slack_of = [&](EdgeId e) { return slack(cm, e, m, y); };
  while (true) {
    bool free_b = false;
    for (Vertex v = g.num_a(); v < g.num_vertices() && !free_b; ++v)
      if (!m.is_matched(v)) free_b = true;
    if (!free_b) break;
    HungarianStep step = hungarian_search(g, m, y, slack_of);
    if (!step.found) throw infeasible_error("no augmenting path for remaining free vertices");
    m = switch_along(g, m, step.path);
    if (stats) ++stats->augmenting_paths;
    if (debug) {
      auto rep = verify_r_feasible(cm, m, y);
      if (!rep.ok()) throw feasibility_error("step 3 broke R-feasibility");
    }
  }
}

ScaleOutput solve_scale(const ScaleInput& input, const SolveOptions& opts) {
  const BipartiteGraph& g = *input.g;
  const RClustering& ctx = *input.ctx;
  const std::vector<Weight>& costs = input.reduced_costs;
  for (EdgeId e = 0; e < g.num_edges(); ++e)
    if (costs[e] < ctx.delta(e))
      throw std::invalid_argument("scale input violates the reduced-cost bound (E1)");

  ScaleOutput out;
  out.stats = ScaleStats{};
  // Step 1: ceil(sqrt(r)) sweeps of the GT stage-1 search under +1 slacks.
  int gamma = static_cast<int>(ctx.sqrt_r());
  GtStats gts;
  GtScaleResult s1 = gt_stage1(g, costs, gamma, opts.debug_invariants, &gts);
  int free_b1 = 0;
  for (Vertex v = g.num_a(); v < g.num_vertices(); ++v)
    if (!s1.matching.is_matched(v)) ++free_b1;
  out.stats.free_after_step1 = free_b1;

  CostModel cm{&g, &ctx, &costs};
  if (gts.free_after_stage1 == 0) {
    // Perfect already: steps 2-3 are skipped; zero the matched-edge slacks.
    out.matching = s1.matching;
    out.y = s1.y;
    for (EdgeId e : out.matching.edge_ids()) {
      Vertex b = g.endpoint_b(e);
      out.y[b] -= slack(cm, e, out.matching, out.y);
    }
    return out;
  }

  // Step 2: FastMatch phases on the compressed residual graph.
  CompressedState st(g, ctx, costs, s1.matching, s1.y, gamma, opts.debug_invariants);
  {
    HSizeStats hs = st.size_stats();
    out.stats.h_vertices = hs.num_h_vertices;
    out.stats.h_edges = hs.num_h_edges;
  }
  run_fast_match(st, out.stats, opts.max_phases_cap, opts);
  {
    int free_b2 = 0;
    for (Vertex v = g.num_a(); v < g.num_vertices(); ++v)
      if (!st.matching().is_matched(v)) ++free_b2;
    out.stats.free_after_step2 = free_b2;
  }
  if (opts.debug_invariants && !out.stats.phase_cap_hit) {
    for (int h = 0; h < st.num_hids(); ++h)
      if (st.is_free_b(h) && st.ymag(h) < st.beta())
        throw feasibility_error("free B-vertex below beta after step 2");
  }

  // Step 3: convert back and finish with Hungarian searches.
  st.to_r_feasible(&out.matching, &out.y);
  if (opts.debug_invariants) {
    auto rep = verify_r_feasible(cm, out.matching, out.y);
    if (!rep.ok()) throw feasibility_error("to_r_feasible produced an infeasible state");
  }
  step3(cm, out.matching, out.y, &out.stats, opts.debug_invariants);
  return out;
}

SolveResult solve(const BipartiteGraph& g, const RClustering& ctx, const SolveOptions& opts) {
  if (g.num_a() != g.num_b()) throw infeasible_error("perfect matching needs equal part sizes");
  SolveResult res;
  res.matching = Matching(g);
  if (g.num_a() == 0) return res;

  const long long n = g.num_vertices();
  res.k = clustering_constant_k(ctx);
  const Weight factor = res.k * n + 1;
  const Weight cmax_in = std::max<Weight>(1, g.max_cost());
  if (factor > ((1LL << 62) / cmax_in) / std::max<Weight>(1, n))
    throw std::invalid_argument("cost bound (k*n+1)*C*n overflows the weight type");

  std::vector<Weight> cstar(g.num_edges());
  Weight cmax = 0;
  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    cstar[e] = factor * g.edge(e).cost;
    cmax = std::max(cmax, cstar[e]);
  }
  int bits = 1;
  while ((cmax >> bits) > 0) ++bits;
  res.scales = bits;

  // Scale-1 duals: 0 on A, minus the largest incident delta on B.
  std::vector<Weight> y(g.num_vertices(), 0);
  for (Vertex v = g.num_a(); v < g.num_vertices(); ++v) y[v] = -ctx.max_delta_at(v);

  std::vector<Weight> ci(g.num_edges());
  ScaleInput in{&g, &ctx, std::vector<Weight>(g.num_edges())};
  for (int scale = 1; scale <= bits; ++scale) {
    for (EdgeId e = 0; e < g.num_edges(); ++e) {
      ci[e] = cstar[e] >> (bits - scale);
      in.reduced_costs[e] = ci[e] - y[g.endpoint_a(e)] - y[g.endpoint_b(e)];
      if (in.reduced_costs[e] < ctx.delta(e))
        throw feasibility_error("scale input lost property E1");
    }
    ScaleOutput sc = solve_scale(in, opts);
    sc.stats.scale_index = scale;
    if (opts.on_scale) opts.on_scale(in, sc);
    res.per_scale.push_back(std::move(sc.stats));
    for (Vertex v = 0; v < g.num_vertices(); ++v) y[v] += sc.y[v];
    res.matching = sc.matching;
    if (scale < bits) {
      // Zero matched-edge slacks, then double with the per-vertex offset.
      for (EdgeId e : res.matching.edge_ids()) {
        Vertex a = g.endpoint_a(e), b = g.endpoint_b(e);
        Weight s = y[a] + y[b] - ci[e] + ctx.delta(e);
        y[b] -= s;
      }
      for (Vertex v = 0; v < g.num_vertices(); ++v)
        y[v] = 2 * y[v] - 2 * ctx.max_delta_at(v);
    }
  }
  res.cost = res.matching.cost();
  return res;
}

Weight PerfectReduction::original_cost(const Matching& doubled, Matching* restored) const {
  Weight c = 0;
  if (restored) *restored = Matching(*orig_);
  for (EdgeId e : doubled.edge_ids()) {
    if (e >= original_edges) continue;  // mirror or cross edge
    c += graph->edge(e).cost;
    if (restored) restored->add(e);
  }
  return c;
}

PerfectReduction to_perfect_reduction(const BipartiteGraph& g, const RClustering& ctx) {
  PerfectReduction red;
  red.orig_ = &g;
  red.original_na = g.num_a();
  red.original_nb = g.num_b();
  red.original_edges = g.num_edges();
  red.cross_cost = g.total_cost() + 1;
  if (red.cross_cost > (1LL << 61))
    throw std::invalid_argument("total cost too large for the doubled-graph reduction");

  // A' = A + copies of B; B' = B + copies of A. Edge ids: originals first,
  // then mirrors in the same order, then cross edges (A side, then B side).
  int na = g.num_a(), nb = g.num_b();
  red.graph = std::make_unique<BipartiteGraph>(na + nb, nb + na);
  std::vector<int> piece_of_edge;
  int l = std::max(1, ctx.num_pieces());
  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    const Edge& ed = g.edge(e);
    red.graph->add_edge(ed.a, ed.b, ed.cost);
    piece_of_edge.push_back(ctx.piece_of_edge(e));
  }
  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    const Edge& ed = g.edge(e);
    red.graph->add_edge(na + ed.b, nb + ed.a, ed.cost);
    piece_of_edge.push_back(ctx.piece_of_edge(e));
  }
  auto lowest_piece = [&](Vertex v) {
    const auto& ps = ctx.pieces_of_vertex(v);
    return ps.empty() ? 0 : ps.front();
  };
  for (int a = 0; a < na; ++a) {
    red.graph->add_edge(a, nb + a, red.cross_cost);
    piece_of_edge.push_back(lowest_piece(g.a_vertex(a)));
  }
  for (int b = 0; b < nb; ++b) {
    red.graph->add_edge(na + b, b, red.cross_cost);
    piece_of_edge.push_back(lowest_piece(g.b_vertex(b)));
  }
  red.clustering =
      std::make_unique<RClustering>(*red.graph, ctx.r(), std::move(piece_of_edge), l);
  return red;
}

}  // namespace rcmatch
