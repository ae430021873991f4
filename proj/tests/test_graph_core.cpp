#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "rcmatch/feasibility.hpp"
#include "rcmatch/io.hpp"
#include "rcmatch/rng.hpp"

using namespace rcmatch;

namespace {

BipartiteGraph single_edge(Weight c = 1) {
  BipartiteGraph g(1, 1);
  g.add_edge(0, 0, c);
  return g;
}

// Random graph with a planted perfect matching so walks exist.
BipartiteGraph random_graph(int n, int extra, Weight cmax, Rng& rng) {
  BipartiteGraph g(n, n);
  for (int i = 0; i < n; ++i) g.add_edge(i, i, rng.range(0, cmax));
  int added = 0, guard = 0;
  while (added < extra && guard++ < 20 * (extra + 1)) {
    int a = static_cast<int>(rng.below(n)), b = static_cast<int>(rng.below(n));
    if (g.edge_between(g.a_vertex(a), g.b_vertex(b)) != kNoEdge) continue;
    g.add_edge(a, b, rng.range(0, cmax));
    ++added;
  }
  return g;
}

// Enumerates simple residual walks of bounded length starting anywhere.
void enumerate_walks(const BipartiteGraph& g, const Matching& m, std::vector<Vertex>& cur,
                     std::vector<AlternatingWalk>& out, int max_len) {
  Vertex v = cur.back();
  for (EdgeId e : residual_successors(g, v, m)) {
    Vertex w = g.other_endpoint(e, v);
    bool repeat = false;
    for (Vertex x : cur)
      if (x == w) repeat = true;
    if (repeat) {
      if (w == cur.front() && cur.size() >= 3) {
        AlternatingWalk walk;
        walk.vertices = cur;
        walk.vertices.push_back(w);
        walk.kind = WalkKind::AlternatingCycle;
        out.push_back(walk);
      }
      continue;
    }
    // Emit only switchable walks: B-starts and A-ends must be free.
    bool start_ok = g.is_a(cur.front()) || !m.is_matched(cur.front());
    bool end_ok = g.is_b(w) || !m.is_matched(w);
    if (start_ok && end_ok) {
      AlternatingWalk walk;
      walk.vertices = cur;
      walk.vertices.push_back(w);
      bool aug = !m.is_matched(cur.front()) && !m.is_matched(w);
      walk.kind = aug ? WalkKind::AugmentingPath : WalkKind::AlternatingPath;
      out.push_back(walk);
    }
    if (static_cast<int>(cur.size()) < max_len) {
      cur.push_back(w);
      enumerate_walks(g, m, cur, out, max_len);
      cur.pop_back();
    }
  }
}

std::vector<AlternatingWalk> all_walks(const BipartiteGraph& g, const Matching& m, int max_len) {
  std::vector<AlternatingWalk> out;
  for (Vertex v = 0; v < g.num_vertices(); ++v) {
    std::vector<Vertex> cur{v};
    enumerate_walks(g, m, cur, out, max_len);
  }
  return out;
}

Matching random_matching(const BipartiteGraph& g, Rng& rng) {
  Matching m(g);
  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    if (rng.below(2)) continue;
    Vertex a = g.endpoint_a(e), b = g.endpoint_b(e);
    if (!m.is_matched(a) && !m.is_matched(b)) m.add(e);
  }
  return m;
}

}  // namespace

TEST_CASE("residual orientation on a single edge") {
  BipartiteGraph g = single_edge();
  Matching m(g);
  // Unmatched: successor of b0 is a0; a0 has none.
  CHECK(residual_successors(g, g.b_vertex(0), m).size() == 1);
  CHECK(residual_successors(g, g.a_vertex(0), m).empty());
  m.add(0);
  // Matched: orientation flips.
  CHECK(residual_successors(g, g.a_vertex(0), m).size() == 1);
  CHECK(residual_successors(g, g.b_vertex(0), m).empty());
}

TEST_CASE("residual successors of a star") {
  BipartiteGraph g(2, 1);
  g.add_edge(0, 0, 1);
  g.add_edge(1, 0, 1);
  Matching m(g);
  m.add(0);  // (a0,b0) matched
  auto succ_b = residual_successors(g, g.b_vertex(0), m);
  REQUIRE(succ_b.size() == 1);
  CHECK(g.other_endpoint(succ_b[0], g.b_vertex(0)) == g.a_vertex(1));
  auto succ_a0 = residual_successors(g, g.a_vertex(0), m);
  REQUIRE(succ_a0.size() == 1);
  CHECK(g.other_endpoint(succ_a0[0], g.a_vertex(0)) == g.b_vertex(0));
}

TEST_CASE("delta values") {
  // Interior edge -> 1 regardless of r.
  {
    auto inst = grid_clustering(4, 4, 16, 1, 10);
    for (EdgeId e = 0; e < inst.graph->num_edges(); ++e) CHECK(inst.clustering->delta(e) == 1);
  }
  // Boundary edge with small piece volume: 2*sqrt(r) dominates.
  {
    auto inst = grid_clustering(8, 4, 16, 1, 10);
    bool saw_boundary = false;
    for (EdgeId e = 0; e < inst.graph->num_edges(); ++e) {
      if (!inst.clustering->is_boundary_edge(e)) {
        CHECK(inst.clustering->delta(e) == 1);
        continue;
      }
      saw_boundary = true;
      // m_j*n/(m*sqrt_r) = m_j*32/(m*4) <= 8 here, so 2*sqrt(r)=8 dominates.
      CHECK(inst.clustering->delta(e) == 8);
    }
    CHECK(saw_boundary);
  }
  // Volume term dominating: r=4, single piece owning all edges, n=100.
  {
    BipartiteGraph g(50, 50);
    for (int i = 0; i < 50; ++i) g.add_edge(i, i, 1);
    g.add_edge(0, 1, 1);
    // Two pieces sharing vertex a0 to create a boundary edge.
    std::vector<int> assign(g.num_edges(), 0);
    assign[g.num_edges() - 1] = 1;
    RClustering ctx(g, 4, assign, 2);
    // Edge (0,1) is boundary (a0 and b1 are shared), piece 1 has m_j=1:
    // volume = ceil(1*100/(51*2)) = 1, so delta = max(1,1,4) = 4.
    CHECK(ctx.delta(g.num_edges() - 1) == 4);
    // Boundary edge in piece 0 (m_j = 51): ceil(51*100/(51*2)) = 50.
    CHECK(ctx.delta(0) == 50);
  }
}

TEST_CASE("net cost and slack") {
  BipartiteGraph g(1, 1);
  g.add_edge(0, 0, 5);
  RClustering ctx = single_piece_clustering(g);
  std::vector<Weight> costs{5};
  CostModel cm = make_cost_model(g, ctx, costs);
  Matching m(g);
  CHECK(net_cost(cm, 0, m) == 6);  // c=5, delta=1, unmatched
  m.add(0);
  CHECK(net_cost(cm, 0, m) == -4);  // matched
  {
    // Boundary edge with delta = 8: two pieces sharing vertex a0.
    BipartiteGraph g3(2, 2);
    g3.add_edge(0, 0, 0);
    g3.add_edge(0, 1, 1);
    g3.add_edge(1, 1, 1);
    RClustering ctx3(g3, 16, {0, 1, 0}, 2);
    std::vector<Weight> c3{0, 1, 1};
    CostModel cm3 = make_cost_model(g3, ctx3, c3);
    Matching m3(g3);
    m3.add(0);
    CHECK(ctx3.delta(0) == 8);  // boundary, 2*sqrt(16)=8
    CHECK(net_cost(cm3, 0, m3) == 8);  // c=0, matched
  }
}

TEST_CASE("slack evaluations") {
  BipartiteGraph g(1, 1);
  g.add_edge(0, 0, 3);
  RClustering ctx = single_piece_clustering(g);
  std::vector<Weight> costs{3};
  CostModel cm = make_cost_model(g, ctx, costs);
  Matching m(g);
  std::vector<Weight> y(2, 0);
  CHECK(slack(cm, 0, m, y) == 4);  // c=3, delta=1, y=0
  m.add(0);
  y[g.a_vertex(0)] = -1;
  y[g.b_vertex(0)] = 4;
  CHECK(slack(cm, 0, m, y) == 1);  // y(u)+y(v)-c+delta = 3-3+1
}

TEST_CASE("tight boundary edge has zero slack") {
  BipartiteGraph g(2, 2);
  g.add_edge(0, 0, 3);
  g.add_edge(0, 1, 1);
  g.add_edge(1, 1, 1);
  RClustering ctx(g, 16, {0, 1, 0}, 2);
  REQUIRE(ctx.delta(0) == 8);
  // delta = 4 via r = 4 on the same split.
  RClustering ctx4(g, 4, {0, 1, 0}, 2);
  REQUIRE(ctx4.delta(0) == 4);
  std::vector<Weight> costs{3, 1, 1};
  CostModel cm = make_cost_model(g, ctx4, costs);
  Matching m(g);
  std::vector<Weight> y(4, 0);
  y[g.b_vertex(0)] = 7;
  CHECK(slack(cm, 0, m, y) == 0);
}

TEST_CASE("admissibility thresholds") {
  auto inst = grid_clustering(8, 4, 16, 3, 10);
  const BipartiteGraph& g = *inst.graph;
  const RClustering& ctx = *inst.clustering;
  std::vector<Weight> costs(g.num_edges());
  for (EdgeId e = 0; e < g.num_edges(); ++e) costs[e] = g.edge(e).cost;
  CostModel cm = make_cost_model(g, ctx, costs);
  Matching m(g);
  EdgeId interior = kNoEdge, boundary = kNoEdge;
  for (EdgeId e = 0; e < g.num_edges(); ++e)
    (ctx.is_boundary_edge(e) ? boundary : interior) = e;
  REQUIRE(interior != kNoEdge);
  REQUIRE(boundary != kNoEdge);

  std::vector<Weight> y(g.num_vertices(), 0);
  // Interior: slack 0 iff y sums to c+1.
  y[g.endpoint_b(interior)] = costs[interior] + 1;
  CHECK(is_admissible(cm, interior, m, y));
  y[g.endpoint_b(interior)] = costs[interior];  // slack 1
  CHECK(!is_admissible(cm, interior, m, y));
  // Boundary: slack up to sqrt(r)=4 admissible.
  y[g.endpoint_b(boundary)] = costs[boundary] + ctx.delta(boundary) - 4;
  CHECK(is_admissible(cm, boundary, m, y));
  y[g.endpoint_b(boundary)] -= 1;  // slack 5
  CHECK(!is_admissible(cm, boundary, m, y));
  // Negative slack reports a distinct error in debug mode.
  y[g.endpoint_b(boundary)] = costs[boundary] + ctx.delta(boundary) + 1;
  CHECK_THROWS_AS(is_admissible(cm, boundary, m, y, true), feasibility_error);
  CHECK(!is_admissible(cm, boundary, m, y, false));
}

TEST_CASE("verify_r_feasible reports violations") {
  BipartiteGraph g(2, 2);
  g.add_edge(0, 0, 2);
  g.add_edge(1, 1, 10);
  RClustering ctx = single_piece_clustering(g);
  std::vector<Weight> costs{2, 10};
  CostModel cm = make_cost_model(g, ctx, costs);
  Matching m(g);
  std::vector<Weight> y(g.num_vertices(), 0);
  CHECK(verify_r_feasible(cm, m, y).ok());  // zero duals, empty matching
  y[g.b_vertex(0)] = 4;                     // unmatched c=2 delta=1: 4 > 3
  auto rep = verify_r_feasible(cm, m, y);
  REQUIRE(rep.violations.size() == 1);
  CHECK(rep.violations[0].edge == 0);
  y[g.b_vertex(0)] = 0;
  m.add(1);
  y[g.a_vertex(1)] = 0;
  y[g.b_vertex(1)] = 8;  // matched: 8 < 10-1
  rep = verify_r_feasible(cm, m, y);
  REQUIRE(rep.violations.size() == 1);
  CHECK(rep.violations[0].matched);
}

TEST_CASE("switch_along basics") {
  // Augmenting a single edge.
  {
    BipartiteGraph g = single_edge();
    Matching m(g);
    AlternatingWalk w;
    w.vertices = {g.b_vertex(0), g.a_vertex(0)};
    w.kind = WalkKind::AugmentingPath;
    Matching m2 = switch_along(g, m, w);
    CHECK(m2.size() == 1);
  }
  // 4-cycle flips to the other perfect matching.
  {
    BipartiteGraph g(2, 2);
    EdgeId e00 = g.add_edge(0, 0, 1);
    EdgeId e01 = g.add_edge(0, 1, 1);
    EdgeId e11 = g.add_edge(1, 1, 1);
    EdgeId e10 = g.add_edge(1, 0, 1);
    Matching m(g);
    m.add(e00);
    m.add(e11);
    AlternatingWalk w;
    w.kind = WalkKind::AlternatingCycle;
    w.vertices = {g.a_vertex(0), g.b_vertex(0), g.a_vertex(1), g.b_vertex(1), g.a_vertex(0)};
    // Orientation: matched edges run A->B: a0->b0 (e00 matched), b0->a1
    // (e10... unmatched edge (a1,b0)), a1->b1 (e11), b1->a0 (e01).
    Matching m2 = switch_along(g, m, w);
    CHECK(m2.size() == 2);
    CHECK(m2.contains(e01));
    CHECK(m2.contains(e10));
    CHECK(!m2.contains(e00));
    CHECK(!m2.contains(e11));
  }
  // Alternating path moves which b is free.
  {
    BipartiteGraph g(1, 2);
    EdgeId e0 = g.add_edge(0, 0, 1);
    EdgeId e1 = g.add_edge(0, 1, 1);
    Matching m(g);
    m.add(e1);  // (a0,b1) matched; b0 free
    AlternatingWalk w;
    w.kind = WalkKind::AlternatingPath;
    w.vertices = {g.b_vertex(0), g.a_vertex(0), g.b_vertex(1)};
    Matching m2 = switch_along(g, m, w);
    CHECK(m2.contains(e0));
    CHECK(!m2.contains(e1));
    CHECK(!m2.is_matched(g.b_vertex(1)));
  }
}

TEST_CASE("switch errors on malformed walks") {
  BipartiteGraph g(2, 2);
  g.add_edge(0, 0, 1);
  g.add_edge(1, 0, 1);
  Matching m(g);
  AlternatingWalk w;
  w.kind = WalkKind::AlternatingPath;
  w.vertices = {g.a_vertex(0), g.b_vertex(0)};  // a->b needs a matched edge
  CHECK_THROWS_AS(switch_along(g, m, w), std::invalid_argument);
  w.vertices = {g.b_vertex(0), g.a_vertex(0), g.b_vertex(0)};
  CHECK_THROWS_AS(switch_along(g, m, w), std::invalid_argument);
}

TEST_CASE("walk algebra on random instances") {
  Rng rng(12345);
  for (int trial = 0; trial < 30; ++trial) {
    BipartiteGraph g = random_graph(4 + static_cast<int>(rng.below(3)), 6, 9, rng);
    auto inst_r = 4 + 4 * rng.below(3);
    RClustering ctx = single_piece_clustering(g, inst_r);
    std::vector<Weight> costs(g.num_edges());
    for (EdgeId e = 0; e < g.num_edges(); ++e) costs[e] = g.edge(e).cost;
    CostModel cm = make_cost_model(g, ctx, costs);
    Matching m = random_matching(g, rng);
    auto walks = all_walks(g, m, 5);
    for (const auto& w : walks) {
      // phi(P) = c(M^P) - c(M) + sum delta.
      Matching m2 = switch_along(g, m, w);
      Weight dsum = 0;
      for (size_t i = 0; i + 1 < w.vertices.size(); ++i)
        dsum += ctx.delta(g.edge_between(w.vertices[i], w.vertices[i + 1]));
      Weight phi = walk_net_cost(cm, m, w);
      Weight mc = 0, m2c = 0;
      for (EdgeId e : m.edge_ids()) mc += costs[e];
      for (EdgeId e : m2.edge_ids()) m2c += costs[e];
      CHECK(phi == m2c - mc + dsum);
      // Slack-netcost relation along a directed path.
      std::vector<Weight> y(g.num_vertices());
      for (Vertex v = 0; v < g.num_vertices(); ++v)
        y[v] = g.lambda(v) * static_cast<Weight>(rng.below(4));
      Weight lhs = walk_slack(cm, m, w, y);
      Vertex u = w.vertices.front(), v = w.vertices.back();
      Weight rhs = phi + g.lambda(v) * y[v] - g.lambda(u) * y[u];
      CHECK(lhs == rhs);
      // Switching the reversed walk restores the matching (edge directions
      // flip, so the walk reverses in the new residual graph).
      AlternatingWalk back;
      back.vertices.assign(w.vertices.rbegin(), w.vertices.rend());
      back.kind =
          w.kind == WalkKind::AlternatingCycle ? WalkKind::AlternatingCycle : WalkKind::AlternatingPath;
      Matching m3 = switch_along(g, m2, back);
      CHECK(m3.size() == m.size());
      for (EdgeId e : m.edge_ids()) CHECK(m3.contains(e));
    }
  }
}

TEST_CASE("admissible switch leaves slack at least delta") {
  // After switching along an all-admissible walk, every walk edge has slack
  // at least delta.
  Rng rng(777);
  int checked = 0;
  for (int trial = 0; trial < 200 && checked < 25; ++trial) {
    BipartiteGraph g = random_graph(4, 5, 4, rng);
    RClustering ctx = single_piece_clustering(g);
    std::vector<Weight> costs(g.num_edges());
    for (EdgeId e = 0; e < g.num_edges(); ++e) costs[e] = g.edge(e).cost;
    CostModel cm = make_cost_model(g, ctx, costs);
    Matching m = random_matching(g, rng);
    // Duals that make everything tight are hard to generate randomly; start
    // from zero duals and raise B duals to make some edges admissible.
    std::vector<Weight> y(g.num_vertices(), 0);
    auto walks = all_walks(g, m, 4);
    for (const auto& w : walks) {
      // Make every walk edge admissible by direct assignment when possible.
      bool ok = true;
      std::vector<Weight> y2 = y;
      for (size_t i = 0; i + 1 < w.vertices.size() && ok; ++i) {
        EdgeId e = g.edge_between(w.vertices[i], w.vertices[i + 1]);
        Weight s = slack(cm, e, m, y2);
        Vertex b = g.endpoint_b(e);
        if (m.contains(e))
          y2[b] -= s;  // matched: lower y(b) to zero the slack
        else
          y2[b] += s;  // unmatched: raise y(b)
      }
      for (size_t i = 0; i + 1 < w.vertices.size() && ok; ++i) {
        EdgeId e = g.edge_between(w.vertices[i], w.vertices[i + 1]);
        if (slack(cm, e, m, y2) != 0) ok = false;
      }
      if (!ok || !verify_r_feasible(cm, m, y2).ok()) continue;
      Matching m2 = switch_along(g, m, w);
      for (size_t i = 0; i + 1 < w.vertices.size(); ++i) {
        EdgeId e = g.edge_between(w.vertices[i], w.vertices[i + 1]);
        CHECK(slack(cm, e, m2, y2) >= cm.delta(e));
      }
      ++checked;
      break;
    }
  }
  CHECK(checked > 0);
}

TEST_CASE("graph text format round-trips bit-exactly") {
  Rng rng(9);
  BipartiteGraph g = random_graph(6, 10, 100, rng);
  std::string text = write_graph(g);
  std::istringstream in(text);
  BipartiteGraph g2 = read_graph(in);
  CHECK(write_graph(g2) == text);
  CHECK(g2.num_a() == g.num_a());
  CHECK(g2.num_edges() == g.num_edges());
}

TEST_CASE("graph parser rejects bad input") {
  std::istringstream bad1("e 0 0 1\n");
  CHECK_THROWS_AS(read_graph(bad1), parse_error);
  std::istringstream bad2("p bip 1 1 1\ne 0 0 1\ne 0 0 2\n");
  CHECK_THROWS_AS(read_graph(bad2), parse_error);  // duplicate edge
  std::istringstream bad3("p bip 1 1 2\ne 0 0 1\n");
  CHECK_THROWS_AS(read_graph(bad3), parse_error);  // count mismatch
}
