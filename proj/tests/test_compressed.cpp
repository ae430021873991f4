#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rcmatch/compressed.hpp"
#include "rcmatch/gabow_tarjan.hpp"
#include "rcmatch/hungarian.hpp"
#include "rcmatch/rng.hpp"

using namespace rcmatch;

namespace {

struct Fixture {
  std::unique_ptr<BipartiteGraph> g;
  std::unique_ptr<RClustering> ctx;
  std::vector<Weight> costs;
  Matching m;
  std::vector<Weight> y;
  Weight gamma = 0;

  CompressedState state(bool debug = true) const {
    return CompressedState(*g, *ctx, costs, m, y, gamma, debug);
  }
};

// Two pieces sharing boundary vertices a0, b0; piece 0 is the single edge
// (a0,b0) with c=3, delta=4 (r=4).
Fixture boundary_edge_fixture() {
  Fixture f;
  f.g = std::make_unique<BipartiteGraph>(2, 2);
  f.g->add_edge(0, 0, 3);  // piece 0, both endpoints boundary
  f.g->add_edge(0, 1, 1);  // piece 1
  f.g->add_edge(1, 0, 1);  // piece 1
  f.ctx = std::make_unique<RClustering>(*f.g, 4, std::vector<int>{0, 1, 1}, 2);
  f.costs = {3, 1, 1};
  f.m = Matching(*f.g);
  f.gamma = 2;  // = sqrt(r)
  f.y.assign(f.g->num_vertices(), 0);
  f.y[f.g->b_vertex(0)] = f.gamma;
  f.y[f.g->b_vertex(1)] = f.gamma;
  return f;
}

// Piece 0 holds free internal b-vertices b0, b1 with a slack-0 path from b1
// to the boundary vertex a0 (boundary via piece 1).
Fixture internal_free_fixture() {
  Fixture f;
  f.g = std::make_unique<BipartiteGraph>(2, 3);
  f.g->add_edge(0, 1, 0);  // piece 0: (a0,b1), slack 0 under gamma=4
  f.g->add_edge(0, 0, 2);  // piece 0: (a0,b0)
  f.g->add_edge(0, 2, 5);  // piece 1: (a0,b2), makes a0 boundary
  f.ctx = std::make_unique<RClustering>(*f.g, 4, std::vector<int>{0, 0, 1}, 2);
  f.costs = {0, 2, 5};
  f.m = Matching(*f.g);
  f.gamma = 4;
  f.y.assign(f.g->num_vertices(), 0);
  f.y[f.g->b_vertex(0)] = f.gamma;
  f.y[f.g->b_vertex(1)] = f.gamma;
  f.y[f.g->b_vertex(2)] = f.gamma;
  return f;
}

}  // namespace

TEST_CASE("construct emits the boundary-to-boundary edge with phi = c + delta") {
  Fixture f = boundary_edge_fixture();
  REQUIRE(f.ctx->delta(0) == 4);
  CompressedState st = f.state();
  int hb = st.hid_of_boundary(f.g->b_vertex(0));
  int ha = st.hid_of_boundary(f.g->a_vertex(0));
  REQUIRE(hb >= 0);
  REQUIRE(ha >= 0);
  bool found = false;
  for (const auto& e : st.out_edges(hb))
    if (e.to == ha && e.piece == 0) {
      found = true;
      CHECK(e.phi == 7);  // c + delta = 3 + 4
    }
  CHECK(found);
}

TEST_CASE("construct emits rep edges with phi from the slack formula") {
  Fixture f = internal_free_fixture();
  // delta for (a0,b1): a0 is boundary, so the edge is a boundary edge with
  // delta = max(1, ceil(2*4/(3*2)), 4) = 4; slack = 0+4-4-0 = 0.
  REQUIRE(f.ctx->delta(0) == 4);
  CompressedState st = f.state();
  int bA = st.b_active_rep(0);
  REQUIRE(st.exists(bA));
  int ha0 = st.hid_of_boundary(f.g->a_vertex(0));
  bool found = false;
  for (const auto& e : st.out_edges(bA))
    if (e.to == ha0) {
      found = true;
      // phi = slack-sum + |y(b1)| - |y(a0)| = 0 + 4 - 0.
      CHECK(e.phi == 4);
    }
  CHECK(found);
}

TEST_CASE("no directed path means no edge") {
  Fixture f = boundary_edge_fixture();
  CompressedState st = f.state();
  int hb = st.hid_of_boundary(f.g->b_vertex(0));
  int ha = st.hid_of_boundary(f.g->a_vertex(0));
  // a0 -> b0 requires a matched edge in piece 0; the matching is empty.
  for (const auto& e : st.out_edges(ha)) CHECK(e.to != hb);
}

TEST_CASE("H slack equals the projected slack sum on synchronized states") {
  for (unsigned long long seed = 0; seed < 6; ++seed) {
    auto inst = grid_clustering(6, 4, 4, seed, 8);
    const BipartiteGraph& g = *inst.graph;
    std::vector<Weight> costs(g.num_edges());
    for (EdgeId e = 0; e < g.num_edges(); ++e) costs[e] = g.edge(e).cost + inst.clustering->delta(e);
    int gamma = static_cast<int>(inst.clustering->sqrt_r());
    auto s1 = gt_stage1(g, costs, gamma, true);
    CompressedState st(g, *inst.clustering, costs, s1.matching, s1.y, gamma, true);
    for (int h = 0; h < st.num_hids(); ++h) {
      for (const auto& e : st.out_edges(h)) {
        Projection p = st.project_edge(e);
        CHECK(p.total_slack == st.h_slack(e));
      }
    }
    auto rep = st.verify_compressed_feasible();
    for (const auto& v : rep.violations) FAIL_CHECK(v);
  }
}

TEST_CASE("sync examples") {
  // All kappa zero: duals unchanged.
  {
    Fixture f = boundary_edge_fixture();
    CompressedState st = f.state();
    Weight before = st.piece_dual(0, f.g->b_vertex(0));
    st.sync_piece(0);
    CHECK(st.piece_dual(0, f.g->b_vertex(0)) == before);
  }
  // kappa = 5 on a free b with a slack-0 chain into the piece: the chain
  // vertices follow (+5 in magnitude) and every chain edge stays tight.
  {
    Fixture f;
    f.g = std::make_unique<BipartiteGraph>(2, 2);
    EdgeId e0 = f.g->add_edge(0, 0, 1);  // (a0,b0), slack 0 under gamma=2
    EdgeId e1 = f.g->add_edge(0, 1, 1);  // (a0,b1) matched, slack 0
    f.ctx = std::make_unique<RClustering>(*f.g, 4, std::vector<int>{0, 0}, 1);
    f.costs = {1, 1};
    f.m = Matching(*f.g);
    f.m.add(e1);
    f.gamma = 2;
    f.y.assign(4, 0);
    f.y[f.g->b_vertex(0)] = f.gamma;
    CompressedState st = f.state();
    int bA = st.b_active_rep(0);
    REQUIRE(st.exists(bA));
    REQUIRE(st.out_edges(bA).empty());  // dead-end piece: any raise is legal
    st.raise_ytilde(bA, 5);
    st.sync_piece(0);
    CHECK(st.piece_dual(0, f.g->b_vertex(0)) == f.gamma + 5);
    CHECK(st.piece_dual(0, f.g->a_vertex(0)) == -5);
    CHECK(st.piece_dual(0, f.g->b_vertex(1)) == 5);
    // Both chain edges keep slack 0: c + delta - y(a) - y(b).
    CHECK(f.costs[e0] + 1 - st.piece_dual(0, f.g->a_vertex(0)) -
              st.piece_dual(0, f.g->b_vertex(0)) ==
          0);
    CHECK(st.piece_dual(0, f.g->a_vertex(0)) + st.piece_dual(0, f.g->b_vertex(1)) -
              f.costs[e1] + 1 ==
          0);
  }
  // A boundary vertex raise propagates to each piece it belongs to.
  {
    Fixture f = internal_free_fixture();
    f.m.add(0);  // match (a0,b1): only matched vertices accumulate raises
    CompressedState st = f.state();
    int ha0 = st.hid_of_boundary(f.g->a_vertex(0));
    REQUIRE(ha0 >= 0);
    REQUIRE(st.out_edges(ha0).empty());  // no residual path out of a0
    st.raise_ytilde(ha0, 2);
    st.sync_piece(0);
    CHECK(st.piece_dual(0, f.g->a_vertex(0)) == -2);
    st.sync_piece(1);
    CHECK(st.piece_dual(1, f.g->a_vertex(0)) == -2);
    auto rep = st.verify_compressed_feasible();
    for (const auto& v : rep.violations) FAIL_CHECK(v);
  }
}

TEST_CASE("sync equalizes duals and keeps feasibility under fuzzed raises") {
  for (unsigned long long seed = 0; seed < 40; ++seed) {
    auto inst = grid_clustering(6, 6, 4, seed, 6);
    const BipartiteGraph& g = *inst.graph;
    std::vector<Weight> costs(g.num_edges());
    for (EdgeId e = 0; e < g.num_edges(); ++e)
      costs[e] = g.edge(e).cost + inst.clustering->delta(e);
    int gamma = static_cast<int>(inst.clustering->sqrt_r());
    auto s1 = gt_stage1(g, costs, gamma, false);
    CompressedState st(g, *inst.clustering, costs, s1.matching, s1.y, gamma, false);
    Rng rng(seed * 77 + 1);
    for (int step = 0; step < 30; ++step) {
      int h = static_cast<int>(rng.below(st.num_hids()));
      if (!st.exists(h)) continue;
      if (st.is_free_a(h)) continue;  // free A-duals stay zero in the algorithm
      Weight room = kUnreached;
      for (const auto& e : st.out_edges(h)) room = std::min(room, st.h_slack(e));
      if (room == kUnreached) room = st.sqrt_r();  // no out-edges: any raise is safe
      if (room <= 0) continue;
      st.raise_ytilde(h, rng.range(0, std::min<Weight>(room, 5)));
    }
    // sync_piece asserts y_j == ytilde on its targets internally.
    for (int j = 0; j < inst.clustering->num_pieces(); ++j) st.sync_piece(j);
    auto rep = st.verify_compressed_feasible();
    // The synthetic raises ignore the active-window condition (b); the
    // feasibility conditions (a),(c),(d),(e) must all survive.
    for (const auto& v : rep.violations)
      if (v.find("(b)") == std::string::npos) FAIL_CHECK(v);
  }
}

TEST_CASE("projection examples") {
  // Single-edge piece projects to the edge itself.
  {
    Fixture f = boundary_edge_fixture();
    CompressedState st = f.state();
    int hb = st.hid_of_boundary(f.g->b_vertex(0));
    int ha = st.hid_of_boundary(f.g->a_vertex(0));
    auto e = st.find_edge(hb, ha, 0);
    REQUIRE(e.has_value());
    Projection p = st.project_edge(*e);
    CHECK(p.edges == std::vector<EdgeId>{0});
    CHECK(p.vertices.front() == f.g->b_vertex(0));
    CHECK(p.vertices.back() == f.g->a_vertex(0));
  }
  // Three-hop path b1 -> a0 -> b0 -> a1 inside one piece.
  {
    Fixture f;
    f.g = std::make_unique<BipartiteGraph>(2, 2);
    EdgeId m0 = f.g->add_edge(0, 0, 0);  // (a0,b0) matched
    f.g->add_edge(0, 1, 1);              // (a0,b1): residual b1->a0, slack 0
    f.g->add_edge(1, 0, 0);              // (a1,b0): residual b0->a1
    f.ctx = std::make_unique<RClustering>(*f.g, 4, std::vector<int>{0, 0, 0}, 1);
    f.costs = {0, 1, 0};
    f.m = Matching(*f.g);
    f.m.add(m0);
    f.gamma = 2;
    f.y.assign(4, 0);
    f.y[f.g->b_vertex(1)] = f.gamma;
    CompressedState st(*f.g, *f.ctx, f.costs, f.m, f.y, f.gamma, true);
    int bA = st.b_active_rep(0);
    int aR = st.a_rep(0);
    REQUIRE(st.exists(bA));
    REQUIRE(st.exists(aR));
    auto e = st.find_edge(bA, aR, 0);
    REQUIRE(e.has_value());
    Projection p = st.project_edge(*e);
    CHECK(p.vertices.size() == 4);
    CHECK(p.vertices.front() == f.g->b_vertex(1));
    CHECK(p.vertices.back() == f.g->a_vertex(1));
  }
}

TEST_CASE("self-loop projects to a cycle of at least four edges") {
  // Piece 0: 4-cycle a0-b0-a1-b1 with (a0,b0),(a1,b1) matched; b0 boundary
  // via piece 1.
  Fixture f;
  f.g = std::make_unique<BipartiteGraph>(3, 3);
  EdgeId e00 = f.g->add_edge(0, 0, 0);
  f.g->add_edge(1, 0, 0);
  EdgeId e11 = f.g->add_edge(1, 1, 0);
  f.g->add_edge(0, 1, 0);
  f.g->add_edge(2, 0, 5);  // piece 1, makes b0 boundary
  f.ctx = std::make_unique<RClustering>(*f.g, 4, std::vector<int>{0, 0, 0, 0, 1}, 2);
  f.costs = {0, 0, 0, 0, 5};
  f.m = Matching(*f.g);
  f.m.add(e00);
  f.m.add(e11);
  f.gamma = 2;
  f.y.assign(6, 0);
  f.y[f.g->b_vertex(2)] = f.gamma;
  CompressedState st(*f.g, *f.ctx, f.costs, f.m, f.y, f.gamma, true);
  int hb0 = st.hid_of_boundary(f.g->b_vertex(0));
  auto loop = st.find_edge(hb0, hb0, 0);
  REQUIRE(loop.has_value());
  Projection p = st.project_edge(*loop);
  CHECK(p.edges.size() >= 4);
  CHECK(p.vertices.front() == p.vertices.back());
}

TEST_CASE("reduce clamps represented duals") {
  Fixture f = internal_free_fixture();
  CompressedState st = f.state();
  int bA = st.b_active_rep(0);
  REQUIRE(st.exists(bA));
  Weight before = st.ytilde(bA);
  // alpha = ytilde: no-op.
  st.reduce(bA, before);
  CHECK(st.ytilde(bA) == before);
  CHECK(st.piece_dual(0, f.g->b_vertex(1)) == before);
  // Clamp: duals above alpha drop to alpha.
  st.reduce(bA, before - 1);
  CHECK(st.ytilde(bA) == before - 1);
  CHECK(st.piece_dual(0, f.g->b_vertex(1)) == before - 1);
  // alpha out of range errors.
  CHECK_THROWS_AS(st.reduce(bA, -1), std::invalid_argument);
  CHECK_THROWS_AS(st.reduce(bA, st.ytilde(bA) + 1), std::invalid_argument);
}

TEST_CASE("reduce_slack zeroes the matched edge slack") {
  Fixture f;
  f.g = std::make_unique<BipartiteGraph>(2, 2);
  EdgeId e0 = f.g->add_edge(0, 0, 1);  // piece 0, matched, slack 1
  f.g->add_edge(1, 0, 1);              // piece 1
  f.g->add_edge(1, 1, 1);              // piece 1
  f.ctx = std::make_unique<RClustering>(*f.g, 4, std::vector<int>{0, 1, 1}, 2);
  f.costs = {1, 1, 1};
  f.m = Matching(*f.g);
  f.m.add(e0);
  f.gamma = 2;
  f.y.assign(4, 0);
  f.y[f.g->a_vertex(0)] = -6;
  f.y[f.g->b_vertex(0)] = 4;        // matched slack = -6+4-1+4 = 1
  f.y[f.g->b_vertex(1)] = f.gamma;  // free b1, edge slack 1+1-2 = 0
  REQUIRE(f.ctx->delta(e0) == 4);
  CompressedState st(*f.g, *f.ctx, f.costs, f.m, f.y, f.gamma, true);

  Vertex b0 = f.g->b_vertex(0);
  st.reduce_slack(b0);
  CHECK(st.piece_dual(0, b0) == 3);  // slack 1 removed
  CHECK(st.piece_dual(1, b0) == 3);  // boundary: both pieces follow
  CHECK(st.ytilde(st.hid_of_boundary(b0)) == 3);
  // Now the matched edge is tight; a second call is a no-op.
  st.reduce_slack(b0);
  CHECK(st.piece_dual(0, b0) == 3);
  // Unmatched vertices are rejected.
  CHECK_THROWS_AS(st.reduce_slack(f.g->b_vertex(1)), std::invalid_argument);
}

TEST_CASE("verifier flags fabricated violations") {
  Fixture f = boundary_edge_fixture();
  CompressedState st = f.state();
  REQUIRE(st.verify_compressed_feasible().ok());
  // (a): positive dual on an A-vertex.
  int ha = st.hid_of_boundary(f.g->a_vertex(0));
  st.poke_ytilde_for_test(ha, 1);
  auto rep = st.verify_compressed_feasible();
  bool found_a = false;
  for (const auto& v : rep.violations)
    if (v.find("(a)") != std::string::npos) found_a = true;
  CHECK(found_a);
  st.poke_ytilde_for_test(ha, 0);
  // (d): raise ytilde of a source beyond its smallest outgoing slack.
  int hb = st.hid_of_boundary(f.g->b_vertex(0));
  Weight room = kUnreached;
  for (const auto& e : st.out_edges(hb)) room = std::min(room, st.h_slack(e));
  REQUIRE(room != kUnreached);
  st.poke_ytilde_for_test(hb, st.ytilde(hb) + room + 1);
  rep = st.verify_compressed_feasible();
  bool found_d = false;
  for (const auto& v : rep.violations)
    if (v.find("(d)") != std::string::npos) found_d = true;
  CHECK(found_d);
}

TEST_CASE("from_r_feasible validates its preconditions") {
  Fixture f = boundary_edge_fixture();
  // Nonzero free A dual.
  {
    Fixture bad = boundary_edge_fixture();
    bad.y[bad.g->a_vertex(0)] = -1;
    CHECK_THROWS_AS(bad.state(), std::invalid_argument);
  }
  // Unequal free B duals.
  {
    Fixture bad = boundary_edge_fixture();
    bad.y[bad.g->b_vertex(1)] = bad.gamma + 1;
    CHECK_THROWS_AS(bad.state(), std::invalid_argument);
  }
  CHECK(f.state().verify_compressed_feasible().ok());
}

TEST_CASE("to_r_feasible round-trips through verify_r_feasible") {
  for (unsigned long long seed = 0; seed < 4; ++seed) {
    auto inst = grid_clustering(8, 4, 4, seed, 7);
    const BipartiteGraph& g = *inst.graph;
    std::vector<Weight> costs(g.num_edges());
    for (EdgeId e = 0; e < g.num_edges(); ++e)
      costs[e] = g.edge(e).cost + inst.clustering->delta(e);
    int gamma = static_cast<int>(inst.clustering->sqrt_r());
    auto s1 = gt_stage1(g, costs, gamma, true);
    CompressedState st(g, *inst.clustering, costs, s1.matching, s1.y, gamma, true);
    Matching m;
    std::vector<Weight> y;
    st.to_r_feasible(&m, &y);
    CostModel cm = make_cost_model(g, *inst.clustering, costs);
    CHECK(verify_r_feasible(cm, m, y).ok());
    // Identity on an already-synchronized state: duals unchanged.
    Matching m2;
    std::vector<Weight> y2;
    st.to_r_feasible(&m2, &y2);
    CHECK(y2 == y);
  }
}

TEST_CASE("H debug dump matches the golden text") {
  Fixture f = boundary_edge_fixture();
  CompressedState st = f.state();
  const char* golden =
      "H pieces 2\n"
      "piece 0 edges 1\n"
      "  v2 -> v0 phi 7 slack 5\n"
      "piece 1 edges 2\n"
      "  v2 -> a1 phi 5 slack 3\n"
      "  bA1 -> v0 phi 5 slack 3\n";
  CHECK(st.dump_h() == golden);
  // The dump tracks dual changes: raising b0 tightens its outgoing slacks.
  st.raise_ytilde(st.hid_of_boundary(f.g->b_vertex(0)), 1);
  const char* golden_after =
      "H pieces 2\n"
      "piece 0 edges 1\n"
      "  v2 -> v0 phi 7 slack 4\n"
      "piece 1 edges 2\n"
      "  v2 -> a1 phi 5 slack 2\n"
      "  bA1 -> v0 phi 5 slack 3\n";
  CHECK(st.dump_h() == golden_after);
}

TEST_CASE("H size stays within the counting budget") {
  for (unsigned long long seed = 0; seed < 4; ++seed) {
    auto inst = grid_clustering(10, 6, 4, seed, 9);
    const BipartiteGraph& g = *inst.graph;
    const RClustering& ctx = *inst.clustering;
    std::vector<Weight> costs(g.num_edges());
    for (EdgeId e = 0; e < g.num_edges(); ++e) costs[e] = g.edge(e).cost + ctx.delta(e);
    int gamma = static_cast<int>(ctx.sqrt_r());
    auto s1 = gt_stage1(g, costs, gamma, false);
    CompressedState st(g, ctx, costs, s1.matching, s1.y, gamma, false);
    auto hs = st.size_stats();
    CHECK(hs.num_h_vertices <= hs.vertex_budget);
    // Boundary-to-boundary (and self-loop) edges within theta_v * (k1*sqrt(r)+1);
    // representative-incident edges within 3|K_j|+3 per piece.
    double kk_budget = 0;
    for (Vertex v = 0; v < g.num_vertices(); ++v)
      if (ctx.is_boundary(v))
        kk_budget += ctx.pieces_of_vertex(v).size() * (ctx.k1() * ctx.sqrt_r() + 1);
    double rep_budget = 0;
    for (int j = 0; j < ctx.num_pieces(); ++j)
      rep_budget += 3.0 * ctx.piece(j).boundary.size() + 3.0;
    CHECK(static_cast<double>(hs.num_h_edges) <= kk_budget + rep_budget);
  }
}
