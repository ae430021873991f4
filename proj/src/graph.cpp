#include "rcmatch/graph.hpp"

#include <algorithm>

namespace rcmatch {

EdgeId BipartiteGraph::add_edge(int a, int b, Weight cost) {
  if (a < 0 || a >= n_a_ || b < 0 || b >= n_b_) throw std::invalid_argument("edge endpoint out of range");
  if (cost < 0) throw std::invalid_argument("negative edge cost");
  if (edge_between(a_vertex(a), b_vertex(b)) != kNoEdge)
    throw std::invalid_argument("duplicate edge (" + std::to_string(a) + "," + std::to_string(b) + ")");
  EdgeId id = static_cast<EdgeId>(edges_.size());
  edges_.push_back(Edge{a, b, cost});
  adj_[a_vertex(a)].push_back(id);
  adj_[b_vertex(b)].push_back(id);
  return id;
}

EdgeId BipartiteGraph::edge_between(Vertex u, Vertex v) const {
  check_vertex(u);
  check_vertex(v);
  if (is_a(u) == is_a(v)) return kNoEdge;
  Vertex probe = adj_[u].size() <= adj_[v].size() ? u : v;
  Vertex other = probe == u ? v : u;
  for (EdgeId e : adj_[probe])
    if (other_endpoint(e, probe) == other) return e;
  return kNoEdge;
}

Weight BipartiteGraph::max_cost() const {
  Weight c = 0;
  for (const Edge& e : edges_) c = std::max(c, e.cost);
  return c;
}

Weight BipartiteGraph::total_cost() const {
  Weight c = 0;
  for (const Edge& e : edges_) c += e.cost;
  return c;
}

void Matching::add(EdgeId e) {
  Vertex a = g_->endpoint_a(e), b = g_->endpoint_b(e);
  if (match_edge_[a] != kNoEdge || match_edge_[b] != kNoEdge)
    throw std::invalid_argument("matching add: endpoint already matched");
  match_edge_[a] = e;
  match_edge_[b] = e;
  ++size_;
}

void Matching::remove(EdgeId e) {
  Vertex a = g_->endpoint_a(e), b = g_->endpoint_b(e);
  if (match_edge_[a] != e || match_edge_[b] != e)
    throw std::invalid_argument("matching remove: edge not in matching");
  match_edge_[a] = kNoEdge;
  match_edge_[b] = kNoEdge;
  --size_;
}

std::vector<EdgeId> Matching::edge_ids() const {
  std::vector<EdgeId> out;
  out.reserve(size_);
  for (int a = 0; a < g_->num_a(); ++a)
    if (match_edge_[a] != kNoEdge) out.push_back(match_edge_[a]);
  return out;
}

Weight Matching::cost() const {
  Weight c = 0;
  for (EdgeId e : edge_ids()) c += g_->edge(e).cost;
  return c;
}

void Matching::check_consistent() const {
  int count = 0;
  for (Vertex v = 0; v < g_->num_vertices(); ++v) {
    EdgeId e = match_edge_[v];
    if (e == kNoEdge) continue;
    Vertex a = g_->endpoint_a(e), b = g_->endpoint_b(e);
    if (v != a && v != b) throw std::logic_error("matching map inconsistent");
    if (match_edge_[a] != e || match_edge_[b] != e) throw std::logic_error("matching maps disagree");
    ++count;
  }
  if (count != 2 * size_) throw std::logic_error("matching size inconsistent");
}

std::vector<EdgeId> residual_successors(const BipartiteGraph& g, Vertex v, const Matching& m) {
  g.check_vertex(v);
  std::vector<EdgeId> out;
  if (g.is_a(v)) {
    // A-vertices leave only along their matched edge.
    EdgeId e = m.matched_edge(v);
    if (e != kNoEdge) out.push_back(e);
  } else {
    for (EdgeId e : g.incident(v))
      if (!m.contains(e)) out.push_back(e);
  }
  return out;
}

void check_alternating_walk(const BipartiteGraph& g, const Matching& m, const AlternatingWalk& walk) {
  const auto& vs = walk.vertices;
  if (vs.size() < 2) throw std::invalid_argument("walk too short");
  bool cycle = walk.kind == WalkKind::AlternatingCycle;
  if (cycle && vs.front() != vs.back()) throw std::invalid_argument("cycle walk must close");
  size_t interior_end = cycle ? vs.size() - 1 : vs.size();
  std::vector<Vertex> seen(vs.begin(), vs.begin() + interior_end);
  std::sort(seen.begin(), seen.end());
  if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
    throw std::invalid_argument("walk is not simple");
  for (size_t i = 0; i + 1 < vs.size(); ++i) {
    Vertex u = vs[i], w = vs[i + 1];
    EdgeId e = g.edge_between(u, w);
    if (e == kNoEdge) throw std::invalid_argument("walk uses a non-edge");
    // Residual orientation: matched edges run A->B, unmatched B->A.
    bool matched = m.contains(e);
    bool ok = matched ? g.is_a(u) : g.is_b(u);
    if (!ok) throw std::invalid_argument("walk violates residual orientation");
  }
  if (walk.kind == WalkKind::AugmentingPath) {
    if (m.is_matched(vs.front()) || m.is_matched(vs.back()))
      throw std::invalid_argument("augmenting path endpoints must be free");
  }
  if (!cycle) {
    // A switchable walk may not leave a dangling second matched edge at its
    // endpoints: a B-start leaves along an unmatched edge, an A-end is
    // entered along one, so those endpoints must be free.
    if (g.is_b(vs.front()) && m.is_matched(vs.front()))
      throw std::invalid_argument("walk starts at a matched B-vertex");
    if (g.is_a(vs.back()) && m.is_matched(vs.back()))
      throw std::invalid_argument("walk ends at a matched A-vertex");
  }
}

Matching switch_along(const BipartiteGraph& g, const Matching& m, const AlternatingWalk& walk) {
  check_alternating_walk(g, m, walk);
  Matching out = m;
  const auto& vs = walk.vertices;
  // Remove all matched walk edges first, then add the rest.
  std::vector<EdgeId> to_add;
  for (size_t i = 0; i + 1 < vs.size(); ++i) {
    EdgeId e = g.edge_between(vs[i], vs[i + 1]);
    if (out.contains(e))
      out.remove(e);
    else
      to_add.push_back(e);
  }
  for (EdgeId e : to_add) out.add(e);
  out.check_consistent();
  return out;
}

}  // namespace rcmatch
