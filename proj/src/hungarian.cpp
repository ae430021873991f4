#include "rcmatch/hungarian.hpp"

#include <algorithm>
#include <queue>

namespace rcmatch {

ResidualSearch residual_dijkstra(const BipartiteGraph& g, const Matching& m,
                                 const std::function<Weight(EdgeId)>& edge_weight,
                                 const std::vector<std::pair<Vertex, Weight>>& sources) {
  ResidualSearch out;
  out.dist.assign(g.num_vertices(), kUnreached);
  out.parent_edge.assign(g.num_vertices(), kNoEdge);
  out.parent.assign(g.num_vertices(), kNoVertex);
  using Item = std::pair<Weight, Vertex>;  // (dist, vertex); vertex breaks ties
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  for (auto [v, d] : sources) {
    if (d < out.dist[v]) {
      out.dist[v] = d;
      heap.push({d, v});
    }
  }
  while (!heap.empty()) {
    auto [d, v] = heap.top();
    heap.pop();
    if (d != out.dist[v]) continue;
    if (g.is_a(v)) {
      EdgeId e = m.matched_edge(v);
      if (e == kNoEdge) continue;  // free A-vertices are sinks
      Vertex w = g.other_endpoint(e, v);
      Weight nd = d + edge_weight(e);
      if (nd < out.dist[w]) {
        out.dist[w] = nd;
        out.parent_edge[w] = e;
        out.parent[w] = v;
        heap.push({nd, w});
      }
    } else {
      for (EdgeId e : g.incident(v)) {
        if (m.contains(e)) continue;
        Vertex w = g.other_endpoint(e, v);
        Weight nd = d + edge_weight(e);
        if (nd < out.dist[w]) {
          out.dist[w] = nd;
          out.parent_edge[w] = e;
          out.parent[w] = v;
          heap.push({nd, w});
        }
      }
    }
  }
  return out;
}

HungarianStep hungarian_search(const BipartiteGraph& g, const Matching& m, std::vector<Weight>& y,
                               const std::function<Weight(EdgeId)>& edge_slack) {
  std::vector<std::pair<Vertex, Weight>> sources;
  for (Vertex v = g.num_a(); v < g.num_vertices(); ++v)
    if (!m.is_matched(v)) sources.push_back({v, 0});
  HungarianStep step;
  if (sources.empty()) return step;
  ResidualSearch search = residual_dijkstra(g, m, edge_slack, sources);
  Vertex target = kNoVertex;
  for (Vertex v = 0; v < g.num_a(); ++v) {
    if (m.is_matched(v) || search.dist[v] == kUnreached) continue;
    if (target == kNoVertex || search.dist[v] < search.dist[target]) target = v;
  }
  if (target == kNoVertex) return step;
  Weight l_max = search.dist[target];
  for (Vertex v = 0; v < g.num_vertices(); ++v) {
    if (search.dist[v] == kUnreached || search.dist[v] > l_max) continue;
    y[v] += g.lambda(v) * (l_max - search.dist[v]);
  }
  std::vector<Vertex> rev;
  for (Vertex v = target; v != kNoVertex; v = search.parent[v]) rev.push_back(v);
  step.found = true;
  step.path.kind = WalkKind::AugmentingPath;
  step.path.vertices.assign(rev.rbegin(), rev.rend());
  step.path_slack = l_max;
  return step;
}

HungarianResult hungarian_solve(const BipartiteGraph& g) {
  HungarianResult res;
  res.matching = Matching(g);
  res.y.assign(g.num_vertices(), 0);
  auto slack_of = [&](EdgeId e) {
    Vertex a = g.endpoint_a(e), b = g.endpoint_b(e);
    Weight s = g.edge(e).cost - res.y[a] - res.y[b];
    return s;
  };
  while (true) {
    HungarianStep step = hungarian_search(g, res.matching, res.y, slack_of);
    if (!step.found) break;
    res.matching = switch_along(g, res.matching, step.path);
  }
  res.cost = res.matching.cost();
  res.perfect = res.matching.size() == std::min(g.num_a(), g.num_b()) && g.num_a() == g.num_b();
  return res;
}

namespace {

// Exhaustive search over matchings: at each A-vertex either skip it or match
// it to a free neighbour.
void brute_rec(const BipartiteGraph& g, int a, std::vector<char>& used_b, int size, Weight cost,
               int& best_size, Weight& best_cost, bool need_perfect) {
  if (a == g.num_a()) {
    if (need_perfect && size != g.num_a()) return;
    if (size > best_size || (size == best_size && cost < best_cost)) {
      best_size = size;
      best_cost = cost;
    }
    return;
  }
  // Prune: even matching everything left cannot beat best_size.
  if (size + (g.num_a() - a) < best_size) return;
  for (EdgeId e : g.incident(g.a_vertex(a))) {
    int b = g.edge(e).b;
    if (used_b[b]) continue;
    used_b[b] = 1;
    brute_rec(g, a + 1, used_b, size + 1, cost + g.edge(e).cost, best_size, best_cost, need_perfect);
    used_b[b] = 0;
  }
  brute_rec(g, a + 1, used_b, size, cost, best_size, best_cost, need_perfect);
}

}  // namespace

BruteForceResult brute_force_min_cost_perfect(const BipartiteGraph& g) {
  BruteForceResult out;
  if (g.num_a() != g.num_b()) return out;
  std::vector<char> used(g.num_b(), 0);
  int best_size = -1;
  Weight best_cost = kUnreached;
  brute_rec(g, 0, used, 0, 0, best_size, best_cost, true);
  if (best_size == g.num_a()) {
    out.feasible = true;
    out.cost = best_cost;
  }
  return out;
}

BruteForceResult brute_force_min_cost_max_cardinality(const BipartiteGraph& g, int* cardinality) {
  std::vector<char> used(g.num_b(), 0);
  int best_size = -1;
  Weight best_cost = kUnreached;
  brute_rec(g, 0, used, 0, 0, best_size, best_cost, false);
  BruteForceResult out;
  out.feasible = true;
  out.cost = best_size <= 0 ? 0 : best_cost;
  if (cardinality) *cardinality = std::max(0, best_size);
  return out;
}

}  // namespace rcmatch
