#ifndef RCMATCH_HUNGARIAN_HPP
#define RCMATCH_HUNGARIAN_HPP

#include <functional>
#include <limits>
#include <vector>

#include "rcmatch/graph.hpp"

namespace rcmatch {

constexpr Weight kUnreached = std::numeric_limits<Weight>::max();

// Multi-source Dijkstra over the residual graph G_M with per-edge
// non-negative weights (slacks). Returns per-vertex distances and parent
// edges; sources start at the given offsets.
struct ResidualSearch {
  std::vector<Weight> dist;
  std::vector<EdgeId> parent_edge;  // edge used to reach the vertex
  std::vector<Vertex> parent;
};
ResidualSearch residual_dijkstra(const BipartiteGraph& g, const Matching& m,
                                 const std::function<Weight(EdgeId)>& edge_weight,
                                 const std::vector<std::pair<Vertex, Weight>>& sources);

// One Hungarian search step: finds a minimum-total-slack augmenting path from
// the free B-vertices to a free A-vertex and applies the dual adjustment
// y(v) += lambda_v * (l_max - l_v) for l_v <= l_max, after which every path
// edge is tight. Returns the path, or nullopt when no augmenting path exists.
struct HungarianStep {
  bool found = false;
  AlternatingWalk path;
  Weight path_slack = 0;  // l_max before the update
};
HungarianStep hungarian_search(const BipartiteGraph& g, const Matching& m, std::vector<Weight>& y,
                               const std::function<Weight(EdgeId)>& edge_slack);

struct HungarianResult {
  Matching matching;
  std::vector<Weight> y;  // satisfies y(u)+y(v) <= c(u,v), tight on M
  Weight cost = 0;
  bool perfect = false;
};

// Classical Hungarian solver: minimum-cost matching among maximum-cardinality
// matchings. `perfect` reports whether everything got matched.
HungarianResult hungarian_solve(const BipartiteGraph& g);

// Minimum-cost perfect matching by exhaustive enumeration; test oracle for
// small instances. Returns nullopt-style flag when no perfect matching.
struct BruteForceResult {
  bool feasible = false;
  Weight cost = 0;
};
BruteForceResult brute_force_min_cost_perfect(const BipartiteGraph& g);
// Minimum cost over maximum-cardinality matchings, by exhaustive search.
BruteForceResult brute_force_min_cost_max_cardinality(const BipartiteGraph& g, int* cardinality = nullptr);

}  // namespace rcmatch

#endif  // RCMATCH_HUNGARIAN_HPP
