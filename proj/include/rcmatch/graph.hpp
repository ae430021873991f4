#ifndef RCMATCH_GRAPH_HPP
#define RCMATCH_GRAPH_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace rcmatch {

using Weight = long long;
using Vertex = int;  // 0..n_a-1 are A-vertices, n_a..n_a+n_b-1 are B-vertices.
using EdgeId = int;

constexpr Vertex kNoVertex = -1;
constexpr EdgeId kNoEdge = -1;

// Invariant violations detected at runtime (dual feasibility, stale
// compressed edges, ...). Parse errors and precondition violations use
// std::invalid_argument / parse_error instead.
class feasibility_error : public std::runtime_error {
 public:
  explicit feasibility_error(const std::string& what) : std::runtime_error(what) {}
};

class stale_edge_error : public std::runtime_error {
 public:
  explicit stale_edge_error(const std::string& what) : std::runtime_error(what) {}
};

class infeasible_error : public std::runtime_error {
 public:
  explicit infeasible_error(const std::string& what) : std::runtime_error(what) {}
};

struct Edge {
  int a;        // index into A, 0-based
  int b;        // index into B, 0-based
  Weight cost;  // non-negative integer
};

// Bipartite graph with parts A and B and non-negative integer edge costs.
// Edges carry a stable index; duplicate (a,b) pairs are rejected.
class BipartiteGraph {
 public:
  BipartiteGraph() = default;
  BipartiteGraph(int n_a, int n_b) : n_a_(n_a), n_b_(n_b), adj_(n_a + n_b) {
    if (n_a < 0 || n_b < 0) throw std::invalid_argument("negative part size");
  }

  int num_a() const { return n_a_; }
  int num_b() const { return n_b_; }
  int num_vertices() const { return n_a_ + n_b_; }
  int num_edges() const { return static_cast<int>(edges_.size()); }

  Vertex a_vertex(int a) const { return a; }
  Vertex b_vertex(int b) const { return n_a_ + b; }
  bool is_a(Vertex v) const { return v >= 0 && v < n_a_; }
  bool is_b(Vertex v) const { return v >= n_a_ && v < n_a_ + n_b_; }

  // lambda_v = -1 on A, +1 on B.
  int lambda(Vertex v) const { return is_a(v) ? -1 : 1; }

  EdgeId add_edge(int a, int b, Weight cost);

  const Edge& edge(EdgeId e) const { return edges_[e]; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<EdgeId>& incident(Vertex v) const { return adj_[v]; }

  Vertex endpoint_a(EdgeId e) const { return edges_[e].a; }
  Vertex endpoint_b(EdgeId e) const { return n_a_ + edges_[e].b; }
  Vertex other_endpoint(EdgeId e, Vertex v) const {
    return v == endpoint_a(e) ? endpoint_b(e) : endpoint_a(e);
  }

  // Edge between two vertices (one from each side), or kNoEdge.
  EdgeId edge_between(Vertex u, Vertex v) const;

  Weight max_cost() const;
  Weight total_cost() const;

  void check_vertex(Vertex v) const {
    if (v < 0 || v >= num_vertices()) throw std::invalid_argument("vertex index out of range");
  }

 private:
  int n_a_ = 0;
  int n_b_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<EdgeId>> adj_;
};

// Vertex-disjoint edge set. Stores, per vertex, the incident matching edge.
class Matching {
 public:
  Matching() = default;
  explicit Matching(const BipartiteGraph& g) : g_(&g), match_edge_(g.num_vertices(), kNoEdge) {}

  const BipartiteGraph& graph() const { return *g_; }
  int size() const { return size_; }

  bool is_matched(Vertex v) const { return match_edge_[v] != kNoEdge; }
  EdgeId matched_edge(Vertex v) const { return match_edge_[v]; }
  Vertex partner(Vertex v) const {
    EdgeId e = match_edge_[v];
    return e == kNoEdge ? kNoVertex : g_->other_endpoint(e, v);
  }
  bool contains(EdgeId e) const {
    return match_edge_[g_->endpoint_a(e)] == e;
  }

  void add(EdgeId e);
  void remove(EdgeId e);
  // Flips membership of one edge; endpoints must be consistent before the call.
  void toggle(EdgeId e) { contains(e) ? remove(e) : add(e); }

  std::vector<EdgeId> edge_ids() const;
  Weight cost() const;

  void check_consistent() const;

 private:
  const BipartiteGraph* g_ = nullptr;
  std::vector<EdgeId> match_edge_;
  int size_ = 0;
};

enum class WalkKind { AugmentingPath, AlternatingPath, AlternatingCycle };

// A directed walk in the residual graph G_M, stored as its vertex sequence.
// Matched edges are directed A->B, unmatched edges B->A; a walk traverses
// consecutive vertices along residual edge directions.
struct AlternatingWalk {
  std::vector<Vertex> vertices;
  WalkKind kind = WalkKind::AlternatingPath;
};

// Residual out-edges of v under M: (v,u) oriented A->B iff the edge is matched.
std::vector<EdgeId> residual_successors(const BipartiteGraph& g, Vertex v, const Matching& m);

// Validates that `walk` alternates w.r.t. `m` and is simple (no repeated
// interior vertices; a cycle repeats only its first/last vertex).
void check_alternating_walk(const BipartiteGraph& g, const Matching& m, const AlternatingWalk& walk);

// M <- M (+) walk. Augmenting paths grow |M| by one; alternating paths and
// cycles keep |M| unchanged. Throws std::invalid_argument on non-alternating
// or non-simple input.
Matching switch_along(const BipartiteGraph& g, const Matching& m, const AlternatingWalk& walk);

}  // namespace rcmatch

#endif  // RCMATCH_GRAPH_HPP
