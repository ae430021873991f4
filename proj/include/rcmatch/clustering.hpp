#ifndef RCMATCH_CLUSTERING_HPP
#define RCMATCH_CLUSTERING_HPP

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "rcmatch/graph.hpp"

namespace rcmatch {

// Edge-disjoint partition of a graph into pieces, with per-piece boundary
// sets and per-edge error terms delta. Immutable after construction.
class RClustering {
 public:
  struct Piece {
    std::vector<Vertex> vertices;   // sorted, unique
    std::vector<EdgeId> edge_ids;   // edges assigned to this piece
    std::vector<Vertex> boundary;   // sorted subset of `vertices`
    int num_edges() const { return static_cast<int>(edge_ids.size()); }
    int num_vertices() const { return static_cast<int>(vertices.size()); }
  };

  // `piece_of_edge[e]` assigns every edge to exactly one piece.
  RClustering(const BipartiteGraph& g, long long r, std::vector<int> piece_of_edge, int num_pieces);

  const BipartiteGraph& graph() const { return *g_; }
  long long r() const { return r_; }
  Weight sqrt_r() const { return sqrt_r_; }  // ceil(sqrt(r)), precomputed once

  int num_pieces() const { return static_cast<int>(pieces_.size()); }
  const Piece& piece(int j) const { return pieces_[j]; }
  int piece_of_edge(EdgeId e) const { return piece_of_edge_[e]; }
  const std::vector<int>& pieces_of_vertex(Vertex v) const { return vertex_pieces_[v]; }

  bool is_boundary(Vertex v) const { return boundary_flag_[v]; }
  bool is_boundary_edge(EdgeId e) const { return boundary_edge_flag_[e]; }
  int num_boundary_vertices() const { return num_boundary_; }
  int sum_piece_boundary() const { return sum_piece_boundary_; }  // sum_j |K_j|

  Weight delta(EdgeId e) const { return delta_[e]; }
  // max over incident edges of delta; 1 for isolated vertices.
  Weight max_delta_at(Vertex v) const { return max_delta_at_[v]; }

  // Measured constants of Definition-style bounds: max_j |K_j| <= k1*sqrt(r),
  // sum_j |K_j| <= k2*n/sqrt(r), with n the total vertex count.
  double k1() const { return k1_; }
  double k2() const { return k2_; }

  struct ValidationReport {
    bool ok = true;                    // hard failure only on a non-partition
    std::vector<std::string> errors;   // non-partition problems
    std::vector<std::string> warnings; // size-bound advisories
    int num_pieces = 0;
    int max_piece_vertices = 0;
    int max_piece_boundary = 0;
    double k1 = 0.0;
    double k2 = 0.0;
  };
  ValidationReport validate() const;

 private:
  const BipartiteGraph* g_;
  long long r_;
  Weight sqrt_r_;
  std::vector<int> piece_of_edge_;
  std::vector<Piece> pieces_;
  std::vector<std::vector<int>> vertex_pieces_;
  std::vector<char> boundary_flag_;
  std::vector<char> boundary_edge_flag_;
  std::vector<Weight> delta_;
  std::vector<Weight> max_delta_at_;
  int num_boundary_ = 0;
  int sum_piece_boundary_ = 0;
  double k1_ = 0.0;
  double k2_ = 0.0;
};

inline Weight ceil_sqrt(long long r) {
  Weight s = static_cast<Weight>(std::sqrt(static_cast<double>(r)));
  while (s * s < r) ++s;
  while (s > 1 && (s - 1) * (s - 1) >= r) --s;
  return s;
}

// k = ceil(2*k1 + 4*k2 + 2) from the measured clustering constants.
long long clustering_constant_k(const RClustering& ctx);

// Default r when unspecified: ceil(n^{2/5}) over the total vertex count.
long long default_r(const BipartiteGraph& g);

// Trivial single-piece clustering (every edge in piece 0, no boundary).
RClustering single_piece_clustering(const BipartiteGraph& g, long long r = 4);

// A generated graph plus its clustering. The graph lives behind a stable
// address because RClustering keeps a pointer to it.
struct Instance {
  std::unique_ptr<BipartiteGraph> graph;
  std::unique_ptr<RClustering> clustering;
  std::vector<Vertex> vid_of_cell;  // grid only: (x,y) -> vertex id, index x + w*y
};

// Axis-aligned grid instance: (w x h) grid graph with checkerboard
// bipartition, random integer costs in [0, cmax], tiled into
// ceil(w/s) * ceil(h/s) pieces with s = ceil(sqrt(r)).
Instance grid_clustering(int w, int h, long long r, unsigned long long seed, Weight cmax);

// Random "chain of pieces" instance with a planted perfect matching:
// l pieces, each a random bipartite block, consecutive pieces share one
// vertex. Exercises boundary machinery on non-grid structure.
Instance chain_clustering(int num_pieces, int piece_size, int extra_edges, long long r,
                          unsigned long long seed, Weight cmax);

}  // namespace rcmatch

#endif  // RCMATCH_CLUSTERING_HPP
