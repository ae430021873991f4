#ifndef RCMATCH_COMPRESSED_HPP
#define RCMATCH_COMPRESSED_HPP

#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "rcmatch/feasibility.hpp"

namespace rcmatch {

enum class HKind { Boundary, FreeAInternal, FreeBActive, FreeBInactive };

// Value copy of a compressed edge; robust against piece reconstruction
// (reconstruction re-derives the same weights as long as the matching and
// represented sets are unchanged).
struct HEdgeRef {
  int from = -1;
  int to = -1;
  int piece = -1;
  Weight phi = 0;
};

// A residual walk in G realized by projecting compressed edges.
struct Projection {
  std::vector<Vertex> vertices;
  std::vector<EdgeId> edges;
  Weight total_slack = 0;
};

struct CompressedReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

struct HSizeStats {
  int num_h_vertices = 0;
  int num_h_edges = 0;
  int vertex_budget = 0;  // sum_j (|K_j| + 3)
};

// Compressed residual graph H over boundary + free-internal vertices, with
// per-piece dual weights y_j and global duals ytilde, plus the Construct /
// Sync / Reduce / ReduceSlack / projection machinery.
//
// hid layout: boundary vertices first (in ascending vid order), then three
// reserved ids per piece: a_j, b_j^A, b_j^I.
class CompressedState {
 public:
  // from_r_feasible: requires (m, y) R-feasible under `costs`, free A-duals
  // zero and free B-duals all equal to gamma >= sqrt(r).
  CompressedState(const BipartiteGraph& g, const RClustering& ctx, const std::vector<Weight>& costs,
                  const Matching& m, const std::vector<Weight>& y, Weight gamma,
                  bool debug = false);

  const BipartiteGraph& graph() const { return *g_; }
  const RClustering& clustering() const { return *ctx_; }
  const Matching& matching() const { return m_; }
  CostModel cost_model() const { return CostModel{g_, ctx_, costs_}; }
  Weight beta() const { return beta_; }
  Weight gamma() const { return gamma_; }
  Weight sqrt_r() const { return ctx_->sqrt_r(); }
  bool debug() const { return debug_; }

  // --- hid space ---
  int num_hids() const { return static_cast<int>(ytilde_.size()); }
  int hid_of_boundary(Vertex v) const { return hid_of_boundary_[v]; }
  int a_rep(int piece) const { return first_rep_ + 3 * piece; }
  int b_active_rep(int piece) const { return first_rep_ + 3 * piece + 1; }
  int b_inactive_rep(int piece) const { return first_rep_ + 3 * piece + 2; }
  HKind kind(int hid) const;
  bool exists(int hid) const;
  int piece_of_rep(int hid) const { return (hid - first_rep_) / 3; }
  Vertex boundary_vid(int hid) const { return boundary_of_hid_[hid]; }
  bool is_b_side(int hid) const;  // true if the hid represents B-vertices

  Weight ytilde(int hid) const { return ytilde_[hid]; }
  Weight ymag(int hid) const { return ytilde_[hid] < 0 ? -ytilde_[hid] : ytilde_[hid]; }

  // Free-B status in H. Active means free with ytilde below beta.
  bool is_free_b(int hid) const;
  bool is_active_free_b(int hid) const { return is_free_b(hid) && ymag(hid) < beta_; }
  bool is_free_a(int hid) const;
  std::vector<int> active_free_b_hids() const;
  // max ytilde over active free B-vertices of H (0 when none).
  Weight y_max() const;
  int count_free_vertices() const;  // free vertices of G under the matching

  const std::vector<Vertex>& internal_free_a(int j) const { return free_a_internal_[j]; }
  const std::vector<Vertex>& internal_active_b(int j) const { return active_b_internal_[j]; }
  const std::vector<Vertex>& internal_inactive_b(int j) const { return inactive_b_internal_[j]; }
  Weight piece_dual(int j, Vertex v) const;

  // --- H edges ---
  // Minimum-key outgoing edge of `hid` (key = phi + |ytilde(to)|, so the
  // ordering is the slack ordering). Among equal-key edges prefers targets on
  // the current search path, earliest path position first; `path_pos`
  // returns a non-negative position for on-path hids. Returns nullopt when
  // the vertex has no outgoing edges.
  std::optional<HEdgeRef> min_out_edge(int hid, const std::vector<int>& path_pos) const;
  Weight h_slack(const HEdgeRef& e) const { return e.phi - ymag(e.from) + ymag(e.to); }
  std::vector<HEdgeRef> out_edges(int hid) const;  // snapshot, any order
  // Current version of the (from,to,piece) edge; reconstruction may have
  // lowered its weight since a search saw it.
  std::optional<HEdgeRef> find_edge(int from, int to, int piece) const;
  HSizeStats size_stats() const;

  // --- operations ---
  void construct_piece(int j);
  void sync_piece(int j);
  Projection project_edge(const HEdgeRef& e) const;
  // Projects a path or cycle in H and concatenates the segments; validates
  // simplicity and (in debug mode) admissibility of every edge.
  Projection project_h_path(const std::vector<HEdgeRef>& path) const;

  // Raises |ytilde(hid)| by `amount` >= 0 and re-keys incoming edges.
  void raise_ytilde(int hid, Weight amount);
  // Re-homes the represented set of b_j^A into b_j^I once its dual reaches
  // beta: sync, clamp the represented duals to beta, merge, reconstruct.
  void inactivate_piece_actives(int j);

  void reduce(int rep_hid, Weight alpha);
  void reduce_slack(Vertex b);

  // Flips a projected walk: updates the matching, per-piece free sets and
  // boundary free status. Pieces are NOT reconstructed here.
  void flip_walk(const Projection& walk);

  CompressedReport verify_compressed_feasible() const;
  // Syncs every piece and extracts a single global dual per vertex.
  void to_r_feasible(Matching* m_out, std::vector<Weight>* y_out);

  // Deterministic debug dump of H: per-piece edge lists with weights and
  // slacks, suitable for golden-file tests.
  std::string dump_h() const;

  // Debug helper: recomputes projections of (a sample of) stored edges and
  // checks total slack against s_H. Throws on mismatch.
  void check_projection_slacks(int j, int sample_cap = 8) const;

  // Test/diagnostic hook: overwrites a dual without any validation, so
  // verifier tests can fabricate broken states.
  void poke_ytilde_for_test(int hid, Weight value) { set_ytilde(hid, value); }

 private:
  struct HEdge {
    int from, to, piece;
    Weight phi;
    Weight key;  // phi + |ytilde(to)| at insertion time
    bool alive;
  };
  struct PieceWork;  // per-piece scratch residual graph

  int local_index(int j, Vertex v) const;
  Weight piece_slack(int j, EdgeId e) const;
  void build_piece_residual(int j, PieceWork& w) const;
  void dijkstra(const PieceWork& w, std::vector<Weight>& dist, std::vector<int>& parent_edge,
                const std::vector<std::pair<int, Weight>>& sources) const;
  void insert_edge(int from, int to, int piece, Weight phi);
  void drop_piece_edges(int j);
  void rekey_in_edges(int hid);
  void set_ytilde(int hid, Weight value);
  void remove_internal(std::vector<Vertex>& set, Vertex v);
  Projection project_concrete(int j, const std::vector<std::pair<int, Weight>>& sources,
                              int target_local, const HEdgeRef& e, bool self_loop) const;

  const BipartiteGraph* g_;
  const RClustering* ctx_;
  const std::vector<Weight>* costs_;
  bool debug_;

  Matching m_;
  std::vector<std::vector<Weight>> y_piece_;  // per piece, indexed by local vertex index

  std::vector<int> hid_of_boundary_;
  std::vector<Vertex> boundary_of_hid_;
  int first_rep_ = 0;
  std::vector<Weight> ytilde_;
  std::vector<char> rep_exists_;

  std::vector<std::vector<Vertex>> free_a_internal_;
  std::vector<std::vector<Vertex>> active_b_internal_;
  std::vector<std::vector<Vertex>> inactive_b_internal_;

  std::vector<HEdge> edges_;
  std::vector<int> free_slots_;
  std::vector<std::vector<int>> piece_edges_;
  std::vector<std::set<std::tuple<Weight, int, int>>> out_index_;  // (key, to, edge id)
  std::vector<std::set<int>> in_edges_;

  Weight beta_ = 0;
  Weight gamma_ = 0;
};

}  // namespace rcmatch

#endif  // RCMATCH_COMPRESSED_HPP
