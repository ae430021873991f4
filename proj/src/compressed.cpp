#include "rcmatch/compressed.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>

#include "rcmatch/hungarian.hpp"

namespace rcmatch {

namespace {
Weight magnitude(Weight y) { return y < 0 ? -y : y; }
}  // namespace

struct CompressedState::PieceWork {
  struct Arc {
    int to;
    Weight w;
    EdgeId gid;
  };
  int n = 0;
  std::vector<std::vector<Arc>> fwd;
  std::vector<std::vector<Arc>> rev;
};

CompressedState::CompressedState(const BipartiteGraph& g, const RClustering& ctx,
                                 const std::vector<Weight>& costs, const Matching& m,
                                 const std::vector<Weight>& y, Weight gamma, bool debug)
    : g_(&g), ctx_(&ctx), costs_(&costs), debug_(debug), m_(m), gamma_(gamma) {
  if (static_cast<int>(costs.size()) != g.num_edges() ||
      static_cast<int>(y.size()) != g.num_vertices())
    throw std::invalid_argument("size mismatch");
  if (gamma < ctx.sqrt_r()) throw std::invalid_argument("free B-duals must be >= sqrt(r)");
  for (Vertex v = 0; v < g.num_vertices(); ++v) {
    if (m.is_matched(v)) continue;
    if (g.is_a(v) && y[v] != 0) throw std::invalid_argument("free A-duals must be zero");
    if (g.is_b(v) && y[v] != gamma)
      throw std::invalid_argument("free B-duals must all equal gamma");
  }
  {
    CostModel cm{g_, ctx_, costs_};
    auto rep = verify_r_feasible(cm, m_, y);
    if (!rep.ok()) throw feasibility_error("from_r_feasible: input is not R-feasible");
  }

  // beta = ceil(sqrt(n)/r^{1/4}) * ceil(sqrt(r)), forced above gamma.
  double n = static_cast<double>(std::max(1, g.num_vertices()));
  double quarter = std::pow(static_cast<double>(ctx.r()), 0.25);
  Weight phases = static_cast<Weight>(std::ceil(std::sqrt(n) / quarter - 1e-9));
  beta_ = std::max<Weight>(phases * ctx.sqrt_r(), gamma + 1);

  int l = ctx.num_pieces();
  y_piece_.resize(l);
  for (int j = 0; j < l; ++j) {
    const auto& vids = ctx.piece(j).vertices;
    y_piece_[j].resize(vids.size());
    for (size_t i = 0; i < vids.size(); ++i) y_piece_[j][i] = y[vids[i]];
  }

  hid_of_boundary_.assign(g.num_vertices(), -1);
  for (Vertex v = 0; v < g.num_vertices(); ++v)
    if (ctx.is_boundary(v)) {
      hid_of_boundary_[v] = static_cast<int>(boundary_of_hid_.size());
      boundary_of_hid_.push_back(v);
    }
  first_rep_ = static_cast<int>(boundary_of_hid_.size());
  ytilde_.assign(first_rep_ + 3 * l, 0);
  rep_exists_.assign(3 * l, 0);
  for (int h = 0; h < first_rep_; ++h) ytilde_[h] = y[boundary_of_hid_[h]];

  free_a_internal_.resize(l);
  active_b_internal_.resize(l);
  inactive_b_internal_.resize(l);
  for (int j = 0; j < l; ++j) {
    for (Vertex v : ctx.piece(j).vertices) {
      if (ctx.is_boundary(v) || m_.is_matched(v)) continue;
      if (g.is_a(v))
        free_a_internal_[j].push_back(v);
      else
        active_b_internal_[j].push_back(v);
    }
    if (!free_a_internal_[j].empty()) {
      rep_exists_[a_rep(j) - first_rep_] = 1;
      ytilde_[a_rep(j)] = 0;
    }
    if (!active_b_internal_[j].empty()) {
      rep_exists_[b_active_rep(j) - first_rep_] = 1;
      ytilde_[b_active_rep(j)] = gamma;
    }
  }

  out_index_.resize(num_hids());
  in_edges_.resize(num_hids());
  piece_edges_.resize(l);
  for (int j = 0; j < l; ++j) construct_piece(j);
  if (debug_) {
    auto rep = verify_compressed_feasible();
    if (!rep.ok())
      throw feasibility_error("from_r_feasible produced an infeasible state: " +
                              rep.violations.front());
  }
}

HKind CompressedState::kind(int hid) const {
  if (hid < first_rep_) return HKind::Boundary;
  switch ((hid - first_rep_) % 3) {
    case 0:
      return HKind::FreeAInternal;
    case 1:
      return HKind::FreeBActive;
    default:
      return HKind::FreeBInactive;
  }
}

bool CompressedState::exists(int hid) const {
  if (hid < first_rep_) return true;
  return rep_exists_[hid - first_rep_];
}

bool CompressedState::is_b_side(int hid) const {
  if (hid < first_rep_) return g_->is_b(boundary_of_hid_[hid]);
  return kind(hid) != HKind::FreeAInternal;
}

bool CompressedState::is_free_b(int hid) const {
  if (hid < first_rep_) {
    Vertex v = boundary_of_hid_[hid];
    return g_->is_b(v) && !m_.is_matched(v);
  }
  return kind(hid) != HKind::FreeAInternal && exists(hid);
}

bool CompressedState::is_free_a(int hid) const {
  if (hid < first_rep_) {
    Vertex v = boundary_of_hid_[hid];
    return g_->is_a(v) && !m_.is_matched(v);
  }
  return kind(hid) == HKind::FreeAInternal && exists(hid);
}

std::vector<int> CompressedState::active_free_b_hids() const {
  std::vector<int> out;
  for (int h = 0; h < num_hids(); ++h)
    if (is_active_free_b(h)) out.push_back(h);
  return out;
}

Weight CompressedState::y_max() const {
  Weight best = 0;
  for (int h = 0; h < num_hids(); ++h)
    if (is_active_free_b(h)) best = std::max(best, ytilde_[h]);
  return best;
}

int CompressedState::count_free_vertices() const {
  int c = 0;
  for (Vertex v = 0; v < g_->num_vertices(); ++v)
    if (!m_.is_matched(v)) ++c;
  return c;
}

Weight CompressedState::piece_dual(int j, Vertex v) const { return y_piece_[j][local_index(j, v)]; }

int CompressedState::local_index(int j, Vertex v) const {
  const auto& vids = ctx_->piece(j).vertices;
  auto it = std::lower_bound(vids.begin(), vids.end(), v);
  if (it == vids.end() || *it != v) throw std::invalid_argument("vertex not in piece");
  return static_cast<int>(it - vids.begin());
}

Weight CompressedState::piece_slack(int j, EdgeId e) const {
  Vertex a = g_->endpoint_a(e), b = g_->endpoint_b(e);
  Weight ya = y_piece_[j][local_index(j, a)];
  Weight yb = y_piece_[j][local_index(j, b)];
  Weight c = (*costs_)[e], d = ctx_->delta(e);
  return m_.contains(e) ? ya + yb - c + d : c + d - ya - yb;
}

void CompressedState::build_piece_residual(int j, PieceWork& w) const {
  const auto& piece = ctx_->piece(j);
  w.n = piece.num_vertices();
  w.fwd.assign(w.n, {});
  w.rev.assign(w.n, {});
  for (EdgeId e : piece.edge_ids) {
    int la = local_index(j, g_->endpoint_a(e));
    int lb = local_index(j, g_->endpoint_b(e));
    Weight s = piece_slack(j, e);
    if (s < 0)
      throw feasibility_error("negative slack in piece " + std::to_string(j) + " at edge " +
                              std::to_string(e));
    int from = m_.contains(e) ? la : lb;
    int to = m_.contains(e) ? lb : la;
    w.fwd[from].push_back({to, s, e});
    w.rev[to].push_back({from, s, e});
  }
}

void CompressedState::dijkstra(const PieceWork& w, std::vector<Weight>& dist,
                               std::vector<int>& parent_edge,
                               const std::vector<std::pair<int, Weight>>& sources) const {
  dist.assign(w.n, kUnreached);
  parent_edge.assign(w.n, kNoEdge);
  using Item = std::pair<Weight, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  for (auto [v, d] : sources)
    if (d < dist[v]) {
      dist[v] = d;
      heap.push({d, v});
    }
  while (!heap.empty()) {
    auto [d, v] = heap.top();
    heap.pop();
    if (d != dist[v]) continue;
    for (const auto& arc : w.fwd[v]) {
      Weight nd = d + arc.w;
      if (nd < dist[arc.to]) {
        dist[arc.to] = nd;
        parent_edge[arc.to] = arc.gid;
        heap.push({nd, arc.to});
      }
    }
  }
}

void CompressedState::insert_edge(int from, int to, int piece, Weight phi) {
  Weight key = phi + ymag(to);
  int id;
  // Recycle a dead slot when available to keep the arena bounded.
  if (!free_slots_.empty()) {
    id = free_slots_.back();
    free_slots_.pop_back();
    edges_[id] = HEdge{from, to, piece, phi, key, true};
  } else {
    id = static_cast<int>(edges_.size());
    edges_.push_back(HEdge{from, to, piece, phi, key, true});
  }
  piece_edges_[piece].push_back(id);
  out_index_[from].insert({key, to, id});
  in_edges_[to].insert(id);
}

void CompressedState::drop_piece_edges(int j) {
  for (int id : piece_edges_[j]) {
    HEdge& e = edges_[id];
    if (!e.alive) continue;
    out_index_[e.from].erase({e.key, e.to, id});
    in_edges_[e.to].erase(id);
    e.alive = false;
    free_slots_.push_back(id);
  }
  piece_edges_[j].clear();
}

void CompressedState::rekey_in_edges(int hid) {
  for (int id : in_edges_[hid]) {
    HEdge& e = edges_[id];
    out_index_[e.from].erase({e.key, e.to, id});
    e.key = e.phi + ymag(e.to);
    out_index_[e.from].insert({e.key, e.to, id});
  }
}

void CompressedState::set_ytilde(int hid, Weight value) {
  if (ytilde_[hid] == value) return;
  ytilde_[hid] = value;
  rekey_in_edges(hid);
}

void CompressedState::construct_piece(int j) {
  drop_piece_edges(j);
  const auto& piece = ctx_->piece(j);
  if (piece.num_edges() == 0) return;
  PieceWork w;
  build_piece_residual(j, w);
  std::vector<Weight> dist;
  std::vector<int> parent;

  std::vector<int> kj_local;
  for (Vertex v : piece.boundary) kj_local.push_back(local_index(j, v));

  // Boundary-to-boundary edges and self-loops: one search per boundary vertex.
  for (size_t i = 0; i < piece.boundary.size(); ++i) {
    Vertex u = piece.boundary[i];
    int lu = kj_local[i];
    dijkstra(w, dist, parent, {{lu, 0}});
    Weight mag_u = magnitude(y_piece_[j][lu]);
    for (size_t t = 0; t < piece.boundary.size(); ++t) {
      if (t == i || dist[kj_local[t]] == kUnreached) continue;
      Vertex v = piece.boundary[t];
      Weight phi = dist[kj_local[t]] + mag_u - magnitude(y_piece_[j][kj_local[t]]);
      insert_edge(hid_of_boundary_[u], hid_of_boundary_[v], j, phi);
    }
    Weight best_loop = kUnreached;
    for (const auto& arc : w.rev[lu])
      if (dist[arc.to] != kUnreached) best_loop = std::min(best_loop, dist[arc.to] + arc.w);
    if (best_loop != kUnreached)
      insert_edge(hid_of_boundary_[u], hid_of_boundary_[u], j, best_loop);
  }

  // Edges out of the free internal B representatives (active and inactive).
  auto emit_from_rep = [&](const std::vector<Vertex>& set, int rep) {
    if (set.empty()) return;
    std::vector<std::pair<int, Weight>> sources;
    for (Vertex v : set) {
      int lv = local_index(j, v);
      sources.push_back({lv, magnitude(y_piece_[j][lv])});
    }
    dijkstra(w, dist, parent, sources);
    for (size_t t = 0; t < piece.boundary.size(); ++t) {
      if (dist[kj_local[t]] == kUnreached) continue;
      Weight phi = dist[kj_local[t]] - magnitude(y_piece_[j][kj_local[t]]);
      insert_edge(rep, hid_of_boundary_[piece.boundary[t]], j, phi);
    }
    if (!free_a_internal_[j].empty()) {
      Weight best = kUnreached;
      for (Vertex a : free_a_internal_[j])
        best = std::min(best, dist[local_index(j, a)]);
      if (best != kUnreached) insert_edge(rep, a_rep(j), j, best);
    }
  };
  emit_from_rep(active_b_internal_[j], b_active_rep(j));
  emit_from_rep(inactive_b_internal_[j], b_inactive_rep(j));

  // Edges from boundary vertices into a_j, via a reversed-graph pass.
  if (!free_a_internal_[j].empty()) {
    PieceWork wr;
    wr.n = w.n;
    wr.fwd = w.rev;
    std::vector<std::pair<int, Weight>> sources;
    for (Vertex a : free_a_internal_[j]) sources.push_back({local_index(j, a), 0});
    dijkstra(wr, dist, parent, sources);
    for (size_t t = 0; t < piece.boundary.size(); ++t) {
      if (dist[kj_local[t]] == kUnreached) continue;
      Weight phi = dist[kj_local[t]] + magnitude(y_piece_[j][kj_local[t]]);
      insert_edge(hid_of_boundary_[piece.boundary[t]], a_rep(j), j, phi);
    }
  }

  if (debug_) check_projection_slacks(j);
}

void CompressedState::sync_piece(int j) {
  const auto& piece = ctx_->piece(j);
  if (piece.num_edges() == 0) return;
  struct Target {
    int local;
    int rep_hid;
  };
  std::vector<Target> targets;
  for (Vertex v : piece.boundary) targets.push_back({local_index(j, v), hid_of_boundary_[v]});
  for (Vertex v : free_a_internal_[j]) targets.push_back({local_index(j, v), a_rep(j)});
  for (Vertex v : active_b_internal_[j]) targets.push_back({local_index(j, v), b_active_rep(j)});
  for (Vertex v : inactive_b_internal_[j]) targets.push_back({local_index(j, v), b_inactive_rep(j)});
  if (targets.empty()) return;

  Weight kappa = 0;
  std::vector<Weight> kv(targets.size());
  for (size_t i = 0; i < targets.size(); ++i) {
    kv[i] = ymag(targets[i].rep_hid) - magnitude(y_piece_[j][targets[i].local]);
    if (kv[i] < 0)
      throw feasibility_error("sync: piece dual exceeds ytilde at local vertex " +
                              std::to_string(targets[i].local));
    kappa = std::max(kappa, kv[i]);
  }
  PieceWork w;
  build_piece_residual(j, w);
  std::vector<Weight> dist;
  std::vector<int> parent;
  std::vector<std::pair<int, Weight>> sources;
  for (size_t i = 0; i < targets.size(); ++i) sources.push_back({targets[i].local, kappa - kv[i]});
  dijkstra(w, dist, parent, sources);
  for (int v = 0; v < w.n; ++v) {
    if (dist[v] == kUnreached || dist[v] > kappa) continue;
    Vertex vid = piece.vertices[v];
    y_piece_[j][v] += g_->lambda(vid) * (kappa - dist[v]);
  }
  // Post-condition: every target now carries its H dual.
  for (size_t i = 0; i < targets.size(); ++i) {
    if (magnitude(y_piece_[j][targets[i].local]) != ymag(targets[i].rep_hid))
      throw feasibility_error("sync failed to equalize duals in piece " + std::to_string(j));
  }
  if (debug_) {
    for (EdgeId e : piece.edge_ids)
      if (piece_slack(j, e) < 0)
        throw feasibility_error("sync broke R-feasibility in piece " + std::to_string(j));
    // Along the shortest-path tree, every edge whose head was updated is now
    // tight: slack'(e) = slack(e) + l(tail) - l(head) = 0.
    for (int v = 0; v < w.n; ++v) {
      if (parent[v] == kNoEdge || dist[v] == kUnreached || dist[v] > kappa) continue;
      if (piece_slack(j, parent[v]) != 0)
        throw feasibility_error("sync left slack on a shortest-path edge in piece " +
                                std::to_string(j));
    }
  }
}

Projection CompressedState::project_concrete(int j, const std::vector<std::pair<int, Weight>>& sources,
                                             int target_local, const HEdgeRef& e,
                                             bool self_loop) const {
  const auto& piece = ctx_->piece(j);
  PieceWork w;
  build_piece_residual(j, w);
  std::vector<Weight> dist;
  std::vector<int> parent;
  dijkstra(w, dist, parent, sources);

  int final_local = target_local;
  EdgeId closing = kNoEdge;
  Weight reached;
  if (self_loop) {
    // Best cycle through the (duplicated) boundary vertex: shortest path to
    // some in-neighbour plus the closing arc.
    Weight best = kUnreached;
    for (const auto& arc : w.rev[target_local]) {
      if (dist[arc.to] == kUnreached) continue;
      Weight cand = dist[arc.to] + arc.w;
      if (cand < best) {
        best = cand;
        final_local = arc.to;
        closing = arc.gid;
      }
    }
    if (best == kUnreached) throw stale_edge_error("self-loop no longer realizable");
    reached = best;
  } else {
    if (dist[target_local] == kUnreached) throw stale_edge_error("edge no longer realizable");
    reached = dist[target_local];
  }
  // Sources were seeded with |y_j(source)|, so phi = dist - |y_j(target)|;
  // for self-loops the target is the source vertex and the terms cancel.
  Weight phi_now = reached - magnitude(y_piece_[j][target_local]);
  if (phi_now != e.phi)
    throw stale_edge_error("stored edge weight " + std::to_string(e.phi) +
                           " differs from recomputed " + std::to_string(phi_now));

  Projection out;
  std::vector<EdgeId> redges;
  if (closing != kNoEdge) redges.push_back(closing);
  int cur = final_local;
  while (parent[cur] != kNoEdge) {
    EdgeId ge = parent[cur];
    redges.push_back(ge);
    int la = local_index(j, g_->endpoint_a(ge));
    int lb = local_index(j, g_->endpoint_b(ge));
    cur = (cur == la) ? lb : la;
  }
  std::reverse(redges.begin(), redges.end());
  out.edges = redges;
  Vertex v0 = piece.vertices[cur];
  out.vertices.push_back(v0);
  Vertex at = v0;
  for (EdgeId ge : redges) {
    at = g_->other_endpoint(ge, at);
    out.vertices.push_back(at);
    out.total_slack += piece_slack(j, ge);
  }
  return out;
}

Projection CompressedState::project_edge(const HEdgeRef& e) const {
  int j = e.piece;
  std::vector<std::pair<int, Weight>> sources;
  auto add_source = [&](Vertex v) {
    int lv = local_index(j, v);
    sources.push_back({lv, magnitude(y_piece_[j][lv])});
  };
  switch (kind(e.from)) {
    case HKind::Boundary:
      add_source(boundary_of_hid_[e.from]);
      break;
    case HKind::FreeBActive:
      for (Vertex v : active_b_internal_[j]) add_source(v);
      break;
    case HKind::FreeBInactive:
      for (Vertex v : inactive_b_internal_[j]) add_source(v);
      break;
    case HKind::FreeAInternal:
      throw std::invalid_argument("a_j has no outgoing edges");
  }
  if (sources.empty()) throw stale_edge_error("source set vanished");

  if (e.from == e.to) {
    return project_concrete(j, sources, local_index(j, boundary_of_hid_[e.from]), e, true);
  }
  int target_local;
  if (kind(e.to) == HKind::Boundary) {
    target_local = local_index(j, boundary_of_hid_[e.to]);
  } else if (kind(e.to) == HKind::FreeAInternal) {
    // Choose the closest represented free internal A-vertex.
    PieceWork w;
    build_piece_residual(j, w);
    std::vector<Weight> dist;
    std::vector<int> parent;
    dijkstra(w, dist, parent, sources);
    target_local = -1;
    Weight best = kUnreached;
    for (Vertex a : free_a_internal_[j]) {
      int la = local_index(j, a);
      if (dist[la] < best) {
        best = dist[la];
        target_local = la;
      }
    }
    if (target_local < 0) throw stale_edge_error("no free internal A-vertex reachable");
  } else {
    throw std::invalid_argument("compressed edges never enter free B-vertices");
  }
  return project_concrete(j, sources, target_local, e, false);
}

Projection CompressedState::project_h_path(const std::vector<HEdgeRef>& path) const {
  if (path.empty()) throw std::invalid_argument("empty path");
  Projection glued;
  for (size_t i = 0; i < path.size(); ++i) {
    Projection seg = project_edge(path[i]);
    if (i == 0) {
      glued = seg;
      continue;
    }
    if (seg.vertices.front() != glued.vertices.back())
      throw std::logic_error("projection segments do not glue");
    glued.vertices.insert(glued.vertices.end(), seg.vertices.begin() + 1, seg.vertices.end());
    glued.edges.insert(glued.edges.end(), seg.edges.begin(), seg.edges.end());
    glued.total_slack += seg.total_slack;
  }
  // Simplicity: no repeated vertices except a closing cycle endpoint.
  bool closed = glued.vertices.front() == glued.vertices.back();
  std::vector<Vertex> seen(glued.vertices.begin(), glued.vertices.end() - (closed ? 1 : 0));
  std::sort(seen.begin(), seen.end());
  if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
    throw feasibility_error("projection is not simple");
  if (debug_) {
    for (EdgeId ge : glued.edges) {
      int j = ctx_->piece_of_edge(ge);
      Weight s = piece_slack(j, ge);
      bool ok = ctx_->is_boundary_edge(ge) ? (s >= 0 && s <= ctx_->sqrt_r()) : s == 0;
      if (!ok)
        throw feasibility_error("projection contains an inadmissible edge (slack " +
                                std::to_string(s) + ")");
    }
  }
  return glued;
}

std::optional<HEdgeRef> CompressedState::min_out_edge(int hid,
                                                      const std::vector<int>& path_pos) const {
  const auto& idx = out_index_[hid];
  if (idx.empty()) return std::nullopt;
  auto it = idx.begin();
  Weight k0 = std::get<0>(*it);
  auto best = it;
  int best_pos = -1;
  for (; it != idx.end() && std::get<0>(*it) == k0; ++it) {
    int to = std::get<1>(*it);
    int pos = path_pos.empty() ? -1 : path_pos[to];
    if (pos >= 0 && (best_pos < 0 || pos < best_pos)) {
      best = it;
      best_pos = pos;
    }
  }
  const HEdge& e = edges_[std::get<2>(*best)];
  return HEdgeRef{e.from, e.to, e.piece, e.phi};
}

std::vector<HEdgeRef> CompressedState::out_edges(int hid) const {
  std::vector<HEdgeRef> out;
  for (const auto& [key, to, id] : out_index_[hid]) {
    const HEdge& e = edges_[id];
    out.push_back(HEdgeRef{e.from, e.to, e.piece, e.phi});
  }
  return out;
}

std::optional<HEdgeRef> CompressedState::find_edge(int from, int to, int piece) const {
  for (const auto& [key, t, id] : out_index_[from]) {
    if (t != to) continue;
    const HEdge& e = edges_[id];
    if (e.piece == piece) return HEdgeRef{e.from, e.to, e.piece, e.phi};
  }
  return std::nullopt;
}

HSizeStats CompressedState::size_stats() const {
  HSizeStats s;
  for (int h = 0; h < num_hids(); ++h)
    if (exists(h)) ++s.num_h_vertices;
  for (const auto& e : edges_)
    if (e.alive) ++s.num_h_edges;
  for (int j = 0; j < ctx_->num_pieces(); ++j)
    s.vertex_budget += static_cast<int>(ctx_->piece(j).boundary.size()) + 3;
  return s;
}

void CompressedState::raise_ytilde(int hid, Weight amount) {
  if (amount < 0) throw std::invalid_argument("raise amount must be >= 0");
  if (amount == 0) return;
  int lam = is_b_side(hid) ? 1 : -1;
  set_ytilde(hid, ytilde_[hid] + lam * amount);
}

void CompressedState::inactivate_piece_actives(int j) {
  if (!rep_exists_[b_active_rep(j) - first_rep_]) return;
  sync_piece(j);
  auto& act = active_b_internal_[j];
  auto& inact = inactive_b_internal_[j];
  for (Vertex v : act) {
    int lv = local_index(j, v);
    y_piece_[j][lv] = std::min(y_piece_[j][lv], beta_);
    inact.push_back(v);
  }
  act.clear();
  std::sort(inact.begin(), inact.end());
  rep_exists_[b_active_rep(j) - first_rep_] = 0;
  rep_exists_[b_inactive_rep(j) - first_rep_] = 1;
  set_ytilde(b_inactive_rep(j), beta_);
  construct_piece(j);
}

void CompressedState::reduce(int rep_hid, Weight alpha) {
  HKind k = kind(rep_hid);
  if (k != HKind::FreeBActive && k != HKind::FreeBInactive)
    throw std::invalid_argument("reduce applies to free internal B representatives");
  if (!exists(rep_hid)) throw std::invalid_argument("representative does not exist");
  int j = piece_of_rep(rep_hid);
  if (k == HKind::FreeBActive) {
    Weight floor = std::max<Weight>(0, y_max() - sqrt_r());
    if (alpha < floor || alpha > ytilde_[rep_hid])
      throw std::invalid_argument("reduce(active): alpha out of range");
  } else {
    if (alpha < beta_ || alpha > ytilde_[rep_hid])
      throw std::invalid_argument("reduce(inactive): alpha out of range");
  }
  const auto& set = k == HKind::FreeBActive ? active_b_internal_[j] : inactive_b_internal_[j];
  for (Vertex v : set) {
    int lv = local_index(j, v);
    if (y_piece_[j][lv] >= alpha) y_piece_[j][lv] = alpha;
  }
  set_ytilde(rep_hid, alpha);
}

void CompressedState::reduce_slack(Vertex b) {
  if (!g_->is_b(b)) throw std::invalid_argument("reduce_slack takes a B-vertex");
  EdgeId e = m_.matched_edge(b);
  if (e == kNoEdge) throw std::invalid_argument("reduce_slack: vertex is unmatched");
  int j = ctx_->piece_of_edge(e);
  Weight s = piece_slack(j, e);
  Weight newval = y_piece_[j][local_index(j, b)] - s;
  y_piece_[j][local_index(j, b)] = newval;
  if (ctx_->is_boundary(b)) {
    for (int j2 : ctx_->pieces_of_vertex(b)) {
      if (j2 == j) continue;
      int lv = local_index(j2, b);
      // The propagated value never raises a lagging piece dual.
      y_piece_[j2][lv] = std::min(y_piece_[j2][lv], newval);
    }
    set_ytilde(hid_of_boundary_[b], newval);
  }
}

void CompressedState::remove_internal(std::vector<Vertex>& set, Vertex v) {
  auto it = std::find(set.begin(), set.end(), v);
  if (it != set.end()) set.erase(it);
}

void CompressedState::flip_walk(const Projection& walk) {
  std::vector<EdgeId> to_add;
  for (EdgeId e : walk.edges) {
    if (m_.contains(e))
      m_.remove(e);
    else
      to_add.push_back(e);
  }
  for (EdgeId e : to_add) m_.add(e);

  // Refresh per-piece free sets for internal vertices the walk touched.
  for (Vertex v : walk.vertices) {
    if (ctx_->is_boundary(v)) continue;
    const auto& ps = ctx_->pieces_of_vertex(v);
    if (ps.empty()) continue;
    int j = ps.front();
    bool matched = m_.is_matched(v);
    if (g_->is_a(v)) {
      remove_internal(free_a_internal_[j], v);
      if (!matched) {
        free_a_internal_[j].push_back(v);
        std::sort(free_a_internal_[j].begin(), free_a_internal_[j].end());
      }
      rep_exists_[a_rep(j) - first_rep_] = free_a_internal_[j].empty() ? 0 : 1;
    } else {
      remove_internal(active_b_internal_[j], v);
      remove_internal(inactive_b_internal_[j], v);
      if (!matched) {
        // Vertices freed by a switch carry duals >= beta: they join the
        // inactive representative (Reduce(b_j^I, beta) then levels them).
        inactive_b_internal_[j].push_back(v);
        std::sort(inactive_b_internal_[j].begin(), inactive_b_internal_[j].end());
        if (!rep_exists_[b_inactive_rep(j) - first_rep_]) {
          rep_exists_[b_inactive_rep(j) - first_rep_] = 1;
          ytilde_[b_inactive_rep(j)] = beta_;
        }
      }
      rep_exists_[b_active_rep(j) - first_rep_] = active_b_internal_[j].empty() ? 0 : 1;
      rep_exists_[b_inactive_rep(j) - first_rep_] = inactive_b_internal_[j].empty() ? 0 : 1;
    }
  }
}

CompressedReport CompressedState::verify_compressed_feasible() const {
  CompressedReport rep;
  auto fail = [&](const std::string& s) { rep.violations.push_back(s); };
  // (a) A-side duals non-positive, free A-duals zero.
  for (int h = 0; h < num_hids(); ++h) {
    if (!exists(h) || is_b_side(h)) continue;
    if (ytilde_[h] > 0) fail("(a) positive A dual at hid " + std::to_string(h));
    if (is_free_a(h) && ytilde_[h] != 0) fail("(a) nonzero free A dual at hid " + std::to_string(h));
  }
  // (b) B-side duals non-negative; active window; inactive >= beta.
  Weight ym = y_max();
  for (int h = 0; h < num_hids(); ++h) {
    if (!exists(h) || !is_b_side(h)) continue;
    if (ytilde_[h] < 0) fail("(b) negative B dual at hid " + std::to_string(h));
    if (is_free_b(h)) {
      if (ymag(h) >= beta_) {
        if (kind(h) == HKind::FreeBActive)
          fail("(b) active representative at/above beta, hid " + std::to_string(h));
      } else if (ytilde_[h] < ym - sqrt_r() || ytilde_[h] > ym) {
        fail("(b) active dual outside window at hid " + std::to_string(h));
      }
    }
  }
  // (c) per-piece R-feasibility.
  for (int j = 0; j < ctx_->num_pieces(); ++j)
    for (EdgeId e : ctx_->piece(j).edge_ids)
      if (piece_slack(j, e) < 0)
        fail("(c) negative slack in piece " + std::to_string(j) + " edge " + std::to_string(e));
  // (d) H-feasibility of stored edges.
  for (const auto& e : edges_) {
    if (!e.alive) continue;
    Weight s = e.phi - ymag(e.from) + ymag(e.to);
    if (s < 0)
      fail("(d) negative H slack on edge " + std::to_string(e.from) + "->" + std::to_string(e.to));
  }
  // (e) |ytilde| dominates piece duals on boundary and free internal
  // vertices; internal free A-duals are zero.
  for (int j = 0; j < ctx_->num_pieces(); ++j) {
    for (Vertex v : ctx_->piece(j).boundary) {
      if (magnitude(y_piece_[j][local_index(j, v)]) > ymag(hid_of_boundary_[v]))
        fail("(e) piece dual exceeds ytilde at boundary vertex " + std::to_string(v));
    }
    for (Vertex v : free_a_internal_[j])
      if (y_piece_[j][local_index(j, v)] != 0)
        fail("(e) nonzero internal free A dual at vertex " + std::to_string(v));
    for (Vertex v : active_b_internal_[j])
      if (magnitude(y_piece_[j][local_index(j, v)]) > ymag(b_active_rep(j)))
        fail("(e) piece dual exceeds ytilde(bA) at vertex " + std::to_string(v));
    for (Vertex v : inactive_b_internal_[j])
      if (magnitude(y_piece_[j][local_index(j, v)]) > ymag(b_inactive_rep(j)))
        fail("(e) piece dual exceeds ytilde(bI) at vertex " + std::to_string(v));
  }
  return rep;
}

void CompressedState::to_r_feasible(Matching* m_out, std::vector<Weight>* y_out) {
  for (int j = 0; j < ctx_->num_pieces(); ++j) sync_piece(j);
  if (m_out) *m_out = m_;
  if (y_out) {
    y_out->assign(g_->num_vertices(), 0);
    for (Vertex v = 0; v < g_->num_vertices(); ++v) {
      if (ctx_->is_boundary(v)) {
        (*y_out)[v] = ytilde_[hid_of_boundary_[v]];
      } else if (!ctx_->pieces_of_vertex(v).empty()) {
        int j = ctx_->pieces_of_vertex(v).front();
        (*y_out)[v] = y_piece_[j][local_index(j, v)];
      }
    }
  }
}

std::string CompressedState::dump_h() const {
  std::ostringstream os;
  auto label = [&](int hid) -> std::string {
    switch (kind(hid)) {
      case HKind::Boundary:
        return "v" + std::to_string(boundary_of_hid_[hid]);
      case HKind::FreeAInternal:
        return "a" + std::to_string(piece_of_rep(hid));
      case HKind::FreeBActive:
        return "bA" + std::to_string(piece_of_rep(hid));
      default:
        return "bI" + std::to_string(piece_of_rep(hid));
    }
  };
  os << "H pieces " << ctx_->num_pieces() << "\n";
  for (int j = 0; j < ctx_->num_pieces(); ++j) {
    std::vector<std::tuple<int, int, Weight>> rows;
    for (int id : piece_edges_[j]) {
      const HEdge& e = edges_[id];
      if (e.alive) rows.push_back({e.from, e.to, e.phi});
    }
    std::sort(rows.begin(), rows.end());
    os << "piece " << j << " edges " << rows.size() << "\n";
    for (auto [from, to, phi] : rows) {
      Weight s = phi - ymag(from) + ymag(to);
      os << "  " << label(from) << " -> " << label(to) << " phi " << phi << " slack " << s << "\n";
    }
  }
  return os.str();
}

void CompressedState::check_projection_slacks(int j, int sample_cap) const {
  int checked = 0;
  for (int id : piece_edges_[j]) {
    const HEdge& e = edges_[id];
    if (!e.alive) continue;
    if (checked >= sample_cap) break;
    HEdgeRef ref{e.from, e.to, e.piece, e.phi};
    Projection p = project_edge(ref);  // throws stale_edge_error on weight drift
    // With synchronized duals the H slack equals the projected slack sum.
    (void)p;
    ++checked;
  }
}

}  // namespace rcmatch
