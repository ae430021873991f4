#include "rcmatch/clustering.hpp"

#include <algorithm>
#include <set>

#include "rcmatch/rng.hpp"

namespace rcmatch {

RClustering::RClustering(const BipartiteGraph& g, long long r, std::vector<int> piece_of_edge,
                         int num_pieces)
    : g_(&g), r_(r), piece_of_edge_(std::move(piece_of_edge)) {
  if (r < 1) throw std::invalid_argument("r must be >= 1");
  if (static_cast<int>(piece_of_edge_.size()) != g.num_edges())
    throw std::invalid_argument("piece assignment must cover every edge");
  sqrt_r_ = ceil_sqrt(r);
  pieces_.resize(num_pieces);
  vertex_pieces_.resize(g.num_vertices());
  boundary_flag_.assign(g.num_vertices(), 0);
  boundary_edge_flag_.assign(g.num_edges(), 0);

  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    int j = piece_of_edge_[e];
    if (j < 0 || j >= num_pieces) throw std::invalid_argument("edge assigned to invalid piece");
    pieces_[j].edge_ids.push_back(e);
  }
  for (int j = 0; j < num_pieces; ++j) {
    auto& p = pieces_[j];
    for (EdgeId e : p.edge_ids) {
      p.vertices.push_back(g.endpoint_a(e));
      p.vertices.push_back(g.endpoint_b(e));
    }
    std::sort(p.vertices.begin(), p.vertices.end());
    p.vertices.erase(std::unique(p.vertices.begin(), p.vertices.end()), p.vertices.end());
    for (Vertex v : p.vertices) vertex_pieces_[v].push_back(j);
  }
  for (Vertex v = 0; v < g.num_vertices(); ++v)
    if (vertex_pieces_[v].size() >= 2) {
      boundary_flag_[v] = 1;
      ++num_boundary_;
    }
  for (int j = 0; j < num_pieces; ++j) {
    auto& p = pieces_[j];
    for (Vertex v : p.vertices)
      if (boundary_flag_[v]) p.boundary.push_back(v);
    sum_piece_boundary_ += static_cast<int>(p.boundary.size());
  }

  // delta_uv = 1 on interior edges; boundary edges pay
  // max(1, ceil(m_j*n/(m*sqrt_r)), 2*sqrt_r) with integer ceilings.
  const long long n = g.num_vertices();
  const long long m = std::max(1, g.num_edges());
  delta_.assign(g.num_edges(), 1);
  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    if (!boundary_flag_[g.endpoint_a(e)] && !boundary_flag_[g.endpoint_b(e)]) continue;
    boundary_edge_flag_[e] = 1;
    long long mj = pieces_[piece_of_edge_[e]].num_edges();
    long long volume = (mj * n + m * sqrt_r_ - 1) / (m * sqrt_r_);  // ceil(m_j*n/(m*sqrt_r))
    delta_[e] = std::max<Weight>({1, volume, 2 * sqrt_r_});
  }
  max_delta_at_.assign(g.num_vertices(), 1);
  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    max_delta_at_[g.endpoint_a(e)] = std::max(max_delta_at_[g.endpoint_a(e)], delta_[e]);
    max_delta_at_[g.endpoint_b(e)] = std::max(max_delta_at_[g.endpoint_b(e)], delta_[e]);
  }

  int max_kj = 0;
  for (const auto& p : pieces_) max_kj = std::max(max_kj, static_cast<int>(p.boundary.size()));
  k1_ = static_cast<double>(max_kj) / static_cast<double>(sqrt_r_);
  k2_ = static_cast<double>(sum_piece_boundary_) * static_cast<double>(sqrt_r_) /
        static_cast<double>(std::max(1, g.num_vertices()));
}

RClustering::ValidationReport RClustering::validate() const {
  ValidationReport rep;
  rep.num_pieces = num_pieces();
  // Partition checks: every edge in exactly one piece by construction; verify
  // piece edge lists are disjoint and covering anyway.
  std::vector<int> seen(g_->num_edges(), 0);
  for (int j = 0; j < num_pieces(); ++j)
    for (EdgeId e : pieces_[j].edge_ids) {
      if (seen[e]++) {
        rep.ok = false;
        rep.errors.push_back("edge " + std::to_string(e) + " appears in two pieces");
      }
      if (piece_of_edge_[e] != j) {
        rep.ok = false;
        rep.errors.push_back("edge " + std::to_string(e) + " piece map mismatch");
      }
    }
  for (EdgeId e = 0; e < g_->num_edges(); ++e)
    if (!seen[e]) {
      rep.ok = false;
      rep.errors.push_back("edge " + std::to_string(e) + " not covered by any piece");
    }
  // Boundary identification: recompute from scratch.
  for (Vertex v = 0; v < g_->num_vertices(); ++v) {
    std::set<int> ps;
    for (EdgeId e : g_->incident(v)) ps.insert(piece_of_edge_[e]);
    bool want = ps.size() >= 2;
    if (want != static_cast<bool>(boundary_flag_[v])) {
      rep.ok = false;
      rep.errors.push_back("boundary flag wrong at vertex " + std::to_string(v));
    }
  }
  for (const auto& p : pieces_) {
    rep.max_piece_vertices = std::max(rep.max_piece_vertices, p.num_vertices());
    rep.max_piece_boundary = std::max(rep.max_piece_boundary, static_cast<int>(p.boundary.size()));
  }
  rep.k1 = k1_;
  rep.k2 = k2_;
  // Piece sizes beyond c_v * r only warn; the constant is implementation-chosen.
  const long long c_v = 4;
  if (rep.max_piece_vertices > c_v * r_)
    rep.warnings.push_back("piece vertex count " + std::to_string(rep.max_piece_vertices) +
                           " exceeds " + std::to_string(c_v) + "*r");
  return rep;
}

long long clustering_constant_k(const RClustering& ctx) {
  double k = 2.0 * ctx.k1() + 4.0 * ctx.k2() + 2.0;
  return static_cast<long long>(std::ceil(k - 1e-9));
}

long long default_r(const BipartiteGraph& g) {
  double n = static_cast<double>(std::max(1, g.num_vertices()));
  return static_cast<long long>(std::ceil(std::pow(n, 0.4) - 1e-9));
}

RClustering single_piece_clustering(const BipartiteGraph& g, long long r) {
  return RClustering(g, r, std::vector<int>(g.num_edges(), 0), 1);
}

Instance grid_clustering(int w, int h, long long r, unsigned long long seed, Weight cmax) {
  if (w < 1 || h < 1) throw std::invalid_argument("grid dimensions must be positive");
  if (r < 4) throw std::invalid_argument("r must be >= 4");
  if (r > static_cast<long long>(w) * h) throw std::invalid_argument("r larger than grid");
  // Checkerboard bipartition: (x+y) even -> A.
  int n_a = 0, n_b = 0;
  std::vector<int> side_index(w * h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      int cell = x + w * y;
      side_index[cell] = ((x + y) % 2 == 0) ? n_a++ : n_b++;
    }
  Instance out;
  out.graph = std::make_unique<BipartiteGraph>(n_a, n_b);
  BipartiteGraph& g = *out.graph;
  out.vid_of_cell.resize(w * h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      int cell = x + w * y;
      out.vid_of_cell[cell] =
          ((x + y) % 2 == 0) ? g.a_vertex(side_index[cell]) : g.b_vertex(side_index[cell]);
    }
  Weight s = ceil_sqrt(r);
  int tiles_x = static_cast<int>((w + s - 1) / s);
  int tiles_y = static_cast<int>((h + s - 1) / s);
  auto tile_of = [&](int x, int y) {
    return static_cast<int>(x / s) + tiles_x * static_cast<int>(y / s);
  };
  Rng rng(seed);
  std::vector<int> piece_of_edge;
  auto add = [&](int x0, int y0, int x1, int y1) {
    Vertex u = out.vid_of_cell[x0 + w * y0], v = out.vid_of_cell[x1 + w * y1];
    Weight c = cmax > 0 ? rng.range(0, cmax) : 0;
    if (g.is_a(u))
      g.add_edge(u, v - n_a, c);
    else
      g.add_edge(v, u - n_a, c);
    piece_of_edge.push_back(tile_of(x0, y0));  // edge owned by its lower-left endpoint's tile
  };
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (x + 1 < w) add(x, y, x + 1, y);
      if (y + 1 < h) add(x, y, x, y + 1);
    }
  out.clustering =
      std::make_unique<RClustering>(g, r, std::move(piece_of_edge), tiles_x * tiles_y);
  return out;
}

Instance chain_clustering(int num_pieces, int piece_size, int extra_edges, long long r,
                          unsigned long long seed, Weight cmax) {
  if (num_pieces < 1 || piece_size < 2 || piece_size % 2 != 0)
    throw std::invalid_argument("chain: need >=1 pieces of even size >= 2");
  int half = piece_size / 2;
  Instance out;
  out.graph = std::make_unique<BipartiteGraph>(num_pieces * half, num_pieces * half);
  BipartiteGraph& g = *out.graph;
  Rng rng(seed);
  std::vector<int> piece_of_edge;
  auto cost = [&]() { return cmax > 0 ? rng.range(0, cmax) : 0; };
  // Piece j owns private vertices a,b in [j*half,(j+1)*half); its last
  // b-vertex also receives an edge from piece j+1 and becomes boundary.
  for (int j = 0; j < num_pieces; ++j) {
    for (int i = 0; i < half; ++i) {
      g.add_edge(j * half + i, j * half + i, cost());  // planted perfect matching
      piece_of_edge.push_back(j);
    }
    if (j > 0) {
      // Deterministic chain link to the previous piece's shared b-vertex.
      g.add_edge(j * half, j * half - 1, cost());
      piece_of_edge.push_back(j);
    }
    int added = 0, guard = 0;
    while (added < extra_edges && guard++ < 50 * (extra_edges + 1)) {
      int ai = j * half + static_cast<int>(rng.below(half));
      // Extra edges may also touch the previous piece's last b-vertex.
      int lo_b = j * half - (j > 0 ? 1 : 0);
      int bi = lo_b + static_cast<int>(rng.below(j * half + half - lo_b));
      if (g.edge_between(g.a_vertex(ai), g.b_vertex(bi)) != kNoEdge) continue;
      g.add_edge(ai, bi, cost());
      piece_of_edge.push_back(j);
      ++added;
    }
  }
  out.clustering = std::make_unique<RClustering>(g, r, std::move(piece_of_edge), num_pieces);
  return out;
}

}  // namespace rcmatch
