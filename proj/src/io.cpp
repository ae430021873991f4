#include "rcmatch/io.hpp"

#include <fstream>
#include <sstream>

namespace rcmatch {

std::string write_graph(const BipartiteGraph& g) {
  std::ostringstream out;
  out << "p bip " << g.num_a() << ' ' << g.num_b() << ' ' << g.num_edges() << '\n';
  for (const Edge& e : g.edges()) out << "e " << e.a << ' ' << e.b << ' ' << e.cost << '\n';
  return out.str();
}

BipartiteGraph read_graph(std::istream& in) {
  std::string line;
  int lineno = 0;
  bool have_header = false;
  int n_a = 0, n_b = 0, m = 0, edges_seen = 0;
  BipartiteGraph g;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "p") {
      std::string kind;
      if (!(ls >> kind >> n_a >> n_b >> m) || kind != "bip")
        throw parse_error("line " + std::to_string(lineno) + ": bad header");
      if (have_header) throw parse_error("duplicate header");
      have_header = true;
      g = BipartiteGraph(n_a, n_b);
    } else if (tag == "e") {
      if (!have_header) throw parse_error("edge before header");
      int a, b;
      Weight c;
      if (!(ls >> a >> b >> c)) throw parse_error("line " + std::to_string(lineno) + ": bad edge");
      try {
        g.add_edge(a, b, c);
      } catch (const std::invalid_argument& ex) {
        throw parse_error("line " + std::to_string(lineno) + ": " + ex.what());
      }
      ++edges_seen;
    } else {
      throw parse_error("line " + std::to_string(lineno) + ": unknown record '" + tag + "'");
    }
  }
  if (!have_header) throw parse_error("missing header");
  if (edges_seen != m)
    throw parse_error("edge count mismatch: header says " + std::to_string(m) + ", read " +
                      std::to_string(edges_seen));
  return g;
}

BipartiteGraph read_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open " + path);
  return read_graph(in);
}

void write_graph_file(const BipartiteGraph& g, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw parse_error("cannot write " + path);
  out << write_graph(g);
}

std::string write_clustering(const RClustering& ctx) {
  std::ostringstream out;
  out << "c pieces " << ctx.num_pieces() << '\n';
  for (int j = 0; j < ctx.num_pieces(); ++j) {
    out << "piece " << j;
    for (Vertex v : ctx.piece(j).vertices) out << ' ' << v;
    out << '\n';
  }
  return out.str();
}

std::unique_ptr<RClustering> read_clustering(std::istream& in, const BipartiteGraph& g, long long r,
                                             int* ambiguous_edges) {
  std::string line;
  int lineno = 0;
  int num_pieces = -1;
  std::vector<std::vector<Vertex>> piece_vertices;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "c") {
      std::string kind;
      if (!(ls >> kind >> num_pieces) || kind != "pieces" || num_pieces < 1)
        throw parse_error("line " + std::to_string(lineno) + ": bad clustering header");
      piece_vertices.resize(num_pieces);
    } else if (tag == "piece") {
      if (num_pieces < 0) throw parse_error("piece before header");
      int j;
      if (!(ls >> j) || j < 0 || j >= num_pieces)
        throw parse_error("line " + std::to_string(lineno) + ": bad piece index");
      Vertex v;
      while (ls >> v) {
        if (v < 0 || v >= g.num_vertices())
          throw parse_error("line " + std::to_string(lineno) + ": vertex out of range");
        piece_vertices[j].push_back(v);
      }
    } else {
      throw parse_error("line " + std::to_string(lineno) + ": unknown record '" + tag + "'");
    }
  }
  if (num_pieces < 0) throw parse_error("missing clustering header");

  // Assign each edge to the lowest-index piece containing both endpoints.
  std::vector<std::vector<char>> member(num_pieces, std::vector<char>(g.num_vertices(), 0));
  for (int j = 0; j < num_pieces; ++j)
    for (Vertex v : piece_vertices[j]) member[j][v] = 1;
  std::vector<int> piece_of_edge(g.num_edges(), -1);
  int ambiguous = 0;
  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    Vertex a = g.endpoint_a(e), b = g.endpoint_b(e);
    int hits = 0;
    for (int j = 0; j < num_pieces; ++j)
      if (member[j][a] && member[j][b]) {
        if (hits++ == 0) piece_of_edge[e] = j;
      }
    if (hits == 0)
      throw parse_error("edge (" + std::to_string(g.edge(e).a) + "," + std::to_string(g.edge(e).b) +
                        ") not covered by any piece");
    if (hits > 1) ++ambiguous;
  }
  if (ambiguous_edges) *ambiguous_edges = ambiguous;
  return std::make_unique<RClustering>(g, r, std::move(piece_of_edge), num_pieces);
}

std::unique_ptr<RClustering> read_clustering_file(const std::string& path, const BipartiteGraph& g,
                                                  long long r, int* ambiguous_edges) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open " + path);
  return read_clustering(in, g, r, ambiguous_edges);
}

void write_clustering_file(const RClustering& ctx, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw parse_error("cannot write " + path);
  out << write_clustering(ctx);
}

}  // namespace rcmatch
