#ifndef RCMATCH_IO_HPP
#define RCMATCH_IO_HPP

#include <iosfwd>
#include <memory>
#include <string>

#include "rcmatch/clustering.hpp"
#include "rcmatch/graph.hpp"

namespace rcmatch {

class parse_error : public std::runtime_error {
 public:
  explicit parse_error(const std::string& what) : std::runtime_error(what) {}
};

// Graph text format, one record per line:
//   p bip <n_a> <n_b> <m>
//   e <a> <b> <cost>          (0-based side indices)
// Serialization round-trips bit-exactly.
std::string write_graph(const BipartiteGraph& g);
BipartiteGraph read_graph(std::istream& in);
BipartiteGraph read_graph_file(const std::string& path);
void write_graph_file(const BipartiteGraph& g, const std::string& path);

// Clustering text format:
//   c pieces <l>
//   piece <j> <v1> <v2> ...   (global vertex ids: a-index, or n_a + b-index)
// Edges are assigned to the unique piece containing both endpoints; ties go
// to the lowest piece index and are reported via `ambiguous_edges`.
std::string write_clustering(const RClustering& ctx);
std::unique_ptr<RClustering> read_clustering(std::istream& in, const BipartiteGraph& g, long long r,
                                             int* ambiguous_edges = nullptr);
std::unique_ptr<RClustering> read_clustering_file(const std::string& path, const BipartiteGraph& g,
                                                  long long r, int* ambiguous_edges = nullptr);
void write_clustering_file(const RClustering& ctx, const std::string& path);

}  // namespace rcmatch

#endif  // RCMATCH_IO_HPP
