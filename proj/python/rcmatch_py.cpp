#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "rcmatch/gabow_tarjan.hpp"
#include "rcmatch/hungarian.hpp"
#include "rcmatch/io.hpp"
#include "rcmatch/monge.hpp"
#include "rcmatch/scale_solver.hpp"

namespace py = pybind11;
using namespace rcmatch;

namespace {

// python-facing bundle keeping the graph and clustering alive together
struct PyInstance {
  std::shared_ptr<BipartiteGraph> graph;
  std::shared_ptr<RClustering> clustering;
};

PyInstance make_grid(int w, int h, long long r, unsigned long long seed, Weight cmax) {
  Instance inst = grid_clustering(w, h, r, seed, cmax);
  return PyInstance{std::move(inst.graph), std::move(inst.clustering)};
}

PyInstance make_chain(int pieces, int piece_size, int extra, long long r,
                      unsigned long long seed, Weight cmax) {
  Instance inst = chain_clustering(pieces, piece_size, extra, r, seed, cmax);
  return PyInstance{std::move(inst.graph), std::move(inst.clustering)};
}

PyInstance parse_instance(const std::string& graph_text, const std::string& clustering_text,
                          long long r) {
  PyInstance out;
  std::istringstream gin(graph_text);
  out.graph = std::make_shared<BipartiteGraph>(read_graph(gin));
  if (clustering_text.empty()) {
    out.clustering = std::make_shared<RClustering>(
        single_piece_clustering(*out.graph, r > 0 ? r : default_r(*out.graph)));
  } else {
    std::istringstream cin_(clustering_text);
    out.clustering = read_clustering(cin_, *out.graph, r > 0 ? r : default_r(*out.graph));
  }
  return out;
}

std::vector<std::pair<int, int>> matching_pairs(const BipartiteGraph& g, const Matching& m) {
  std::vector<std::pair<int, int>> out;
  for (EdgeId e : m.edge_ids()) out.push_back({g.edge(e).a, g.edge(e).b});
  return out;
}

}  // namespace

PYBIND11_MODULE(rcmatch_py, m) {
  m.doc() = "exact minimum-cost bipartite matching over r-clustered graphs";

  py::class_<PyInstance>(m, "Instance")
      .def_property_readonly("num_a", [](const PyInstance& i) { return i.graph->num_a(); })
      .def_property_readonly("num_b", [](const PyInstance& i) { return i.graph->num_b(); })
      .def_property_readonly("num_edges", [](const PyInstance& i) { return i.graph->num_edges(); })
      .def_property_readonly("num_pieces",
                             [](const PyInstance& i) { return i.clustering->num_pieces(); })
      .def_property_readonly("k1", [](const PyInstance& i) { return i.clustering->k1(); })
      .def_property_readonly("k2", [](const PyInstance& i) { return i.clustering->k2(); })
      .def("graph_text", [](const PyInstance& i) { return write_graph(*i.graph); })
      .def("clustering_text", [](const PyInstance& i) { return write_clustering(*i.clustering); })
      .def("validate", [](const PyInstance& i) { return i.clustering->validate().ok; });

  m.def("grid_instance", &make_grid, py::arg("w"), py::arg("h"), py::arg("r"), py::arg("seed") = 1,
        py::arg("cmax") = 100);
  m.def("chain_instance", &make_chain, py::arg("pieces"), py::arg("piece_size"),
        py::arg("extra") = 4, py::arg("r") = 9, py::arg("seed") = 1, py::arg("cmax") = 100);
  m.def("parse_instance", &parse_instance, py::arg("graph_text"), py::arg("clustering_text") = "",
        py::arg("r") = 0);

  m.def("hungarian_cost", [](const PyInstance& i) { return hungarian_solve(*i.graph).cost; });
  m.def("gt_cost", [](const PyInstance& i) { return gt_solve(*i.graph).cost; });
  m.def(
      "scaled_cost",
      [](const PyInstance& i, bool debug) {
        SolveOptions opts;
        opts.debug_invariants = debug;
        return solve(*i.graph, *i.clustering, opts).cost;
      },
      py::arg("instance"), py::arg("debug") = false);
  m.def("hungarian_matching", [](const PyInstance& i) {
    auto res = hungarian_solve(*i.graph);
    return matching_pairs(*i.graph, res.matching);
  });
  m.def("scaled_matching", [](const PyInstance& i) {
    auto res = solve(*i.graph, *i.clustering);
    return matching_pairs(*i.graph, res.matching);
  });

  py::class_<EnvelopeTree>(m, "MongeEnvelope")
      .def(py::init([](int rows, int cols, unsigned long long seed) {
             return EnvelopeTree(random_monge(rows, cols, seed));
           }),
           py::arg("rows"), py::arg("cols"), py::arg("seed") = 1)
      .def("find_min_in_column",
           [](const EnvelopeTree& t, int col, int r1, int r2) {
             return t.find_min_in_column(col, r1, r2);
           })
      .def("find_min", [](const EnvelopeTree& t, int col) { return t.find_min_in_column(col); })
      .def("raise_row", &EnvelopeTree::raise_row)
      .def("entry", [](const EnvelopeTree& t, int i, int j) { return t.matrix().at(i, j); })
      .def_property_readonly("rows", [](const EnvelopeTree& t) { return t.matrix().rows(); })
      .def_property_readonly("cols", [](const EnvelopeTree& t) { return t.matrix().cols(); });
}
