// Command-line front end: instance generation, parsing, solver selection,
// oracle comparison and statistics emission.
#include <CLI11.hpp>
#include <chrono>
#include <fstream>
#include <iostream>

#include "rcmatch/gabow_tarjan.hpp"
#include "rcmatch/hungarian.hpp"
#include "rcmatch/io.hpp"
#include "rcmatch/scale_solver.hpp"

using namespace rcmatch;

namespace {

constexpr int kExitParse = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitInternal = 4;
constexpr int kExitMismatch = 5;

double ms_since(std::chrono::steady_clock::time_point t0) {
  auto dt = std::chrono::steady_clock::now() - t0;
  return std::chrono::duration<double, std::milli>(dt).count();
}

struct LoadedInstance {
  std::unique_ptr<BipartiteGraph> graph;
  std::unique_ptr<RClustering> clustering;
};

LoadedInstance load_instance(const std::string& graph_path, const std::string& cluster_path,
                             long long r_flag) {
  LoadedInstance out;
  out.graph = std::make_unique<BipartiteGraph>(read_graph_file(graph_path));
  long long r = r_flag > 0 ? r_flag : default_r(*out.graph);
  if (!cluster_path.empty()) {
    int ambiguous = 0;
    out.clustering = read_clustering_file(cluster_path, *out.graph, r, &ambiguous);
    if (ambiguous > 0)
      std::cerr << "note: " << ambiguous << " edges had ambiguous piece assignment (lowest index used)\n";
  } else {
    out.clustering = std::make_unique<RClustering>(single_piece_clustering(*out.graph, r));
  }
  return out;
}

void emit_scale_stats(std::ostream& os, const SolveResult& res) {
  os << "scales: " << res.scales << "\n";
  for (const auto& s : res.per_scale) {
    os << "scale " << s.scale_index << ": free_after_step1=" << s.free_after_step1
       << " phases=" << s.phases << " free_after_step2=" << s.free_after_step2
       << " aug=" << s.augmenting_paths << " alt=" << s.alternating_paths << " cyc=" << s.cycles
       << " backtracks=" << s.backtracks << " h_vertices=" << s.h_vertices
       << " h_edges=" << s.h_edges << " sum_h_len=" << s.sum_h_path_edges
       << " sum_delta_proj=" << s.sum_projection_delta << (s.phase_cap_hit ? " cap_hit=1" : "")
       << "\n";
  }
  long long sum_len = 0, sum_delta = 0;
  for (const auto& s : res.per_scale) {
    sum_len += s.sum_h_path_edges;
    sum_delta += s.sum_projection_delta;
  }
  os << "stat sum_h_path_edges: " << sum_len << "\n";
  os << "stat sum_projection_delta: " << sum_delta << "\n";
}

int run_solve(const std::string& in, const std::string& cluster, long long r, std::string alg,
              bool verify, bool debug, int max_phases, bool reduce, bool emit_matching,
              const std::string& out_path) {
  auto inst = load_instance(in, cluster, r);
  BipartiteGraph* g = inst.graph.get();
  RClustering* ctx = inst.clustering.get();
  PerfectReduction red;
  bool reduced = false;
  if (reduce) {
    red = to_perfect_reduction(*g, *ctx);
    g = red.graph.get();
    ctx = red.clustering.get();
    reduced = true;
  }

  std::ostringstream doc;
  doc << "instance: " << in << "\n";
  doc << "n_a: " << g->num_a() << "\n";
  doc << "n_b: " << g->num_b() << "\n";
  doc << "m: " << g->num_edges() << "\n";
  doc << "r: " << ctx->r() << "\n";
  doc << "pieces: " << ctx->num_pieces() << "\n";
  doc << "k1: " << ctx->k1() << "\n";
  doc << "k2: " << ctx->k2() << "\n";
  doc << "k: " << clustering_constant_k(*ctx) << "\n";
  doc << "alg: " << alg << "\n";
  if (reduced) doc << "reduced: true\n";

  auto t0 = std::chrono::steady_clock::now();
  Weight cost = 0;
  Matching matching;
  if (alg == "hungarian") {
    auto res = hungarian_solve(*g);
    cost = res.cost;
    matching = res.matching;
    doc << "perfect: " << (res.perfect ? "true" : "false") << "\n";
  } else if (alg == "gt") {
    auto res = gt_solve(*g, debug);
    cost = res.cost;
    matching = res.matching;
    doc << "perfect: true\n";
    doc << "scales: " << res.scales << "\n";
  } else if (alg == "scaled") {
    SolveOptions opts;
    opts.debug_invariants = debug;
    opts.max_phases_cap = max_phases;
    auto res = solve(*g, *ctx, opts);
    cost = res.cost;
    matching = res.matching;
    doc << "perfect: true\n";
    emit_scale_stats(doc, res);
  } else {
    std::cerr << "unknown algorithm '" << alg << "'\n";
    return kExitParse;
  }
  double elapsed = ms_since(t0);
  doc << "cost: " << cost << "\n";
  if (verify) {
    auto oracle = hungarian_solve(*g);
    bool same = oracle.cost == cost && (alg == "hungarian" || oracle.perfect);
    doc << "verified: " << (same ? "true" : "false") << "\n";
    if (!same) {
      std::cerr << "verification failed: got " << cost << ", hungarian says " << oracle.cost << "\n";
      std::cout << doc.str();
      return kExitMismatch;
    }
  }
  if (emit_matching)
    for (EdgeId e : matching.edge_ids())
      doc << "m " << g->edge(e).a << " " << g->edge(e).b << "\n";
  doc << "time_ms: " << elapsed << "\n";

  if (out_path.empty()) {
    std::cout << doc.str();
  } else {
    std::ofstream f(out_path, std::ios::binary);
    f << doc.str();
    std::cout << "cost: " << cost << "\n";
  }
  return 0;
}

int run_gen(const std::string& kind, int w, int h, int pieces, int piece_size, int extra,
            long long r, unsigned long long seed, Weight cmax, const std::string& out_graph,
            const std::string& out_cluster) {
  Instance inst;
  if (kind == "grid") {
    long long rr = r > 0 ? r : default_r(BipartiteGraph(w * h / 2 + 1, w * h / 2 + 1));
    if (r <= 0) {
      BipartiteGraph probe((w * h + 1) / 2, w * h / 2);
      rr = std::max<long long>(4, default_r(probe));
    }
    inst = grid_clustering(w, h, rr, seed, cmax);
  } else if (kind == "chain") {
    inst = chain_clustering(pieces, piece_size, extra, r > 0 ? r : 9, seed, cmax);
  } else {
    std::cerr << "unknown generator '" << kind << "'\n";
    return kExitParse;
  }
  write_graph_file(*inst.graph, out_graph);
  if (!out_cluster.empty()) write_clustering_file(*inst.clustering, out_cluster);
  std::cout << "n_a: " << inst.graph->num_a() << "\n";
  std::cout << "n_b: " << inst.graph->num_b() << "\n";
  std::cout << "m: " << inst.graph->num_edges() << "\n";
  std::cout << "pieces: " << inst.clustering->num_pieces() << "\n";
  std::cout << "r: " << inst.clustering->r() << "\n";
  return 0;
}

int run_compare(const std::vector<std::string>& graphs, const std::vector<std::string>& clusters,
                long long r, bool debug) {
  std::cout << "instance\thungarian\tgt\tscaled\tt_hung_ms\tt_gt_ms\tt_scaled_ms\n";
  bool mismatch = false;
  for (size_t i = 0; i < graphs.size(); ++i) {
    std::string cpath = i < clusters.size() ? clusters[i] : std::string{};
    auto inst = load_instance(graphs[i], cpath, r);
    auto t0 = std::chrono::steady_clock::now();
    auto hung = hungarian_solve(*inst.graph);
    double t_h = ms_since(t0);
    if (!hung.perfect) {
      std::cerr << graphs[i] << ": no perfect matching; use `solve --reduce`\n";
      return kExitInfeasible;
    }
    t0 = std::chrono::steady_clock::now();
    auto gt = gt_solve(*inst.graph, debug);
    double t_g = ms_since(t0);
    SolveOptions opts;
    opts.debug_invariants = debug;
    t0 = std::chrono::steady_clock::now();
    auto sc = solve(*inst.graph, *inst.clustering, opts);
    double t_s = ms_since(t0);
    std::cout << graphs[i] << "\t" << hung.cost << "\t" << gt.cost << "\t" << sc.cost << "\t"
              << t_h << "\t" << t_g << "\t" << t_s << "\n";
    if (gt.cost != hung.cost || sc.cost != hung.cost) mismatch = true;
  }
  if (mismatch) {
    std::cerr << "cost mismatch between solvers\n";
    return kExitMismatch;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact minimum-cost bipartite matching over r-clustered graphs"};
  app.require_subcommand(1);
  // `--h` is the grid height, so only the long help flag is registered.
  app.set_help_flag("--help", "print help");

  // solve
  auto* solve_cmd = app.add_subcommand("solve", "solve one instance");
  std::string in_path, cluster_path, out_path, alg = "scaled";
  long long r = 0;
  bool verify = false, debug = false, reduce = false, emit_matching = false;
  int max_phases = 0;
  solve_cmd->add_option("--in", in_path, "graph file")->required();
  solve_cmd->add_option("--cluster", cluster_path, "clustering file (default: one piece)");
  solve_cmd->add_option("--alg", alg, "hungarian | gt | scaled");
  solve_cmd->add_option("--r", r, "clustering parameter (default ceil(n^{2/5}))");
  solve_cmd->add_flag("--verify", verify, "cross-check against the Hungarian solver");
  solve_cmd->add_flag("--debug-invariants", debug, "enable all feasibility assertions");
  solve_cmd->add_option("--max-phases-cap", max_phases, "safety cap on FastMatch phases");
  solve_cmd->add_flag("--reduce", reduce, "apply the doubled-graph perfect-matching reduction");
  solve_cmd->add_flag("--emit-matching", emit_matching, "include matched pairs in the output");
  solve_cmd->add_option("--out", out_path, "write the result document to a file");

  // gen
  auto* gen_cmd = app.add_subcommand("gen", "generate an instance");
  gen_cmd->set_help_flag("--help", "print help");
  std::string kind = "grid", out_graph = "graph.txt", out_cluster;
  int w = 8, h = 8, pieces = 4, piece_size = 8, extra = 6;
  unsigned long long seed = 1;
  Weight cmax = 100;
  long long gen_r = 0;
  gen_cmd->add_option("kind", kind, "grid | chain")->required();
  gen_cmd->add_option("--w", w, "grid width");
  gen_cmd->add_option("--h", h, "grid height");
  gen_cmd->add_option("--pieces", pieces, "chain pieces");
  gen_cmd->add_option("--piece-size", piece_size, "chain piece size (even)");
  gen_cmd->add_option("--extra", extra, "chain extra edges per piece");
  gen_cmd->add_option("--r", gen_r, "clustering parameter");
  gen_cmd->add_option("--seed", seed, "random seed");
  gen_cmd->add_option("--cmax", cmax, "maximum edge cost");
  gen_cmd->add_option("--out-graph", out_graph, "graph output path");
  gen_cmd->add_option("--out-cluster", out_cluster, "clustering output path");

  // compare
  auto* cmp_cmd = app.add_subcommand("compare", "run all solvers on instances");
  std::vector<std::string> cmp_graphs, cmp_clusters;
  long long cmp_r = 0;
  bool cmp_debug = false;
  cmp_cmd->add_option("--in", cmp_graphs, "graph files")->required();
  cmp_cmd->add_option("--cluster", cmp_clusters, "clustering files (paired by position)");
  cmp_cmd->add_option("--r", cmp_r, "clustering parameter");
  cmp_cmd->add_flag("--debug-invariants", cmp_debug, "enable all feasibility assertions");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitParse;
  }

  try {
    if (solve_cmd->parsed())
      return run_solve(in_path, cluster_path, r, alg, verify, debug, max_phases, reduce,
                       emit_matching, out_path);
    if (gen_cmd->parsed())
      return run_gen(kind, w, h, pieces, piece_size, extra, gen_r, seed, cmax, out_graph,
                     out_cluster);
    if (cmp_cmd->parsed()) return run_compare(cmp_graphs, cmp_clusters, cmp_r, cmp_debug);
  } catch (const parse_error& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const infeasible_error& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitParse;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitParse;
}
