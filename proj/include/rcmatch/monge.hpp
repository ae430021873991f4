#ifndef RCMATCH_MONGE_HPP
#define RCMATCH_MONGE_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "rcmatch/graph.hpp"

namespace rcmatch {

// Implicit p x q matrix: a constant-time entry oracle plus per-row additive
// offsets (the dynamic part). Entries must satisfy the Monge condition
// M[i][k] + M[j][l] <= M[i][l] + M[j][k] for i<j, k<l.
class ImplicitMongeMatrix {
 public:
  ImplicitMongeMatrix(int rows, int cols, std::function<Weight(int, int)> base)
      : rows_(rows), cols_(cols), base_(std::move(base)), offset_(rows, 0) {
    if (rows < 1 || cols < 1) throw std::invalid_argument("matrix must be non-empty");
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  Weight at(int row, int col) const { return base_(row, col) + offset_[row]; }
  Weight row_offset(int row) const { return offset_[row]; }
  void add_row_offset(int row, Weight c) { offset_[row] += c; }

  // Exhaustive O(p^2 q^2) Monge check; intended for small matrices.
  bool is_monge() const;

 private:
  int rows_, cols_;
  std::function<Weight(int, int)> base_;
  std::vector<Weight> offset_;
};

// Balanced range tree over rows; each node stores the lower envelope of its
// rows as column intervals. Supports column range-minimum queries and
// amortized row raises. Ties always go to the lowest row index.
class EnvelopeTree {
 public:
  struct Segment {
    int col_begin;  // segment covers [col_begin, col_end)
    int col_end;
    int row;
  };

  explicit EnvelopeTree(ImplicitMongeMatrix matrix, bool validate = false);

  const ImplicitMongeMatrix& matrix() const { return m_; }

  // Minimum entry in `col` over rows [row_begin, row_end); ties by lowest row.
  std::pair<int, Weight> find_min_in_column(int col, int row_begin, int row_end) const;
  std::pair<int, Weight> find_min_in_column(int col) const {
    return find_min_in_column(col, 0, m_.rows());
  }

  // Adds c >= 0 to every entry of `row` and repairs the affected envelopes.
  void raise_row(int row, Weight c);

  // Instrumentation.
  long long envelope_entries_touched() const { return entries_touched_; }
  long long breakpoints_created() const { return breakpoints_created_; }
  long long breakpoints_removed() const { return breakpoints_removed_; }
  // Over the whole tree, for assertions on the repair budget.
  int total_breakpoints() const;
  const std::vector<Segment>& node_envelope(int node) const { return env_[node]; }
  int root() const { return root_; }

 private:
  struct Node {
    int row_begin, row_end;  // [row_begin, row_end)
    int left = -1, right = -1;
  };

  int build_node(int row_begin, int row_end);
  std::vector<Segment> merge_envelopes(const std::vector<Segment>& low,
                                       const std::vector<Segment>& high) const;
  Weight envelope_value_at(const std::vector<Segment>& env, int col) const;
  int envelope_row_at(const std::vector<Segment>& env, int col) const;
  void repair_node(int node, int row);
  // Winner among node's rows at `col` when row `raised` has its new value:
  // min over (env of rows above, raised row, env of rows below).
  std::pair<int, Weight> winner_at(int node, int raised, int col) const;
  std::pair<int, Weight> range_min_query(int node, int col, int row_begin, int row_end) const;

  ImplicitMongeMatrix m_;
  std::vector<Node> nodes_;
  std::vector<std::vector<Segment>> env_;
  int root_ = -1;
  mutable long long entries_touched_ = 0;
  long long breakpoints_created_ = 0;
  long long breakpoints_removed_ = 0;
};

// Test generator: M[i][j] = a_i + b_j + sum_{i'>=i, j'<=j} g[i'][j'] with
// g >= 0, which is Monge by construction.
ImplicitMongeMatrix random_monge(int rows, int cols, unsigned long long seed,
                                 Weight value_range = 50);

}  // namespace rcmatch

#endif  // RCMATCH_MONGE_HPP
