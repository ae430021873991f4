#include "rcmatch/monge.hpp"

#include <algorithm>
#include <memory>

#include "rcmatch/rng.hpp"

namespace rcmatch {

bool ImplicitMongeMatrix::is_monge() const {
  for (int i = 0; i + 1 < rows_; ++i)
    for (int j = i + 1; j < rows_; ++j)
      for (int k = 0; k + 1 < cols_; ++k)
        for (int l = k + 1; l < cols_; ++l)
          if (at(i, k) + at(j, l) > at(i, l) + at(j, k)) return false;
  return true;
}

EnvelopeTree::EnvelopeTree(ImplicitMongeMatrix matrix, bool validate) : m_(std::move(matrix)) {
  if (validate && !m_.is_monge()) throw std::invalid_argument("matrix is not Monge");
  root_ = build_node(0, m_.rows());
}

int EnvelopeTree::build_node(int row_begin, int row_end) {
  int id = static_cast<int>(nodes_.size());
  nodes_.push_back(Node{row_begin, row_end});
  env_.emplace_back();
  if (row_end - row_begin == 1) {
    env_[id] = {Segment{0, m_.cols(), row_begin}};
    ++entries_touched_;
    return id;
  }
  int mid = row_begin + (row_end - row_begin) / 2;
  int l = build_node(row_begin, mid);
  int r = build_node(mid, row_end);
  nodes_[id].left = l;
  nodes_[id].right = r;
  env_[id] = merge_envelopes(env_[l], env_[r]);
  return id;
}

Weight EnvelopeTree::envelope_value_at(const std::vector<Segment>& env, int col) const {
  return m_.at(envelope_row_at(env, col), col);
}

int EnvelopeTree::envelope_row_at(const std::vector<Segment>& env, int col) const {
  ++entries_touched_;
  auto it = std::upper_bound(env.begin(), env.end(), col,
                             [](int c, const Segment& s) { return c < s.col_begin; });
  return std::prev(it)->row;
}

std::vector<EnvelopeTree::Segment> EnvelopeTree::merge_envelopes(
    const std::vector<Segment>& low, const std::vector<Segment>& high) const {
  // All rows of `low` precede all rows of `high`, so the lower set wins a
  // prefix of columns and the higher set a suffix (difference of any
  // high-row and low-row entry is non-increasing in the column). Ties keep
  // the lower set, matching the lowest-row tie rule.
  int q = m_.cols();
  auto high_strictly_better = [&](int col) {
    return envelope_value_at(high, col) < envelope_value_at(low, col);
  };
  int lo = 0, hi = q;  // crossover in [0, q]
  while (lo < hi) {
    int mid = lo + (hi - lo) / 2;
    if (high_strictly_better(mid))
      hi = mid;
    else
      lo = mid + 1;
  }
  int cross = lo;
  std::vector<Segment> out;
  for (const Segment& s : low) {
    if (s.col_begin >= cross) break;
    out.push_back(Segment{s.col_begin, std::min(s.col_end, cross), s.row});
    ++entries_touched_;
  }
  for (const Segment& s : high) {
    if (s.col_end <= cross) continue;
    out.push_back(Segment{std::max(s.col_begin, cross), s.col_end, s.row});
    ++entries_touched_;
  }
  return out;
}

std::pair<int, Weight> EnvelopeTree::find_min_in_column(int col, int row_begin, int row_end) const {
  if (col < 0 || col >= m_.cols()) throw std::invalid_argument("column out of range");
  if (row_begin < 0 || row_end > m_.rows() || row_begin >= row_end)
    throw std::invalid_argument("empty or invalid row range");
  return range_min_query(root_, col, row_begin, row_end);
}

std::pair<int, Weight> EnvelopeTree::range_min_query(int node, int col, int row_begin,
                                                     int row_end) const {
  const Node& nd = nodes_[node];
  int lo = std::max(nd.row_begin, row_begin);
  int hi = std::min(nd.row_end, row_end);
  if (lo >= hi) return {-1, 0};
  if (lo == nd.row_begin && hi == nd.row_end) {
    int row = envelope_row_at(env_[node], col);
    return {row, m_.at(row, col)};
  }
  auto left = range_min_query(nd.left, col, row_begin, row_end);
  auto right = range_min_query(nd.right, col, row_begin, row_end);
  if (left.first < 0) return right;
  if (right.first < 0) return left;
  if (right.second < left.second) return right;
  return left;  // ties go to the lower row, which lives in the left subtree
}

std::pair<int, Weight> EnvelopeTree::winner_at(int node, int raised, int col) const {
  const Node& nd = nodes_[node];
  std::pair<int, Weight> best{raised, m_.at(raised, col)};
  if (raised > nd.row_begin) {
    auto above = range_min_query(node, col, nd.row_begin, raised);
    if (above.first >= 0 && above.second <= best.second) best = above;
  }
  if (raised + 1 < nd.row_end) {
    auto below = range_min_query(node, col, raised + 1, nd.row_end);
    if (below.first >= 0 && below.second < best.second) best = below;
  }
  return best;
}

void EnvelopeTree::raise_row(int row, Weight c) {
  if (row < 0 || row >= m_.rows()) throw std::invalid_argument("row out of range");
  if (c < 0) throw std::invalid_argument("raise amount must be non-negative");
  m_.add_row_offset(row, c);
  if (c == 0) return;
  // Collect the root-to-leaf path through `row`; repair bottom-up so child
  // envelopes are valid when a parent queries them.
  std::vector<int> path;
  int node = root_;
  while (true) {
    path.push_back(node);
    const Node& nd = nodes_[node];
    if (nd.row_end - nd.row_begin == 1) break;
    node = row < nodes_[nd.left].row_end ? nd.left : nd.right;
  }
  for (auto it = path.rbegin(); it != path.rend(); ++it) {
    const Node& nd = nodes_[*it];
    if (nd.row_end - nd.row_begin == 1) continue;  // leaf envelope is the row itself
    repair_node(*it, row);
  }
}

void EnvelopeTree::repair_node(int node, int row) {
  auto& env = env_[node];
  int first = -1, last = -1;
  for (int i = 0; i < static_cast<int>(env.size()); ++i)
    if (env[i].row == row) {
      if (first < 0) first = i;
      last = i;
    }
  if (first < 0) return;  // row off this envelope; raising keeps it off
  int col_lo = env[first].col_begin;
  int col_hi = env[last].col_end;
  int old_breakpoints = static_cast<int>(env.size()) - 1;

  // Recompute the envelope over [col_lo, col_hi). Winner rows are
  // non-decreasing in the column, so each owner occupies one contiguous run
  // found by binary search.
  std::vector<Segment> fresh;
  int cur = col_lo;
  while (cur < col_hi) {
    auto w = winner_at(node, row, cur);
    int lo = cur + 1, hi = col_hi;
    while (lo < hi) {
      int mid = lo + (hi - lo) / 2;
      if (winner_at(node, row, mid).first == w.first)
        lo = mid + 1;
      else
        hi = mid;
    }
    fresh.push_back(Segment{cur, lo, w.first});
    cur = lo;
  }

  std::vector<Segment> out;
  out.reserve(env.size() + fresh.size());
  for (int i = 0; i < first; ++i) out.push_back(env[i]);
  for (const Segment& s : fresh) {
    if (!out.empty() && out.back().row == s.row && out.back().col_end == s.col_begin)
      out.back().col_end = s.col_end;
    else
      out.push_back(s);
  }
  for (int i = last + 1; i < static_cast<int>(env.size()); ++i) {
    const Segment& s = env[i];
    if (!out.empty() && out.back().row == s.row && out.back().col_end == s.col_begin)
      out.back().col_end = s.col_end;
    else
      out.push_back(s);
  }
  env = std::move(out);

  int new_breakpoints = static_cast<int>(env.size()) - 1;
  if (new_breakpoints > old_breakpoints)
    breakpoints_created_ += new_breakpoints - old_breakpoints;
  else
    breakpoints_removed_ += old_breakpoints - new_breakpoints;
  // A single raise never removes more than one breakpoint from a node
  // envelope (the raised pseudo-line leaves at most one interval).
  if (old_breakpoints - new_breakpoints > 1)
    throw std::logic_error("raise_row removed more than one breakpoint in a node");
}

int EnvelopeTree::total_breakpoints() const {
  int total = 0;
  for (const auto& env : env_) total += static_cast<int>(env.size()) - 1;
  return total;
}

ImplicitMongeMatrix random_monge(int rows, int cols, unsigned long long seed, Weight value_range) {
  Rng rng(seed);
  auto a = std::make_shared<std::vector<Weight>>(rows);
  auto b = std::make_shared<std::vector<Weight>>(cols);
  for (auto& v : *a) v = rng.range(0, value_range);
  for (auto& v : *b) v = rng.range(0, value_range);
  // Suffix-rows / prefix-cols sums of a non-negative bump field.
  auto s = std::make_shared<std::vector<Weight>>(static_cast<size_t>(rows) * cols, 0);
  auto at = [cols](std::vector<Weight>& t, int i, int j) -> Weight& {
    return t[static_cast<size_t>(i) * cols + j];
  };
  for (int i = rows - 1; i >= 0; --i)
    for (int j = 0; j < cols; ++j) {
      Weight g = rng.below(4) == 0 ? rng.range(0, value_range / 8 + 1) : 0;
      Weight below = i + 1 < rows ? at(*s, i + 1, j) : 0;
      Weight left = j > 0 ? at(*s, i, j - 1) : 0;
      Weight diag = (i + 1 < rows && j > 0) ? at(*s, i + 1, j - 1) : 0;
      at(*s, i, j) = g + below + left - diag;
    }
  return ImplicitMongeMatrix(rows, cols, [a, b, s, cols](int i, int j) {
    return (*a)[i] + (*b)[j] + (*s)[static_cast<size_t>(i) * cols + j];
  });
}

}  // namespace rcmatch
