#pragma once

#include <algorithm>
#include <limits>
#include <vector>

namespace autostroke {

/// Dinic max-flow / min-cut over a graph with implicit source and sink
/// terminals. Nodes carry terminal capacities; edges are added in pairs.
class MinCutGraph {
 public:
  explicit MinCutGraph(int nodes) : source_(nodes), sink_(nodes + 1), head_(nodes + 2, -1), term_src_(nodes, 0.0), term_snk_(nodes, 0.0) {}

  int node_count() const { return source_; }

  /// Capacity from source to `node` and from `node` to sink (accumulates).
  void add_terminal(int node, double cap_source, double cap_sink) {
    term_src_[node] += cap_source;
    term_snk_[node] += cap_sink;
  }

  /// Undirected-style pair: capacity `cap_ab` along a->b and `cap_ba` along b->a.
  void add_edge(int a, int b, double cap_ab, double cap_ba) { add_arc_pair(a, b, cap_ab, cap_ba); }

  /// Runs max-flow; afterwards `source_side(node)` gives the min-cut side.
  double solve() {
    double flow = 0.0;
    // Flow that can go source -> v -> sink directly needs no search.
    for (int v = 0; v < source_; ++v) {
      const double direct = std::min(term_src_[v], term_snk_[v]);
      flow += direct;
      term_src_[v] -= direct;
      term_snk_[v] -= direct;
      if (term_src_[v] > 0) add_arc_pair(source_, v, term_src_[v], 0.0);
      if (term_snk_[v] > 0) add_arc_pair(v, sink_, term_snk_[v], 0.0);
    }
    level_.assign(head_.size(), -1);
    iter_.resize(head_.size());
    while (bfs()) {
      std::copy(head_.begin(), head_.end(), iter_.begin());
      flow += augment_all();
    }
    // final BFS leaves `level_` marking the source side
    return flow;
  }

  bool source_side(int node) const { return level_[node] >= 0; }

 private:
  static constexpr double kEps = 1e-12;

  void add_arc_pair(int a, int b, double cap_ab, double cap_ba) {
    to_.push_back(b); cap_.push_back(cap_ab); next_.push_back(head_[a]); head_[a] = static_cast<int>(to_.size()) - 1;
    to_.push_back(a); cap_.push_back(cap_ba); next_.push_back(head_[b]); head_[b] = static_cast<int>(to_.size()) - 1;
  }

  bool bfs() {
    std::fill(level_.begin(), level_.end(), -1);
    queue_.clear();
    queue_.push_back(source_);
    level_[source_] = 0;
    for (std::size_t qi = 0; qi < queue_.size(); ++qi) {
      const int v = queue_[qi];
      for (int e = head_[v]; e >= 0; e = next_[e]) {
        if (cap_[e] > kEps && level_[to_[e]] < 0) {
          level_[to_[e]] = level_[v] + 1;
          queue_.push_back(to_[e]);
        }
      }
    }
    return level_[sink_] >= 0;
  }

  // Iterative blocking-flow search along the level graph.
  double augment_all() {
    double total = 0.0;
    std::vector<int>& path = path_;  // edge indices
    while (true) {
      path.clear();
      int v = source_;
      while (v != sink_) {
        int& e = iter_[v];
        while (e >= 0 && !(cap_[e] > kEps && level_[to_[e]] == level_[v] + 1)) e = next_[e];
        if (e >= 0) {
          path.push_back(e);
          v = to_[e];
          continue;
        }
        // dead end: retreat
        if (v == source_) return total;
        level_[v] = -2;
        const int back = path.back();
        path.pop_back();
        v = to_[back ^ 1];
        iter_[v] = next_[iter_[v]];
      }
      double push = std::numeric_limits<double>::infinity();
      for (int e : path) push = std::min(push, cap_[e]);
      for (int e : path) {
        cap_[e] -= push;
        cap_[e ^ 1] += push;
      }
      total += push;
    }
  }

  int source_;
  int sink_;
  std::vector<int> head_;
  std::vector<int> to_;
  std::vector<int> next_;
  std::vector<double> cap_;
  std::vector<double> term_src_;
  std::vector<double> term_snk_;
  std::vector<int> level_;
  std::vector<int> iter_;
  std::vector<int> queue_;
  std::vector<int> path_;
};

}  // namespace autostroke
