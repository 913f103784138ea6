#pragma once

#include <limits>
#include <vector>

namespace autostroke {

struct Assignment {
  double cost = 0.0;
  std::vector<int> row_to_col;  // -1 for unassigned rows
};

/// Exact minimum-cost assignment for a rows x cols cost matrix (row-major).
/// When rows <= cols every row is assigned; otherwise every column is, and
/// the surplus rows stay at -1. Shortest augmenting path with potentials.
inline Assignment solve_assignment(const std::vector<double>& cost, int rows, int cols) {
  Assignment out;
  out.row_to_col.assign(rows, -1);
  if (rows == 0 || cols == 0) return out;

  const bool transposed = rows > cols;
  const int n = transposed ? cols : rows;  // side that gets fully matched
  const int m = transposed ? rows : cols;
  auto c = [&](int i, int j) { return transposed ? cost[static_cast<std::size_t>(j) * cols + i] : cost[static_cast<std::size_t>(i) * cols + j]; };

  constexpr double inf = std::numeric_limits<double>::infinity();
  // 1-based arrays; p[j] = row matched to column j
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0), minv(m + 1);
  std::vector<int> p(m + 1, 0), way(m + 1, 0);
  std::vector<char> used(m + 1);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = c(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) { minv[j] = cur; way[j] = j0; }
        if (minv[j] < delta) { delta = minv[j]; j1 = j; }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) { u[p[j]] += delta; v[j] -= delta; }
        else minv[j] -= delta;
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  for (int j = 1; j <= m; ++j) {
    if (p[j] == 0) continue;
    const int small = p[j] - 1;
    const int large = j - 1;
    if (transposed) out.row_to_col[large] = small;
    else out.row_to_col[small] = large;
  }
  for (int r = 0; r < rows; ++r)
    if (out.row_to_col[r] >= 0) out.cost += cost[static_cast<std::size_t>(r) * cols + out.row_to_col[r]];
  return out;
}

}  // namespace autostroke
