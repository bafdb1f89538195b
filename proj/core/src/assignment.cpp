#include "swarm/assignment.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace swarm {

std::optional<MotionType> parse_motion_type(std::string_view name) {
  for (MotionType m : kAllMotionTypes) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

std::vector<int> nearest_defender(std::span<const Vec2> adversaries, std::span<const Vec2> defenders) {
  if (defenders.empty()) throw std::invalid_argument("nearest_defender: empty defender set");
  std::vector<int> out(adversaries.size(), 0);
  for (std::size_t i = 0; i < adversaries.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < defenders.size(); ++j) {
      const Vec2 d = adversaries[i] - defenders[j];
      const double d2 = dot(d, d);
      if (d2 < best) {
        best = d2;
        out[i] = static_cast<int>(j);
      }
    }
  }
  return out;
}

namespace {

// Shortest augmenting path Hungarian method; requires n <= m.
// Returns row -> column.
std::vector<int> hungarian(std::span<const double> cost, int n, int m, bool transposed) {
  const double inf = std::numeric_limits<double>::infinity();
  auto c = [&](int i, int j) {
    return transposed ? cost[static_cast<std::size_t>(j) * n + i] : cost[static_cast<std::size_t>(i) * m + j];
  };
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
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= m; ++j) {
    if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
  }
  return row_to_col;
}

}  // namespace

std::vector<int> min_cost_assignment(std::span<const double> cost, int rows, int cols) {
  if (rows < 0 || cols < 0 || cost.size() != static_cast<std::size_t>(rows) * cols) {
    throw std::invalid_argument("min_cost_assignment: cost size does not match rows x cols");
  }
  if (rows == 0 || cols == 0) return std::vector<int>(rows, -1);
  if (rows <= cols) return hungarian(cost, rows, cols, false);
  // More rows than columns: match every column to a distinct row.
  const auto col_to_row = hungarian(cost, cols, rows, true);
  std::vector<int> out(rows, -1);
  for (int j = 0; j < cols; ++j) out[col_to_row[j]] = j;
  return out;
}

std::vector<int> assign_targets(std::span<const Vec2> adversaries, std::span<const Vec2> defenders,
                                Tactic tactic) {
  if (defenders.empty()) throw std::invalid_argument("assign_targets: empty defender set");
  if (!uses_auction(tactic)) return nearest_defender(adversaries, defenders);

  const int na = static_cast<int>(adversaries.size());
  const int nd = static_cast<int>(defenders.size());
  std::vector<double> cost(static_cast<std::size_t>(na) * nd);
  for (int i = 0; i < na; ++i) {
    for (int j = 0; j < nd; ++j) cost[static_cast<std::size_t>(i) * nd + j] = distance(adversaries[i], defenders[j]);
  }
  auto targets = min_cost_assignment(cost, na, nd);
  if (na > nd) {
    const auto fallback = nearest_defender(adversaries, defenders);
    for (int i = 0; i < na; ++i) {
      if (targets[i] < 0) targets[i] = fallback[i];
    }
  }
  return targets;
}

double assignment_cost(std::span<const Vec2> adversaries, std::span<const Vec2> defenders,
                       std::span<const int> targets) {
  double total = 0.0;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (targets[i] >= 0) total += distance(adversaries[i], defenders[targets[i]]);
  }
  return total;
}

}  // namespace swarm
