#include "nlda/assignment.hpp"

#include "nlda/error.hpp"

#include <limits>

namespace nlda {

std::vector<std::size_t> min_cost_assignment(const Matrix<double>& cost) {
  const std::size_t n = cost.rows();
  const std::size_t m = cost.cols();
  if (n > m) throw InputError("assignment needs at least as many columns as rows");
  if (n == 0) return {};

  constexpr double kInf = std::numeric_limits<double>::infinity();
  constexpr std::size_t kNone = 0;
  // 1-based rows/columns; index 0 is the virtual start node.
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<std::size_t> match(m + 1, kNone), way(m + 1, 0);

  for (std::size_t i = 1; i <= n; ++i) {
    match[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(m + 1, kInf);
    std::vector<bool> used(m + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = match[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != kNone);
    do {
      const std::size_t j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<std::size_t> row_to_col(n);
  for (std::size_t j = 1; j <= m; ++j) {
    if (match[j] != kNone) row_to_col[match[j] - 1] = j - 1;
  }
  return row_to_col;
}

std::vector<std::size_t> max_score_assignment(const Matrix<double>& score) {
  Matrix<double> cost(score.rows(), score.cols());
  for (std::size_t r = 0; r < score.rows(); ++r) {
    for (std::size_t c = 0; c < score.cols(); ++c) cost(r, c) = -score(r, c);
  }
  return min_cost_assignment(cost);
}

}  // namespace nlda
