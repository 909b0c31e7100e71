#pragma once

#include "nlda/matrix.hpp"

#include <cstddef>
#include <vector>

namespace nlda {

/// Minimum-cost assignment of rows to distinct columns (Kuhn-Munkres with
/// potentials, O(rows^2 * cols)). Requires rows <= cols. Returns the
/// column chosen for each row.
std::vector<std::size_t> min_cost_assignment(const Matrix<double>& cost);

/// Same problem, maximizing total score.
std::vector<std::size_t> max_score_assignment(const Matrix<double>& score);

}  // namespace nlda
