#include "flowsynth/metrics/assignment.hpp"

#include <cmath>
#include <limits>

#include "flowsynth/errors.hpp"

namespace flowsynth {

namespace {

constexpr double kTight = 1e-9;

// Shortest augmenting path Hungarian method with row/column potentials.
// Indices are 1-based internally; row 0 / column 0 are sentinels.
struct Hungarian {
  std::vector<double> u, v;
  std::vector<std::size_t> row_of_col;

  explicit Hungarian(const std::vector<std::vector<double>>& a) {
    const std::size_t n = a.size();
    const double inf = std::numeric_limits<double>::infinity();
    u.assign(n + 1, 0.0);
    v.assign(n + 1, 0.0);
    row_of_col.assign(n + 1, 0);
    std::vector<std::size_t> way(n + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
      row_of_col[0] = i;
      std::size_t j0 = 0;
      std::vector<double> minv(n + 1, inf);
      std::vector<bool> used(n + 1, false);
      do {
        used[j0] = true;
        const std::size_t i0 = row_of_col[j0];
        double delta = inf;
        std::size_t j1 = 0;
        for (std::size_t j = 1; j <= n; ++j) {
          if (used[j]) continue;
          const double cur = a[i0 - 1][j - 1] - u[i0] - v[j];
          if (cur < minv[j]) {
            minv[j] = cur;
            way[j] = j0;
          }
          if (minv[j] < delta) {
            delta = minv[j];
            j1 = j;
          }
        }
        for (std::size_t j = 0; j <= n; ++j) {
          if (used[j]) {
            u[row_of_col[j]] += delta;
            v[j] -= delta;
          } else {
            minv[j] -= delta;
          }
        }
        j0 = j1;
      } while (row_of_col[j0] != 0);
      do {
        const std::size_t j1 = way[j0];
        row_of_col[j0] = row_of_col[j1];
        j0 = j1;
      } while (j0 != 0);
    }
  }
};

// Perfect matching restricted to tight edges, steered towards the
// lexicographically smallest column sequence.
class TightMatching {
 public:
  TightMatching(std::vector<std::vector<bool>> tight, std::vector<std::size_t> col_of_row)
      : tight_(std::move(tight)), col_of_row_(std::move(col_of_row)), n_(col_of_row_.size()) {
    row_of_col_.assign(n_, 0);
    for (std::size_t r = 0; r < n_; ++r) row_of_col_[col_of_row_[r]] = r;
    fixed_.assign(n_, false);
  }

  std::vector<std::size_t> lexicographic_min() {
    for (std::size_t r = 0; r < n_; ++r) {
      for (std::size_t c = 0; c < n_; ++c) {
        if (!tight_[r][c] || c == col_of_row_[r]) {
          if (c == col_of_row_[r]) break;
          continue;
        }
        const std::size_t other = row_of_col_[c];
        if (fixed_[other]) continue;
        if (try_reassign(r, c)) break;
      }
      fixed_[r] = true;
    }
    return col_of_row_;
  }

 private:
  // Give column c to row r; the row displaced from c must reach r's old column
  // through an alternating path over unfixed rows.
  bool try_reassign(std::size_t r, std::size_t c) {
    const std::size_t freed = col_of_row_[r];
    const std::size_t displaced = row_of_col_[c];
    std::vector<std::size_t> saved_cols = col_of_row_;
    std::vector<std::size_t> saved_rows = row_of_col_;
    col_of_row_[r] = c;
    row_of_col_[c] = r;
    visited_.assign(n_, false);
    visited_[c] = true;
    fixed_[r] = true;
    const bool ok = augment(displaced, freed);
    fixed_[r] = false;
    if (!ok) {
      col_of_row_ = std::move(saved_cols);
      row_of_col_ = std::move(saved_rows);
    }
    return ok;
  }

  bool augment(std::size_t row, std::size_t target) {
    for (std::size_t c = 0; c < n_; ++c) {
      if (!tight_[row][c] || visited_[c]) continue;
      visited_[c] = true;
      if (c == target) {
        col_of_row_[row] = c;
        row_of_col_[c] = row;
        return true;
      }
      const std::size_t next = row_of_col_[c];
      if (fixed_[next]) continue;
      if (augment(next, target)) {
        col_of_row_[row] = c;
        row_of_col_[c] = row;
        return true;
      }
    }
    return false;
  }

  std::vector<std::vector<bool>> tight_;
  std::vector<std::size_t> col_of_row_;
  std::vector<std::size_t> row_of_col_;
  std::vector<bool> fixed_;
  std::vector<bool> visited_;
  std::size_t n_;
};

}  // namespace

Assignment solve_assignment(const std::vector<std::vector<double>>& cost) {
  const std::size_t n = cost.size();
  for (const auto& row : cost) {
    if (row.size() != n) throw Error(ErrorCode::kInvalidArgument, "assignment cost matrix must be square");
    for (double x : row) {
      if (!std::isfinite(x)) throw Error(ErrorCode::kInvalidArgument, "assignment costs must be finite");
    }
  }
  Assignment result;
  if (n == 0) return result;

  Hungarian h(cost);
  std::vector<std::size_t> col_of_row(n);
  for (std::size_t j = 1; j <= n; ++j) col_of_row[h.row_of_col[j] - 1] = j - 1;

  // Complementary slackness: with optimal potentials, the optimal assignments
  // are exactly the perfect matchings on zero-reduced-cost cells.
  std::vector<std::vector<bool>> tight(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double reduced = cost[i][j] - h.u[i + 1] - h.v[j + 1];
      tight[i][j] = std::abs(reduced) <= kTight * (1.0 + std::abs(cost[i][j]));
    }
  }
  TightMatching matching(std::move(tight), std::move(col_of_row));
  result.column_of_row = matching.lexicographic_min();
  for (std::size_t i = 0; i < n; ++i) result.cost += cost[i][result.column_of_row[i]];
  return result;
}

}  // namespace flowsynth
