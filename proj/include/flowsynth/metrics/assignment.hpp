#pragma once

#include <cstddef>
#include <vector>

namespace flowsynth {

struct Assignment {
  std::vector<std::size_t> column_of_row;
  double cost = 0.0;
};

// Minimum-cost perfect assignment on a square cost matrix (rows x cols).
// Among all optimal assignments the one whose column sequence, read in row
// order, is lexicographically smallest is returned.
Assignment solve_assignment(const std::vector<std::vector<double>>& cost);

}  // namespace flowsynth
