#pragma once

#include <utility>
#include <vector>

namespace hublab::detail {

using SparseColumn = std::vector<std::pair<int, double>>;

// Dense LU of an m x m basis with row partial pivoting. Columns are
// eliminated sparsest first so unit (logical) columns cost no fill; row-wise
// updates run through the kernel table.
class DenseLu {
 public:
  struct Deficiency {
    std::vector<int> positions;  // basis positions without an acceptable pivot
    std::vector<int> free_rows;  // rows left without a pivot
  };

  // columns[pos] holds the basis column at position pos.
  Deficiency factor(const std::vector<SparseColumn>& columns, double pivot_tol);

  // B y = b. In: b indexed by row. Out: y indexed by basis position.
  void ftran(std::vector<double>& b) const;

  // B' y = c. In: c indexed by basis position. Out: y indexed by row.
  void btran(std::vector<double>& c) const;

  int size() const { return m_; }

 private:
  int m_ = 0;
  std::vector<double> work_;       // row-major m x m, column index = step
  std::vector<int> order_;         // step -> basis position
  std::vector<int> pivot_row_;     // step -> row
  std::vector<int> step_of_row_;   // row -> step
  std::vector<std::vector<std::pair<int, double>>> lower_;  // step -> (row, l)
  mutable std::vector<double> scratch_;
};

}  // namespace hublab::detail
