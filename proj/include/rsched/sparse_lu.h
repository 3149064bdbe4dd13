#pragma once

// Sparse LU factorization of a simplex basis with product-form updates.

#include <utility>
#include <vector>

namespace rsched::detail {

using SparseColumn = std::vector<std::pair<int, double>>;  // (row, value)

class SparseLU {
 public:
  struct Singularity {
    std::vector<int> positions;  // basis positions left without a pivot
    std::vector<int> rows;       // rows left without a pivot
    bool empty() const { return positions.empty(); }
  };

  // Factors the m x m matrix whose k-th column is columns[k]. Pivots follow
  // a Markowitz search with threshold partial pivoting. On (numerical)
  // singularity the unpivoted positions and rows are reported and the
  // factorization is unusable.
  Singularity factor(int m, const std::vector<SparseColumn>& columns, double pivot_tol);

  // Solves B x = b. Input indexed by row, output by basis position.
  void ftran(std::vector<double>& values) const;
  // Solves B' y = c. Input indexed by basis position, output by row.
  void btran(std::vector<double>& values) const;

  // Replaces basis position r by a column whose ftran image is `alpha`.
  void update(int r, const std::vector<double>& alpha);

  int num_updates() const { return static_cast<int>(etas_.size()); }
  std::size_t fill() const;

 private:
  struct Pivot {
    int row;
    int position;
    double diag;
    std::vector<std::pair<int, double>> lower;  // (row, multiplier)
    std::vector<std::pair<int, double>> upper;  // (position, value), diag excluded
  };
  struct Eta {
    int position;
    double pivot;
    std::vector<std::pair<int, double>> entries;  // (position, alpha), pivot excluded
  };

  int m_ = 0;
  std::vector<Pivot> pivots_;
  std::vector<Eta> etas_;
  mutable std::vector<double> work_;
};

}  // namespace rsched::detail
