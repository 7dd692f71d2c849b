#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "maviscid/common.hpp"

namespace maviscid {

/// General sparse matrix in compressed row storage. Column indices are sorted
/// within each row and unique.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(Index rows, Index cols) : rows_(rows), cols_(cols), row_ptr_(rows + 1, 0) {}

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Index nonzeros() const { return static_cast<Index>(values_.size()); }

  const std::vector<Index>& row_ptr() const { return row_ptr_; }
  const std::vector<Index>& col_index() const { return col_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  /// Zero matrix with a fixed pattern; each row's column list must be sorted
  /// and unique.
  static SparseMatrix from_pattern(Index rows, Index cols,
                                   const std::vector<std::vector<Index>>& pattern);

  /// Adds v to a stored entry. Throws if (r, c) is not in the pattern.
  void add_to(Index r, Index c, double v);

  /// Entry (r, c), zero when not stored.
  double at(Index r, Index c) const;

  std::vector<double> multiply(std::span<const double> x) const;
  /// Bilinear form y^T A x.
  double bilinear(std::span<const double> y, std::span<const double> x) const;

  double norm_inf() const;
  /// max |A_ij - B_ij| over the union of patterns.
  double max_abs_diff(const SparseMatrix& other) const;
  SparseMatrix transpose() const;

  /// Submatrix keeping the listed rows and columns, renumbered in list order.
  SparseMatrix restrict_to(std::span<const Index> rows,
                           std::span<const Index> cols) const;

  /// MatrixMarket "coordinate real general" text, 1-based indices.
  void write_matrix_market(std::ostream& os) const;

 private:
  friend class TripletBuilder;
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<Index> row_ptr_{0};
  std::vector<Index> col_;
  std::vector<double> values_;
};

/// Collects (row, col, value) contributions; duplicates are summed in
/// insertion order when the matrix is built, so assembly is bit-reproducible.
class TripletBuilder {
 public:
  TripletBuilder(Index rows, Index cols) : rows_(rows), cols_(cols) {}
  void add(Index r, Index c, double v) { entries_.push_back({r, c, v}); }
  void reserve(std::size_t n) { entries_.reserve(n); }
  SparseMatrix build() const;

 private:
  struct Entry {
    Index row, col;
    double value;
  };
  Index rows_, cols_;
  std::vector<Entry> entries_;
};

}  // namespace maviscid
