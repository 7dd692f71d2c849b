#include "maviscid/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

namespace maviscid {

SparseMatrix SparseMatrix::from_pattern(
    Index rows, Index cols, const std::vector<std::vector<Index>>& pattern) {
  require(static_cast<Index>(pattern.size()) == rows, "pattern row count mismatch");
  SparseMatrix m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    m.col_.insert(m.col_.end(), pattern[r].begin(), pattern[r].end());
    m.row_ptr_[r + 1] = static_cast<Index>(m.col_.size());
  }
  m.values_.assign(m.col_.size(), 0.0);
  return m;
}

void SparseMatrix::add_to(Index r, Index c, double v) {
  const auto first = col_.begin() + row_ptr_[r];
  const auto last = col_.begin() + row_ptr_[r + 1];
  auto it = std::lower_bound(first, last, c);
  if (it == last || *it != c)
    throw Error(ErrorCode::invalid_argument, "entry outside sparsity pattern");
  values_[it - col_.begin()] += v;
}

double SparseMatrix::at(Index r, Index c) const {
  const auto first = col_.begin() + row_ptr_[r];
  const auto last = col_.begin() + row_ptr_[r + 1];
  auto it = std::lower_bound(first, last, c);
  if (it == last || *it != c) return 0.0;
  return values_[it - col_.begin()];
}

std::vector<double> SparseMatrix::multiply(std::span<const double> x) const {
  require(static_cast<Index>(x.size()) == cols_, "multiply: size mismatch");
  std::vector<double> y(rows_, 0.0);
  for (Index r = 0; r < rows_; ++r) {
    double s = 0.0;
    for (Index k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) s += values_[k] * x[col_[k]];
    y[r] = s;
  }
  return y;
}

double SparseMatrix::bilinear(std::span<const double> y,
                              std::span<const double> x) const {
  const auto ax = multiply(x);
  return std::inner_product(y.begin(), y.end(), ax.begin(), 0.0);
}

double SparseMatrix::norm_inf() const {
  double m = 0.0;
  for (Index r = 0; r < rows_; ++r) {
    double s = 0.0;
    for (Index k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) s += std::abs(values_[k]);
    m = std::max(m, s);
  }
  return m;
}

double SparseMatrix::max_abs_diff(const SparseMatrix& other) const {
  require(rows_ == other.rows_ && cols_ == other.cols_,
          "max_abs_diff: shape mismatch");
  double m = 0.0;
  for (Index r = 0; r < rows_; ++r) {
    for (Index k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
      m = std::max(m, std::abs(values_[k] - other.at(r, col_[k])));
    for (Index k = other.row_ptr_[r]; k < other.row_ptr_[r + 1]; ++k)
      m = std::max(m, std::abs(other.values_[k] - at(r, other.col_[k])));
  }
  return m;
}

SparseMatrix SparseMatrix::transpose() const {
  TripletBuilder b(cols_, rows_);
  b.reserve(values_.size());
  for (Index r = 0; r < rows_; ++r)
    for (Index k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) b.add(col_[k], r, values_[k]);
  return b.build();
}

SparseMatrix SparseMatrix::restrict_to(std::span<const Index> rows,
                                       std::span<const Index> cols) const {
  std::vector<Index> col_map(cols_, -1);
  for (std::size_t j = 0; j < cols.size(); ++j) col_map[cols[j]] = static_cast<Index>(j);
  SparseMatrix out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Index r = rows[i];
    for (Index k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      const Index c = col_map[col_[k]];
      if (c < 0) continue;
      out.col_.push_back(c);
      out.values_.push_back(values_[k]);
    }
    // Column order follows the source; re-sort in case cols is not monotone.
    const Index begin = out.row_ptr_[i];
    const Index end = static_cast<Index>(out.col_.size());
    std::vector<std::pair<Index, double>> row;
    for (Index k = begin; k < end; ++k) row.emplace_back(out.col_[k], out.values_[k]);
    std::sort(row.begin(), row.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (Index k = begin; k < end; ++k) {
      out.col_[k] = row[k - begin].first;
      out.values_[k] = row[k - begin].second;
    }
    out.row_ptr_[i + 1] = end;
  }
  return out;
}

void SparseMatrix::write_matrix_market(std::ostream& os) const {
  os << "%%MatrixMarket matrix coordinate real general\n";
  os << rows_ << ' ' << cols_ << ' ' << nonzeros() << '\n';
  os.precision(17);
  for (Index r = 0; r < rows_; ++r)
    for (Index k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
      os << r + 1 << ' ' << col_[k] + 1 << ' ' << values_[k] << '\n';
}

SparseMatrix TripletBuilder::build() const {
  SparseMatrix m(rows_, cols_);
  // Counting sort by row, then stable sort by column within each row keeps
  // duplicate summation in insertion order.
  std::vector<Index> count(rows_ + 1, 0);
  for (const auto& e : entries_) {
    require(e.row >= 0 && e.row < rows_ && e.col >= 0 && e.col < cols_,
            "triplet index out of range");
    ++count[e.row + 1];
  }
  std::partial_sum(count.begin(), count.end(), count.begin());
  std::vector<std::size_t> order(entries_.size());
  {
    std::vector<Index> next(count.begin(), count.end() - 1);
    for (std::size_t i = 0; i < entries_.size(); ++i) order[next[entries_[i].row]++] = i;
  }
  for (Index r = 0; r < rows_; ++r) {
    auto first = order.begin() + count[r];
    auto last = order.begin() + count[r + 1];
    std::stable_sort(first, last, [this](std::size_t a, std::size_t b) {
      return entries_[a].col < entries_[b].col;
    });
    for (auto it = first; it != last; ++it) {
      const auto& e = entries_[*it];
      if (!m.col_.empty() && static_cast<Index>(m.col_.size()) > m.row_ptr_[r] &&
          m.col_.back() == e.col) {
        m.values_.back() += e.value;
      } else {
        m.col_.push_back(e.col);
        m.values_.push_back(e.value);
      }
    }
    m.row_ptr_[r + 1] = static_cast<Index>(m.col_.size());
  }
  return m;
}

}  // namespace maviscid
