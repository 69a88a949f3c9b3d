#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace svloc {

// Sorted, duplicate-free list of 0-based indices.
using IndexSet = std::vector<std::size_t>;

// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;

  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
      throw std::invalid_argument("Matrix: data size " + std::to_string(data_.size()) +
                                  " does not match shape " + std::to_string(rows_) + "x" +
                                  std::to_string(cols_));
    }
  }

  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.begin()->size();
    std::vector<double> data;
    data.reserve(r * c);
    for (const auto& row : rows) {
      if (row.size() != c) throw std::invalid_argument("Matrix::from_rows: ragged rows");
      data.insert(data.end(), row.begin(), row.end());
    }
    return Matrix(r, c, std::move(data));
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const noexcept {
    return {data_.data() + i * cols_, cols_};
  }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  bool all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
  }

  Matrix transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// y = X v
inline std::vector<double> multiply(const Matrix& x, std::span<const double> v) {
  if (v.size() != x.cols()) throw std::invalid_argument("multiply: dimension mismatch");
  std::vector<double> y(x.rows(), 0.0);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto r = x.row(i);
    double acc = 0.0;
    for (std::size_t j = 0; j < r.size(); ++j) acc += r[j] * v[j];
    y[i] = acc;
  }
  return y;
}

// y = X^T w
inline std::vector<double> multiply_transposed(const Matrix& x, std::span<const double> w) {
  if (w.size() != x.rows()) throw std::invalid_argument("multiply_transposed: dimension mismatch");
  std::vector<double> y(x.cols(), 0.0);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto r = x.row(i);
    const double wi = w[i];
    for (std::size_t j = 0; j < r.size(); ++j) y[j] += r[j] * wi;
  }
  return y;
}

inline double norm2(std::span<const double> v) {
  // Scaled accumulation so huge heavy-tailed entries do not overflow.
  double scale = 0.0;
  double ssq = 1.0;
  for (double x : v) {
    if (x == 0.0) continue;
    const double a = std::abs(x);
    if (scale < a) {
      ssq = 1.0 + ssq * (scale / a) * (scale / a);
      scale = a;
    } else {
      ssq += (a / scale) * (a / scale);
    }
  }
  return scale * std::sqrt(ssq);
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

inline double frobenius_norm(const Matrix& x) { return norm2(x.data()); }

inline double column_norm(const Matrix& x, std::size_t j) {
  std::vector<double> col(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) col[i] = x(i, j);
  return norm2(col);
}

// Row and column selection for minors.
struct MinorSpec {
  IndexSet kept_rows;
  IndexSet kept_columns;

  static MinorSpec all(const Matrix& x) {
    MinorSpec s;
    s.kept_rows.resize(x.rows());
    s.kept_columns.resize(x.cols());
    for (std::size_t i = 0; i < x.rows(); ++i) s.kept_rows[i] = i;
    for (std::size_t j = 0; j < x.cols(); ++j) s.kept_columns[j] = j;
    return s;
  }

  static MinorSpec columns(const Matrix& x, IndexSet cols) {
    MinorSpec s = all(x);
    s.kept_columns = std::move(cols);
    return s;
  }

  static MinorSpec rows(const Matrix& x, IndexSet rws) {
    MinorSpec s = all(x);
    s.kept_rows = std::move(rws);
    return s;
  }
};

namespace detail {
inline void check_index_set(const IndexSet& set, std::size_t bound, const char* what) {
  if (set.empty()) throw std::invalid_argument(std::string("take_minor: empty ") + what + " selection");
  for (std::size_t k = 0; k < set.size(); ++k) {
    if (set[k] >= bound)
      throw std::out_of_range(std::string("take_minor: ") + what + " index " +
                              std::to_string(set[k]) + " out of range " + std::to_string(bound));
    if (k > 0 && set[k] <= set[k - 1])
      throw std::invalid_argument(std::string("take_minor: ") + what + " indices must be strictly increasing");
  }
}
}  // namespace detail

inline Matrix take_minor(const Matrix& x, const MinorSpec& spec) {
  detail::check_index_set(spec.kept_rows, x.rows(), "row");
  detail::check_index_set(spec.kept_columns, x.cols(), "column");
  Matrix out(spec.kept_rows.size(), spec.kept_columns.size());
  for (std::size_t a = 0; a < spec.kept_rows.size(); ++a) {
    const auto src = x.row(spec.kept_rows[a]);
    auto dst = out.row(a);
    for (std::size_t b = 0; b < spec.kept_columns.size(); ++b) dst[b] = src[spec.kept_columns[b]];
  }
  return out;
}

}  // namespace svloc
