#pragma once

#include <cassert>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mvcca/common.hpp"

namespace mvcca {

// Dense real matrix, row-major doubles. Small by design: just the operations
// the decomposition and training code need, all with deterministic loop order.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) {
    assert(r < rows_ && c < cols_);
    return data_[r * cols_ + c];
  }
  double operator()(std::size_t r, std::size_t c) const {
    assert(r < rows_ && c < cols_);
    return data_[r * cols_ + c];
  }

  std::span<double> row(std::size_t r) {
    assert(r < rows_);
    return {data_.data() + r * cols_, cols_};
  }
  std::span<const double> row(std::size_t r) const {
    assert(r < rows_);
    return {data_.data() + r * cols_, cols_};
  }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  std::vector<double> col(std::size_t c) const;
  void set_col(std::size_t c, std::span<const double> values);

  // Columns [begin, end) as a new matrix.
  Matrix col_range(std::size_t begin, std::size_t end) const;

  bool all_finite() const;

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix transpose(const Matrix& a);
Matrix matmul(const Matrix& a, const Matrix& b);
// a' * b without forming the transpose.
Matrix matmul_at_b(const Matrix& a, const Matrix& b);
// a * b' without forming the transpose.
Matrix matmul_a_bt(const Matrix& a, const Matrix& b);

double frobenius_norm(const Matrix& a);
double max_abs(const Matrix& a);
double max_abs_diff(const Matrix& a, const Matrix& b);

// max |a'a - I|, the orthonormality defect of a's columns.
double orthonormality_defect(const Matrix& a);

enum class MatrixKind : std::uint8_t {
  spectrogram = 0,
  embedding = 1,
  reduced = 2,
};

// A feature matrix with provenance: rows are features (frequency bins or
// embedding dimensions), columns are time frames.
struct FeatureMatrix {
  Matrix values;
  MatrixKind kind = MatrixKind::spectrogram;
  std::string source_id;

  std::size_t rows() const { return values.rows(); }
  std::size_t cols() const { return values.cols(); }
};

// Throws ValidationError when the matrix is empty or has non-finite entries.
void validate(const FeatureMatrix& m);

}  // namespace mvcca
