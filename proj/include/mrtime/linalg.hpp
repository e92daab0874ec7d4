#pragma once

// Dense real-matrix kernel used by the regression code. Sizes here are tiny
// (tens of rows, a handful of columns), so everything is row-major
// std::vector<double> with no expression templates.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace mrtime::linalg {

class Vector {
 public:
  Vector() = default;
  explicit Vector(std::size_t len, double fill = 0.0);
  explicit Vector(std::vector<double> data);
  Vector(std::initializer_list<double> values);

  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double operator[](std::size_t i) const { return data_[i]; }
  double& operator[](std::size_t i) { return data_[i]; }

  std::span<const double> values() const noexcept { return data_; }
  const std::vector<double>& data() const noexcept { return data_; }

  auto begin() const noexcept { return data_.begin(); }
  auto end() const noexcept { return data_.end(); }

  double norm2() const;
  double norm_inf() const;

  friend bool operator==(const Vector&, const Vector&) = default;

 private:
  std::vector<double> data_;
};

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  /// Takes ownership of row-major data; throws DimensionMismatch if
  /// data.size() != rows * cols, NonFinite on NaN/inf entries.
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
  /// Nested-list construction, one inner list per row.
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }
  double& operator()(std::size_t r, std::size_t c) {
    return data_[r * cols_ + c];
  }

  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<const double> values() const noexcept { return data_; }

  double norm_inf() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix transpose(const Matrix& m);

/// Throws DimensionMismatch when a.cols() != b.rows().
Matrix matmul(const Matrix& a, const Matrix& b);

/// Matrix-vector product; throws DimensionMismatch when m.cols() != v.size().
Vector matvec(const Matrix& m, const Vector& v);

/// Relative threshold on |R(i,i)| / max_j |R(j,j)| below which a column is
/// declared dependent.
inline constexpr double kRankTolerance = 1e-10;

/// Least-squares solution of p * a ~= t by Householder QR on p.
///
/// Requires p.rows() >= p.cols() and p.rows() == t.size(). Throws
/// RankDeficientError naming the first column whose R diagonal is below
/// kRankTolerance times the largest diagonal magnitude.
Vector solve_least_squares(const Matrix& p, const Vector& t);

struct Svd {
  Matrix u;             // rows x k, orthonormal columns for nonzero sigma
  Vector sigma;         // k = min(rows, cols), descending
  Matrix v;             // cols x k
};

/// Thin SVD via one-sided Jacobi rotations.
Svd svd(const Matrix& m);

/// Minimum-norm least-squares solution. Singular values below
/// tol * sigma_max are treated as zero. Never throws on rank deficiency.
Vector pseudo_inverse_solve(const Matrix& p, const Vector& t, double tol = 1e-12);

}  // namespace mrtime::linalg
