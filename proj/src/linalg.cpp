#include "mrtime/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mrtime/error.hpp"

namespace mrtime::linalg {

namespace {

void require_finite(std::span<const double> values, const char* what) {
  for (double x : values) {
    if (!std::isfinite(x)) {
      throw Error(ErrorKind::NonFinite, std::string(what) + " contains a non-finite entry");
    }
  }
}

std::string dims(std::size_t r, std::size_t c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

}  // namespace

Vector::Vector(std::size_t len, double fill) : data_(len, fill) {
  require_finite(data_, "vector");
}

Vector::Vector(std::vector<double> data) : data_(std::move(data)) {
  require_finite(data_, "vector");
}

Vector::Vector(std::initializer_list<double> values) : data_(values) {
  require_finite(data_, "vector");
}

double Vector::norm2() const {
  // Scaled accumulation so large residuals do not overflow.
  double scale = norm_inf();
  if (scale == 0.0) return 0.0;
  double sum = 0.0;
  for (double x : data_) {
    double y = x / scale;
    sum += y * y;
  }
  return scale * std::sqrt(sum);
}

double Vector::norm_inf() const {
  double m = 0.0;
  for (double x : data_) m = std::max(m, std::abs(x));
  return m;
}

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {
  require_finite(std::span<const double>(&fill, 1), "matrix");
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw Error(ErrorKind::DimensionMismatch,
                "matrix " + dims(rows_, cols_) + " given " + std::to_string(data_.size()) +
                    " entries");
  }
  require_finite(data_, "matrix");
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) {
      throw Error(ErrorKind::DimensionMismatch, "ragged matrix initializer");
    }
    data_.insert(data_.end(), r.begin(), r.end());
  }
  require_finite(data_, "matrix");
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

double Matrix::norm_inf() const {
  double best = 0.0;
  for (std::size_t r = 0; r < rows_; ++r) {
    double s = 0.0;
    for (double x : row(r)) s += std::abs(x);
    best = std::max(best, s);
  }
  return best;
}

Matrix transpose(const Matrix& m) {
  Matrix out(m.cols(), m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) out(c, r) = m(r, c);
  return out;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw Error(ErrorKind::DimensionMismatch,
                "matmul " + dims(a.rows(), a.cols()) + " by " + dims(b.rows(), b.cols()));
  }
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  }
  return out;
}

Vector matvec(const Matrix& m, const Vector& v) {
  if (m.cols() != v.size()) {
    throw Error(ErrorKind::DimensionMismatch,
                "matvec " + dims(m.rows(), m.cols()) + " by length " + std::to_string(v.size()));
  }
  Vector out(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto row = m.row(i);
    out[i] = std::inner_product(row.begin(), row.end(), v.begin(), 0.0);
  }
  return out;
}

Vector solve_least_squares(const Matrix& p, const Vector& t) {
  const std::size_t m = p.rows();
  const std::size_t n = p.cols();
  if (m != t.size()) {
    throw Error(ErrorKind::DimensionMismatch,
                "system has " + std::to_string(m) + " rows but rhs length " +
                    std::to_string(t.size()));
  }
  if (m < n) {
    throw Error(ErrorKind::DimensionMismatch,
                "underdetermined system " + dims(m, n) + " (need rows >= cols)");
  }

  Matrix a = p;
  std::vector<double> b(t.begin(), t.end());
  std::vector<double> diag(n, 0.0);
  std::vector<double> v(m);

  for (std::size_t k = 0; k < n; ++k) {
    double scale = 0.0;
    for (std::size_t i = k; i < m; ++i) scale = std::max(scale, std::abs(a(i, k)));
    if (scale == 0.0) {
      diag[k] = 0.0;
      continue;
    }
    double sq = 0.0;
    for (std::size_t i = k; i < m; ++i) {
      double y = a(i, k) / scale;
      sq += y * y;
    }
    const double norm = scale * std::sqrt(sq);
    const double alpha = a(k, k) > 0.0 ? -norm : norm;

    double vnorm2 = 0.0;
    for (std::size_t i = k; i < m; ++i) {
      v[i] = a(i, k);
      if (i == k) v[i] -= alpha;
      vnorm2 += v[i] * v[i];
    }
    diag[k] = alpha;
    if (vnorm2 == 0.0) continue;

    for (std::size_t j = k; j < n; ++j) {
      double s = 0.0;
      for (std::size_t i = k; i < m; ++i) s += v[i] * a(i, j);
      const double f = 2.0 * s / vnorm2;
      for (std::size_t i = k; i < m; ++i) a(i, j) -= f * v[i];
    }
    double s = 0.0;
    for (std::size_t i = k; i < m; ++i) s += v[i] * b[i];
    const double f = 2.0 * s / vnorm2;
    for (std::size_t i = k; i < m; ++i) b[i] -= f * v[i];
    a(k, k) = alpha;
  }

  double max_diag = 0.0;
  for (double d : diag) max_diag = std::max(max_diag, std::abs(d));
  for (std::size_t k = 0; k < n; ++k) {
    if (max_diag == 0.0 || std::abs(diag[k]) < kRankTolerance * max_diag) {
      throw RankDeficientError(k, "rank deficient: column " + std::to_string(k) +
                                      " is linearly dependent on earlier columns");
    }
  }

  std::vector<double> x(n, 0.0);
  for (std::size_t kk = n; kk-- > 0;) {
    double s = b[kk];
    for (std::size_t j = kk + 1; j < n; ++j) s -= a(kk, j) * x[j];
    x[kk] = s / a(kk, kk);
  }
  return Vector(std::move(x));
}

namespace {

Svd svd_tall(const Matrix& m) {
  const std::size_t rows = m.rows();
  const std::size_t n = m.cols();
  Matrix u = m;
  Matrix v = Matrix::identity(n);

  constexpr double eps = 1e-15;
  constexpr int max_sweeps = 80;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (std::size_t r = 0; r < rows; ++r) {
          alpha += u(r, i) * u(r, i);
          beta += u(r, j) * u(r, j);
          gamma += u(r, i) * u(r, j);
        }
        if (gamma == 0.0 || std::abs(gamma) <= eps * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::hypot(1.0, zeta));
        const double c = 1.0 / std::hypot(1.0, t);
        const double s = c * t;
        for (std::size_t r = 0; r < rows; ++r) {
          const double ui = u(r, i), uj = u(r, j);
          u(r, i) = c * ui - s * uj;
          u(r, j) = s * ui + c * uj;
        }
        for (std::size_t r = 0; r < n; ++r) {
          const double vi = v(r, i), vj = v(r, j);
          v(r, i) = c * vi - s * vj;
          v(r, j) = s * vi + c * vj;
        }
      }
    }
    if (!rotated) break;
  }

  std::vector<double> sigma(n);
  for (std::size_t j = 0; j < n; ++j) {
    double sq = 0.0;
    for (std::size_t r = 0; r < rows; ++r) sq += u(r, j) * u(r, j);
    sigma[j] = std::sqrt(sq);
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return sigma[a] > sigma[b]; });

  Svd out{Matrix(rows, n), Vector(n), Matrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t j = order[k];
    out.sigma[k] = sigma[j];
    for (std::size_t r = 0; r < rows; ++r)
      out.u(r, k) = sigma[j] > 0.0 ? u(r, j) / sigma[j] : 0.0;
    for (std::size_t r = 0; r < n; ++r) out.v(r, k) = v(r, j);
  }
  return out;
}

}  // namespace

Svd svd(const Matrix& m) {
  if (m.rows() >= m.cols()) return svd_tall(m);
  Svd t = svd_tall(transpose(m));
  return Svd{std::move(t.v), std::move(t.sigma), std::move(t.u)};
}

Vector pseudo_inverse_solve(const Matrix& p, const Vector& t, double tol) {
  if (p.rows() != t.size()) {
    throw Error(ErrorKind::DimensionMismatch,
                "system has " + std::to_string(p.rows()) + " rows but rhs length " +
                    std::to_string(t.size()));
  }
  const Svd s = svd(p);
  Vector x(p.cols());
  const std::size_t k = s.sigma.size();
  if (k == 0 || s.sigma[0] == 0.0) return x;
  const double cutoff = tol * s.sigma[0];
  for (std::size_t i = 0; i < k; ++i) {
    if (s.sigma[i] <= cutoff) continue;
    double proj = 0.0;
    for (std::size_t r = 0; r < p.rows(); ++r) proj += s.u(r, i) * t[r];
    const double w = proj / s.sigma[i];
    for (std::size_t c = 0; c < p.cols(); ++c) x[c] += w * s.v(c, i);
  }
  return x;
}

}  // namespace mrtime::linalg
