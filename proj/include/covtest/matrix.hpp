#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "covtest/errors.hpp"

namespace covtest {

// Dense row-major matrix of doubles.  Rows of an observation matrix are the
// sample vectors.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(int r, int c, double fill = 0.0)
      : rows(r), cols(c), data(static_cast<std::size_t>(r) * static_cast<std::size_t>(c), fill) {}

  double& operator()(int i, int j) {
    return data[static_cast<std::size_t>(i) * cols + j];
  }
  double operator()(int i, int j) const {
    return data[static_cast<std::size_t>(i) * cols + j];
  }

  static Matrix identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }
};

inline Matrix transpose(const Matrix& a) {
  Matrix t(a.cols, a.rows);
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < a.cols; ++j) t(j, i) = a(i, j);
  return t;
}

inline Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols != b.rows) throw std::invalid_argument("matmul: dimension mismatch");
  Matrix c(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i) {
    for (int k = 0; k < a.cols; ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < b.cols; ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

inline Matrix add(const Matrix& a, const Matrix& b) {
  if (a.rows != b.rows || a.cols != b.cols)
    throw std::invalid_argument("add: dimension mismatch");
  Matrix c = a;
  for (std::size_t i = 0; i < c.data.size(); ++i) c.data[i] += b.data[i];
  return c;
}

inline Matrix sub(const Matrix& a, const Matrix& b) {
  if (a.rows != b.rows || a.cols != b.cols)
    throw std::invalid_argument("sub: dimension mismatch");
  Matrix c = a;
  for (std::size_t i = 0; i < c.data.size(); ++i) c.data[i] -= b.data[i];
  return c;
}

inline double max_abs(const Matrix& a) {
  double m = 0.0;
  for (double x : a.data) m = std::max(m, std::fabs(x));
  return m;
}

inline double frobenius_norm(const Matrix& a) {
  double s = 0.0;
  for (double x : a.data) s += x * x;
  return std::sqrt(s);
}

inline bool all_finite(const Matrix& a) {
  for (double x : a.data)
    if (!std::isfinite(x)) return false;
  return true;
}

inline double trace(const Matrix& a) {
  double t = 0.0;
  for (int i = 0; i < std::min(a.rows, a.cols); ++i) t += a(i, i);
  return t;
}

inline void require_symmetric(const Matrix& a, double rel_tol = 1e-12) {
  if (a.rows != a.cols) throw std::invalid_argument("matrix is not square");
  const double scale = std::max(max_abs(a), 1e-300);
  for (int i = 0; i < a.rows; ++i)
    for (int j = i + 1; j < a.cols; ++j)
      if (std::fabs(a(i, j) - a(j, i)) > rel_tol * scale)
        throw std::invalid_argument("matrix is not symmetric");
}

enum class CenteringMode { known_zero_mean, sample_mean };

// Scatter matrix A = sum_i (z_i - c)(z_i - c)^T together with the metadata
// needed downstream (sample size, centering, attainable rank).
struct ScatterMatrix {
  Matrix values;
  int n_obs = 0;
  CenteringMode centering = CenteringMode::known_zero_mean;
  int effective_rank_bound = 0;

  int dim() const { return values.rows; }
};

inline ScatterMatrix scatter(const Matrix& observations, CenteringMode centering) {
  const int n = observations.rows;
  const int p = observations.cols;
  if (n < 2) throw std::invalid_argument("scatter: need at least 2 observations");
  if (p < 1) throw std::invalid_argument("scatter: need at least 1 variable");
  if (!all_finite(observations)) throw std::invalid_argument("scatter: non-finite input");

  std::vector<double> center(p, 0.0);
  if (centering == CenteringMode::sample_mean) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < p; ++j) center[j] += observations(i, j);
    for (int j = 0; j < p; ++j) center[j] /= static_cast<double>(n);
  }

  ScatterMatrix out;
  out.values = Matrix(p, p);
  out.n_obs = n;
  out.centering = centering;
  out.effective_rank_bound =
      std::min(p, centering == CenteringMode::sample_mean ? n - 1 : n);

  std::vector<double> row(p);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) row[j] = observations(i, j) - center[j];
    for (int j = 0; j < p; ++j) {
      const double v = row[j];
      if (v == 0.0) continue;
      double* dst = &out.values(j, j);
      const double* src = &row[j];
      for (int k = j; k < p; ++k) *dst++ += v * *src++;
    }
  }
  for (int j = 0; j < p; ++j)
    for (int k = 0; k < j; ++k) out.values(j, k) = out.values(k, j);
  return out;
}

// Wrap an existing symmetric PSD matrix as a ScatterMatrix.  rank_bound
// defaults to full dimension (appropriate for matrices that are PD by
// construction rather than sums of few outer products).
inline ScatterMatrix wrap_scatter(Matrix values, int rank_bound = -1) {
  ScatterMatrix out;
  out.n_obs = values.rows;
  out.effective_rank_bound = rank_bound < 0 ? values.rows : rank_bound;
  out.values = std::move(values);
  return out;
}

// Lower-triangular Cholesky factor with strictly positive diagonal.
struct LowerTriangular {
  Matrix values;
  int dim() const { return values.rows; }
};

inline LowerTriangular cholesky_factor(const Matrix& m) {
  require_symmetric(m);
  const int n = m.rows;
  double max_diag = 0.0;
  for (int i = 0; i < n; ++i) max_diag = std::max(max_diag, std::fabs(m(i, i)));
  const double threshold = static_cast<double>(n) * 1e-14 * max_diag;

  Matrix l(n, n);
  for (int j = 0; j < n; ++j) {
    double d = m(j, j);
    for (int k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > threshold)) throw NotPositiveDefinite(j, d);
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (int i = j + 1; i < n; ++i) {
      double s = m(i, j);
      for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / ljj;
    }
  }
  return LowerTriangular{std::move(l)};
}

// b := L^{-1} b, column by column.
inline void solve_lower_inplace(const LowerTriangular& lt, Matrix& b) {
  const Matrix& l = lt.values;
  if (l.rows != b.rows) throw std::invalid_argument("solve_lower: dimension mismatch");
  const int n = l.rows;
  for (int j = 0; j < b.cols; ++j) {
    for (int i = 0; i < n; ++i) {
      double s = b(i, j);
      for (int k = 0; k < i; ++k) s -= l(i, k) * b(k, j);
      b(i, j) = s / l(i, i);
    }
  }
}

inline Matrix solve_lower(const LowerTriangular& lt, Matrix b) {
  solve_lower_inplace(lt, b);
  return b;
}

inline Matrix reconstruct(const LowerTriangular& lt) {
  const Matrix& l = lt.values;
  const int n = l.rows;
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) {
      double s = 0.0;
      for (int k = 0; k <= j; ++k) s += l(i, k) * l(j, k);
      m(i, j) = s;
      m(j, i) = s;
    }
  return m;
}

}  // namespace covtest
