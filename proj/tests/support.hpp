#pragma once

// Test-side oracles, deliberately independent of the library's solver paths:
//  - eigenvalues by Sylvester inertia counts + bisection (LDL^T pivots only)
//  - determinant by LU with partial pivoting
//  - adaptive Simpson quadrature
//  - normal CDF by integrating the density

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "covtest/matrix.hpp"
#include "covtest/rng.hpp"

namespace testsupport {

// Number of eigenvalues of symmetric A strictly below x, from the signs of
// the LDL^T pivots of A - xI (Sylvester's law of inertia).
inline int count_eigenvalues_below(const covtest::Matrix& a, double x) {
  const int n = a.rows;
  covtest::Matrix m = a;
  for (int i = 0; i < n; ++i) m(i, i) -= x;
  int negatives = 0;
  for (int k = 0; k < n; ++k) {
    double piv = m(k, k);
    if (std::fabs(piv) < 1e-300) piv = piv >= 0.0 ? 1e-300 : -1e-300;
    if (piv < 0.0) ++negatives;
    for (int i = k + 1; i < n; ++i) {
      const double f = m(i, k) / piv;
      for (int j = k + 1; j < n; ++j) m(i, j) -= f * m(k, j);
    }
  }
  return negatives;
}

// All eigenvalues of a symmetric matrix by inertia bisection, ascending.
inline std::vector<double> bisection_eigenvalues(const covtest::Matrix& a,
                                                 double tol = 1e-12) {
  const int n = a.rows;
  double radius = 0.0;
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int j = 0; j < n; ++j) row += std::fabs(a(i, j));
    radius = std::max(radius, row);
  }
  radius += 1.0;
  std::vector<double> eig(n);
  for (int k = 0; k < n; ++k) {
    double lo = -radius, hi = radius;
    for (int iter = 0; iter < 200 && hi - lo > tol * radius; ++iter) {
      const double mid = 0.5 * (lo + hi);
      if (count_eigenvalues_below(a, mid) >= k + 1)
        hi = mid;
      else
        lo = mid;
    }
    eig[k] = 0.5 * (lo + hi);
  }
  return eig;
}

// det(A) via LU with partial pivoting.
inline double determinant(covtest::Matrix m) {
  const int n = m.rows;
  double det = 1.0;
  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int i = k + 1; i < n; ++i)
      if (std::fabs(m(i, k)) > std::fabs(m(piv, k))) piv = i;
    if (piv != k) {
      for (int j = 0; j < n; ++j) std::swap(m(k, j), m(piv, j));
      det = -det;
    }
    const double d = m(k, k);
    if (d == 0.0) return 0.0;
    det *= d;
    for (int i = k + 1; i < n; ++i) {
      const double f = m(i, k) / d;
      for (int j = k; j < n; ++j) m(i, j) -= f * m(k, j);
    }
  }
  return det;
}

// Gauss-Jordan inverse; oracle use only.
inline covtest::Matrix inverse(covtest::Matrix m) {
  const int n = m.rows;
  covtest::Matrix inv = covtest::Matrix::identity(n);
  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int i = k + 1; i < n; ++i)
      if (std::fabs(m(i, k)) > std::fabs(m(piv, k))) piv = i;
    for (int j = 0; j < n; ++j) {
      std::swap(m(k, j), m(piv, j));
      std::swap(inv(k, j), inv(piv, j));
    }
    const double d = m(k, k);
    if (d == 0.0) throw std::runtime_error("inverse: singular matrix");
    for (int j = 0; j < n; ++j) {
      m(k, j) /= d;
      inv(k, j) /= d;
    }
    for (int i = 0; i < n; ++i) {
      if (i == k) continue;
      const double f = m(i, k);
      if (f == 0.0) continue;
      for (int j = 0; j < n; ++j) {
        m(i, j) -= f * m(k, j);
        inv(i, j) -= f * inv(k, j);
      }
    }
  }
  return inv;
}

inline double adaptive_simpson_rec(const std::function<double(double)>& f, double a,
                                   double b, double fa, double fm, double fb,
                                   double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::fabs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a,
                               double b, double tol = 1e-12, int depth = 40) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, depth);
}

// Phi(x) by quadrature of the density from 0; independent of erfc.
inline double normal_cdf_quadrature(double x) {
  constexpr double pi = 3.141592653589793238462643383279502884;
  auto density = [](double t) { return std::exp(-0.5 * t * t) / std::sqrt(2.0 * pi); };
  if (x >= 0.0) return 0.5 + adaptive_simpson(density, 0.0, x, 1e-13);
  return 0.5 - adaptive_simpson(density, x, 0.0, 1e-13);
}

inline covtest::Matrix random_symmetric(int n, covtest::RandomStream& stream) {
  covtest::Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const double v = 2.0 * stream.next_uniform01() - 1.0;
      m(i, j) = v;
      m(j, i) = v;
    }
  return m;
}

inline covtest::Matrix random_gaussian(int rows, int cols, covtest::RandomStream& stream) {
  covtest::Matrix m(rows, cols);
  for (double& v : m.data) v = stream.next_normal();
  return m;
}

// Well-conditioned random invertible matrix: U(-1,1) entries plus 2I.
inline covtest::Matrix random_invertible(int n, covtest::RandomStream& stream) {
  covtest::Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      m(i, j) = 2.0 * stream.next_uniform01() - 1.0 + (i == j ? 2.0 : 0.0);
  return m;
}

}  // namespace testsupport
