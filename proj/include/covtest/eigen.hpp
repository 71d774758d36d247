#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "covtest/errors.hpp"
#include "covtest/matrix.hpp"

namespace covtest {

enum class EigenMethod { ql, jacobi };

namespace detail {

// Householder reduction of a symmetric matrix to tridiagonal form,
// eigenvalues only (no transform accumulation).  On return d holds the
// diagonal and e[i] the coupling between i and i+1 (e[n-1] = 0).
inline void tridiagonalize(Matrix& z, std::vector<double>& d, std::vector<double>& e) {
  const int n = z.rows;
  std::vector<double> sub(n, 0.0);
  for (int i = n - 1; i >= 1; --i) {
    const int l = i - 1;
    double h = 0.0;
    if (l > 0) {
      double scale = 0.0;
      for (int k = 0; k <= l; ++k) scale += std::fabs(z(i, k));
      if (scale == 0.0) {
        sub[i] = z(i, l);
      } else {
        for (int k = 0; k <= l; ++k) {
          z(i, k) /= scale;
          h += z(i, k) * z(i, k);
        }
        double f = z(i, l);
        double g = (f >= 0.0) ? -std::sqrt(h) : std::sqrt(h);
        sub[i] = scale * g;
        h -= f * g;
        z(i, l) = f - g;
        f = 0.0;
        for (int j = 0; j <= l; ++j) {
          g = 0.0;
          for (int k = 0; k <= j; ++k) g += z(j, k) * z(i, k);
          for (int k = j + 1; k <= l; ++k) g += z(k, j) * z(i, k);
          sub[j] = g / h;
          f += sub[j] * z(i, j);
        }
        const double hh = f / (h + h);
        for (int j = 0; j <= l; ++j) {
          f = z(i, j);
          g = sub[j] - hh * f;
          sub[j] = g;
          for (int k = 0; k <= j; ++k) z(j, k) -= f * sub[k] + g * z(i, k);
        }
      }
    } else {
      sub[i] = z(i, l);
    }
  }
  d.resize(n);
  e.assign(n, 0.0);
  for (int i = 0; i < n; ++i) d[i] = z(i, i);
  for (int i = 0; i + 1 < n; ++i) e[i] = sub[i + 1];
}

// Implicit-shift QL iteration on a symmetric tridiagonal matrix.
// d: diagonal, e: subdiagonal with e[n-1] = 0.  Eigenvalues land in d.
inline void tql_implicit_shift(std::vector<double>& d, std::vector<double>& e,
                               int max_sweeps_per_eigenvalue = 30) {
  const int n = static_cast<int>(d.size());
  const double eps = std::numeric_limits<double>::epsilon();
  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m;
    do {
      for (m = l; m < n - 1; ++m) {
        const double dd = std::fabs(d[m]) + std::fabs(d[m + 1]);
        if (std::fabs(e[m]) <= eps * dd) break;
      }
      if (m != l) {
        if (iter++ == max_sweeps_per_eigenvalue)
          throw NonConvergence("tridiagonal QL: sweep budget exhausted");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        int i;
        for (i = m - 1; i >= l; --i) {
          double f = s * e[i];
          const double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
        }
        if (r == 0.0 && i >= l) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
}

// Cyclic Jacobi sweeps; robust fallback / cross-check for the QL path.
inline std::vector<double> jacobi_eigenvalues(Matrix a, int max_sweeps = 100) {
  const int n = a.rows;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
    if (off <= 1e-300) break;
    double diag = 0.0;
    for (int i = 0; i < n; ++i) diag = std::max(diag, std::fabs(a(i, i)));
    if (std::sqrt(off) <= 1e-15 * std::max(diag, 1.0) * n) break;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);
        const double app = a(p, p), aqq = a(q, q);
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (int k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = akp - s * (akq + tau * akp);
          a(p, k) = a(k, p);
          a(k, q) = akq + s * (akp - tau * akq);
          a(q, k) = a(k, q);
        }
      }
    }
    if (sweep == max_sweeps - 1)
      throw NonConvergence("jacobi: sweep budget exhausted");
  }
  std::vector<double> d(n);
  for (int i = 0; i < n; ++i) d[i] = a(i, i);
  std::sort(d.begin(), d.end());
  return d;
}

}  // namespace detail

// All eigenvalues of a symmetric matrix, ascending.  Default path is
// Householder tridiagonalization followed by implicit-shift QL.
inline std::vector<double> symmetric_eigenvalues(const Matrix& a,
                                                 EigenMethod method = EigenMethod::ql) {
  require_symmetric(a);
  const int n = a.rows;
  if (n == 0) return {};
  if (n == 1) return {a(0, 0)};

  Matrix work = a;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double v = 0.5 * (work(i, j) + work(j, i));
      work(i, j) = v;
      work(j, i) = v;
    }

  if (method == EigenMethod::jacobi) return detail::jacobi_eigenvalues(std::move(work));

  std::vector<double> d, e;
  detail::tridiagonalize(work, d, e);
  detail::tql_implicit_shift(d, e);
  std::sort(d.begin(), d.end());
  return d;
}

}  // namespace covtest
