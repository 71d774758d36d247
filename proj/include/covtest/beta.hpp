#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "covtest/eigen.hpp"
#include "covtest/matrix.hpp"

namespace covtest {

// Eigenvalues of B = A1 (A1 + A2)^{-1}, clamped to [0,1], with the counts of
// eigenvalues classified as the atoms at 0 and 1.  Classified entries are
// snapped to exactly 0.0 / 1.0 so downstream truncated sums and log statistics
// see clean atoms.
struct BetaSpectrum {
  std::vector<double> eigenvalues;  // ascending
  int count_zero = 0;
  int count_one = 0;
  double clamp_tolerance = 1e-8;
  std::vector<std::string> warnings;

  int dim() const { return static_cast<int>(eigenvalues.size()); }
};

// C = L^{-1} A1 L^{-T} where L is the Cholesky factor of A1 + A2; the
// symmetric reduction of the generalized problem A1 v = lambda (A1 + A2) v.
inline Matrix reduce_to_symmetric(const ScatterMatrix& a1, const ScatterMatrix& a2) {
  if (a1.dim() != a2.dim())
    throw std::invalid_argument("beta_spectrum: dimension mismatch");
  const LowerTriangular l = cholesky_factor(add(a1.values, a2.values));
  Matrix x = solve_lower(l, a1.values);       // X = L^{-1} A1
  Matrix c = solve_lower(l, transpose(x));    // C^T = L^{-1} X^T
  // X was L^{-1} applied to a symmetric matrix, so C is symmetric up to
  // roundoff; average away the asymmetry.
  for (int i = 0; i < c.rows; ++i)
    for (int j = i + 1; j < c.cols; ++j) {
      const double v = 0.5 * (c(i, j) + c(j, i));
      c(i, j) = v;
      c(j, i) = v;
    }
  return c;
}

inline BetaSpectrum beta_spectrum(const ScatterMatrix& a1, const ScatterMatrix& a2,
                                  double eps = 1e-8) {
  const int p = a1.dim();
  Matrix c = reduce_to_symmetric(a1, a2);
  BetaSpectrum out;
  out.clamp_tolerance = eps;
  out.eigenvalues = symmetric_eigenvalues(c);

  for (double& lambda : out.eigenvalues) {
    lambda = std::clamp(lambda, 0.0, 1.0);
    if (lambda <= eps) {
      lambda = 0.0;
      ++out.count_zero;
    } else if (lambda >= 1.0 - eps) {
      lambda = 1.0;
      ++out.count_one;
    }
  }

  const int expected_zero = std::max(p - std::min(p, a1.effective_rank_bound), 0);
  const int expected_one = std::max(p - std::min(p, a2.effective_rank_bound), 0);
  if (out.count_zero != expected_zero) {
    out.warnings.push_back("count_zero " + std::to_string(out.count_zero) +
                           " differs from rank-implied " + std::to_string(expected_zero));
  }
  if (out.count_one != expected_one) {
    out.warnings.push_back("count_one " + std::to_string(out.count_one) +
                           " differs from rank-implied " + std::to_string(expected_one));
  }
  return out;
}

}  // namespace covtest
