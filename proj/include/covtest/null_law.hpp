#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

namespace covtest {

// Dimension ratios of the two-sample problem together with the support of
// the limiting spectral distribution of B = A1 (A1 + A2)^{-1}.
struct SpectralParams {
  int n1 = 0, n2 = 0, p = 0;
  double y1 = 0.0;       // p / n1
  double y2 = 0.0;       // p / n2
  double alpha_n = 0.0;  // n2 / n1
  double h = 0.0;        // sqrt(y1 + y2 - y1 y2)
  double x_l = 0.0;      // lower support edge
  double x_r = 0.0;      // upper support edge
  bool near_one = false; // |y1 - 1| or |y2 - 1| below 0.02
};

// Excess fourth moments (kurtosis - 3) of the underlying IID entries:
// 0 for the standard normal, -1.2 for uniform(-sqrt(3), sqrt(3)).
struct KurtosisSpec {
  double delta1 = 0.0;
  double delta2 = 0.0;
};

// Asymptotic null quantities: trace centerings, mean shift and variance of
// the standardized truncated trace statistics.
struct NullLaw {
  double ell1 = 0.0;
  double ell2 = 0.0;
  double mu = 0.0;
  double sigma2 = 0.0;
};

inline SpectralParams spectral_params(int n1, int n2, int p) {
  if (n1 < 2 || n2 < 2) throw std::invalid_argument("spectral_params: n1, n2 must be >= 2");
  if (p < 2) throw std::invalid_argument("spectral_params: p must be >= 2");
  if (p >= n1 + n2)
    throw std::invalid_argument("spectral_params: requires p < n1 + n2");

  SpectralParams sp;
  sp.n1 = n1;
  sp.n2 = n2;
  sp.p = p;
  sp.y1 = static_cast<double>(p) / n1;
  sp.y2 = static_cast<double>(p) / n2;
  sp.alpha_n = static_cast<double>(n2) / n1;
  const double h2 = sp.y1 + sp.y2 - sp.y1 * sp.y2;
  sp.h = std::sqrt(h2);
  const double denom = (sp.y1 + sp.y2) * (sp.y1 + sp.y2);
  const double dm = sp.h - sp.y1;
  const double dp = sp.h + sp.y1;
  sp.x_l = sp.y2 * dm * dm / denom;
  sp.x_r = sp.y2 * dp * dp / denom;
  sp.near_one = std::fabs(sp.y1 - 1.0) < 0.02 || std::fabs(sp.y2 - 1.0) < 0.02;
  return sp;
}

// Density of the absolutely continuous part of the limiting spectral
// distribution of B on (x_l, x_r); zero outside.  Atoms at 0 and 1 appear in
// the regimes y1 > 1 and y2 > 1 and are handled by callers through counts.
inline double lsd_density(double x, const SpectralParams& sp) {
  if (x <= sp.x_l || x >= sp.x_r) return 0.0;
  constexpr double pi = 3.141592653589793238462643383279502884;
  const double s = std::sqrt((sp.x_r - x) * (x - sp.x_l));
  return (sp.alpha_n + 1.0) * s / (2.0 * pi * sp.y1 * x * (1.0 - x));
}

// Trace centerings ell_1 and ell_2; the branch switches with the sign of
// y2 - 1 (resp. y1 - 1) and both branches agree at y = 1.
inline std::pair<double, double> centering_terms(const SpectralParams& sp) {
  const double h2 = sp.h * sp.h;
  const double ys = sp.y1 + sp.y2;
  const double ell1 = (sp.y2 > 1.0 ? h2 : sp.y2 * sp.y2) / (sp.y2 * ys);
  const double ell2 = (sp.y1 > 1.0 ? h2 : sp.y1 * sp.y1) / (sp.y1 * ys);
  return {ell1, ell2};
}

inline NullLaw mean_variance(const SpectralParams& sp, const KurtosisSpec& ks) {
  if (ks.delta1 < -2.0 || ks.delta2 < -2.0)
    throw std::invalid_argument("mean_variance: excess kurtosis must be >= -2");

  const double h2 = sp.h * sp.h;
  const double ys = sp.y1 + sp.y2;
  const double ys2 = ys * ys;
  const double y1y2sq = sp.y1 * sp.y1 * sp.y2 * sp.y2;
  const double base = h2 * y1y2sq / (ys2 * ys2);

  NullLaw law;
  const auto ells = centering_terms(sp);
  law.ell1 = ells.first;
  law.ell2 = ells.second;
  law.mu = (ks.delta2 - ks.delta1) * base;
  law.sigma2 = 2.0 * base +
               (ks.delta1 * sp.y1 + ks.delta2 * sp.y2) * h2 * base / ys2;
  if (!(law.sigma2 > 0.0))
    throw std::domain_error("mean_variance: nonpositive variance");
  return law;
}

}  // namespace covtest
