#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "covtest/errors.hpp"
#include "covtest/mc.hpp"
#include "covtest/null_law.hpp"

namespace covtest {

namespace detail {

inline void fft_radix2(std::vector<std::complex<double>>& a, bool inverse) {
  const std::size_t n = a.size();
  if (n == 0 || (n & (n - 1)) != 0)
    throw std::invalid_argument("fft_radix2: length must be a power of two");
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = 2.0 * std::numbers::pi / static_cast<double>(len) *
                       (inverse ? 1.0 : -1.0);
    const std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = a[i + k];
        const std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
  if (inverse) {
    const double inv = 1.0 / static_cast<double>(n);
    for (auto& x : a) x *= inv;
  }
}

// c[m] = sum_j u[j] * v[(j+m) mod n].
inline std::vector<std::complex<double>> circular_correlation(
    std::vector<std::complex<double>> u, std::vector<std::complex<double>> v) {
  const std::size_t n = u.size();
  fft_radix2(u, false);
  fft_radix2(v, false);
  std::vector<std::complex<double>> d(n);
  for (std::size_t k = 0; k < n; ++k) d[k] = u[(n - k) % n] * v[k];
  fft_radix2(d, true);
  return d;
}

inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace detail

enum class LsdMoment { one, x, one_minus_x };

// Integral of f against the continuous part of the LSD, by Gauss-Chebyshev
// (second kind) quadrature after the substitution x = m + rho*sin(theta)
// which absorbs the square-root edge factors.  Doubles the node count until
// the change is below 1e-10 in absolute value.
inline double quad_lsd_moment(const SpectralParams& sp, LsdMoment f) {
  constexpr double pi = std::numbers::pi;
  const double mid = 0.5 * (sp.x_l + sp.x_r);
  const double rho = 0.5 * (sp.x_r - sp.x_l);
  const double front = (sp.alpha_n + 1.0) / (2.0 * pi * sp.y1);

  auto phi = [&](double x) {
    double fx = 1.0;
    if (f == LsdMoment::x) fx = x;
    else if (f == LsdMoment::one_minus_x) fx = 1.0 - x;
    return fx * front / (x * (1.0 - x));
  };

  double prev = 0.0;
  for (int n = 64; n <= (1 << 20); n *= 2) {
    double s = 0.0;
    const double step = pi / (n + 1);
    for (int k = 1; k <= n; ++k) {
      const double t = k * step;
      const double sn = std::sin(t);
      s += sn * sn * phi(mid + rho * std::cos(t));
    }
    const double val = rho * rho * step * s;
    if (n > 64 && std::fabs(val - prev) < 1e-10) return val;
    prev = val;
  }
  throw NonConvergence("quad_lsd_moment: no convergence below 2^20 nodes");
}

// Contour evaluation setup for the unit-circle integrals behind the mean and
// variance of the trace statistic.  The limit r -> 1 is reached by evaluating
// on a ladder of radii r_k = 1 + eps0 / 2^k and Richardson-extrapolating.
struct ContourConfig {
  double eps0 = 1.0 / 64.0;  // r = 1 + eps0 for the first ladder rung
  int nodes = 1024;          // minimum trapezoid nodes (power of two)
  int extrapolation = 3;     // ladder length
};

namespace detail {

using cd = std::complex<double>;

// z/(alpha+z) pulled back to the unit circle by the substitution
// z = (1+hr*xi)(1+h/(r*xi))/(1-y2)^2; shared by every contour integrand.
struct ContourMap {
  double h, y2, r;
  cd operator()(cd xi) const {
    const cd num = (xi + 1.0 / (h * r)) * (xi + h / r);
    const cd den = (xi + y2 / (h * r)) * (xi + h / (y2 * r));
    return num / den;
  }
};

// (1/(2 pi i)) * contour integral of g over |xi| = 1 by the trapezoid rule.
template <typename G>
cd unit_circle_integral(int n, G&& g) {
  cd acc(0.0, 0.0);
  for (int j = 0; j < n; ++j) {
    const double t = 2.0 * std::numbers::pi * j / n;
    const cd xi(std::cos(t), std::sin(t));
    acc += g(xi) * xi;
  }
  return acc / static_cast<double>(n);
}

// Neville extrapolation of (eps_k, v_k) to eps = 0.
inline double extrapolate_to_zero(std::vector<double> eps, std::vector<double> v) {
  const std::size_t m = v.size();
  for (std::size_t level = 1; level < m; ++level)
    for (std::size_t i = 0; i + level < m; ++i)
      v[i] = (eps[i + level] * v[i] - eps[i] * v[i + level]) /
             (eps[i + level] - eps[i]);
  return v[0];
}

inline void check_pole_distance(double modulus) {
  if (std::fabs(modulus - 1.0) < 1e-6)
    throw std::invalid_argument("contour integral: pole within 1e-6 of the unit circle");
}

inline void validate_config(const ContourConfig& cc) {
  // radii stay in (1, 1.5]: r = 1 + eps0 and the variance pairing uses 1 + 2*eps0
  if (!(cc.eps0 > 0.0 && cc.eps0 <= 0.25))
    throw std::invalid_argument("ContourConfig: eps0 must lie in (0, 0.25]");
  if (cc.extrapolation < 1 || cc.extrapolation > 8)
    throw std::invalid_argument("ContourConfig: extrapolation must lie in [1, 8]");
}

inline int contour_nodes(const ContourConfig& cc, double eps) {
  const std::size_t needed = static_cast<std::size_t>(std::ceil(48.0 / eps));
  const std::size_t floor_nodes =
      std::max<std::size_t>(static_cast<std::size_t>(cc.nodes), 512);
  return static_cast<int>(detail::next_pow2(std::max(floor_nodes, needed)));
}

inline void validate_contour(const SpectralParams& sp, double r) {
  check_pole_distance(1.0 / r);
  check_pole_distance(sp.h / (sp.y2 * r));
  check_pole_distance(sp.y2 / (sp.h * r));
}

// Mean value at one radius: the base term plus the two kurtosis terms of the
// linear-spectral-statistic mean, specialized to f(x) = x.  The kurtosis
// pieces use the substitution-exact differentials.
inline double mean_at_radius(const SpectralParams& sp, const KurtosisSpec& ks,
                             double r, int n) {
  const double h = sp.h, y2 = sp.y2, y1 = sp.y1;
  const bool upper = y2 > 1.0;
  validate_contour(sp, r);
  const double q = upper ? h / (y2 * r) : y2 / (h * r);  // interior pole
  const ContourMap zmap{h, y2, r};

  const cd term1 = unit_circle_integral(n, [&](cd xi) {
    const cd res = 1.0 / (xi - 1.0 / r) + 1.0 / (xi + 1.0 / r) - 2.0 / (xi + q);
    return zmap(xi) * res;
  });

  cd term2;
  if (upper) {
    const double pre = -y1 * ks.delta1 * (1.0 - y2) * (1.0 - y2) * h / (y2 * y2 * y2 * r);
    term2 = pre * unit_circle_integral(n, [&](cd xi) {
      const cd d = xi + q;
      return zmap(xi) * xi / (d * d * d);
    });
  } else {
    const double pre = y1 * ks.delta1 * (1.0 - y2) * (1.0 - y2) / (h * h * r * r);
    term2 = pre * unit_circle_integral(n, [&](cd xi) {
      const cd d = xi + q;
      return zmap(xi) / (d * d * d);
    });
  }

  const double s = upper ? h * h / (y2 * r * r) : y2 / (h * h * r * r);
  const double pre3 = upper ? (y2 - 1.0) / y2 : (1.0 - y2);
  const cd term3 = unit_circle_integral(n, [&](cd xi) {
    const cd d = xi + q;
    const cd quad = xi * xi - s;
    const cd factor = pre3 * quad / (d * d);
    return zmap(xi) * factor * (2.0 * xi / quad - 2.0 / d);
  });

  const cd total = 0.5 * term1 + term2 + 0.5 * ks.delta2 * term3;
  return total.real();
}

// First variance term at one radius pair: the double unit-circle integral
// with kernel r1 r2 / (r1 xi1 - r2 xi2)^2, reduced to a circular correlation.
inline double variance_main_at_radii(const SpectralParams& sp, double r1,
                                     double r2, int n) {
  validate_contour(sp, r1);
  validate_contour(sp, r2);
  const ContourMap f1{sp.h, sp.y2, r1};
  const ContourMap f2{sp.h, sp.y2, r2};
  std::vector<cd> u(n), v(n);
  for (int j = 0; j < n; ++j) {
    const double t = 2.0 * std::numbers::pi * j / n;
    const cd xi(std::cos(t), std::sin(t));
    u[j] = f1(xi);
    v[j] = f2(xi);
  }
  const std::vector<cd> corr = circular_correlation(std::move(u), std::move(v));
  cd acc(0.0, 0.0);
  for (int m = 0; m < n; ++m) {
    const double t = 2.0 * std::numbers::pi * m / n;
    const cd eta(std::cos(t), std::sin(t));
    const cd d = r1 - r2 * eta;
    acc += corr[m] * (r1 * r2 * eta) / (d * d);
  }
  return (2.0 / (static_cast<double>(n) * n)) * acc.real();
}

// Single integral feeding the kurtosis variance term; tends to
// -h^2 y1 y2 / (y1 + y2)^3.
inline double variance_kurtosis_single(const SpectralParams& sp, double r, int n) {
  const double h = sp.h, y2 = sp.y2;
  const ContourMap zmap{h, y2, r};
  const bool upper = y2 > 1.0;
  const cd j = unit_circle_integral(n, [&](cd xi) {
    cd w;
    if (upper) {
      const cd d = y2 * r * xi + h;
      w = (1.0 - y2) * r * h / (d * d);
    } else {
      const cd d = h * r * xi + y2;
      w = (y2 - 1.0) * r * h / (d * d);
    }
    return zmap(xi) * w;
  });
  return j.real();
}

}  // namespace detail

// Numeric mean of the trace linear spectral statistic (the mu of the null
// law) by contour integration and extrapolation toward r = 1.
inline double contour_mean(const SpectralParams& sp, const KurtosisSpec& ks,
                           const ContourConfig& cc = {}) {
  if (sp.y2 == 1.0) throw std::invalid_argument("contour_mean: requires y2 != 1");
  detail::validate_config(cc);
  std::vector<double> eps(cc.extrapolation), vals(cc.extrapolation);
  for (int k = 0; k < cc.extrapolation; ++k) {
    eps[k] = cc.eps0 / static_cast<double>(1 << k);
    const int n = detail::contour_nodes(cc, eps[k]);
    vals[k] = detail::mean_at_radius(sp, ks, 1.0 + eps[k], n);
  }
  return detail::extrapolate_to_zero(std::move(eps), std::move(vals));
}

// Numeric variance of the trace linear spectral statistic (the sigma^2 of
// the null law).  The main term is a double contour integral evaluated with
// paired radii (1 + eps, 1 + 2 eps); the kurtosis term is a product of two
// single integrals.
inline double contour_variance(const SpectralParams& sp, const KurtosisSpec& ks,
                               const ContourConfig& cc = {1.0 / 32.0, 1024, 3}) {
  if (sp.y2 == 1.0) throw std::invalid_argument("contour_variance: requires y2 != 1");
  detail::validate_config(cc);
  const double kurt_weight = sp.y1 * ks.delta1 + sp.y2 * ks.delta2;
  std::vector<double> eps(cc.extrapolation), vals(cc.extrapolation);
  for (int k = 0; k < cc.extrapolation; ++k) {
    eps[k] = cc.eps0 / static_cast<double>(1 << k);
    const double r1 = 1.0 + eps[k];
    const double r2 = 1.0 + 2.0 * eps[k];
    const int n = detail::contour_nodes(cc, eps[k]);
    const double main = detail::variance_main_at_radii(sp, r1, r2, n);
    const double j1 = detail::variance_kurtosis_single(sp, r1, n);
    const double j2 = detail::variance_kurtosis_single(sp, r2, n);
    vals[k] = main + kurt_weight * j1 * j2;
  }
  return detail::extrapolate_to_zero(std::move(eps), std::move(vals));
}

// One closed-form-versus-numeric comparison.
struct OracleReport {
  std::string target;
  int n1 = 0, n2 = 0, p = 0;
  double delta1 = 0.0, delta2 = 0.0;
  double closed_form = 0.0;
  double numeric = 0.0;
  double abs_error = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct OracleGridPoint {
  int n1, n2, p;
  double delta1, delta2;
};

// Twelve triples spanning the four (y1, y2) regimes, with both equal and
// unequal kurtosis pairs so the mean shift is exercised away from zero.
inline std::vector<OracleGridPoint> default_verification_grid() {
  return {
      {45, 40, 50, 0.0, 0.0},      {90, 80, 100, -1.2, -1.2},
      {60, 50, 72, -1.2, 0.8},     {36, 50, 45, 0.0, 0.0},
      {72, 100, 90, -1.2, -1.2},   {48, 90, 60, 1.0, -0.5},
      {50, 36, 45, 0.0, 0.0},      {100, 72, 90, -1.2, -1.2},
      {90, 48, 60, -0.5, 1.0},     {50, 50, 45, 0.0, 0.0},
      {100, 100, 90, -1.2, -1.2},  {120, 90, 60, 0.3, -0.9},
  };
}

struct MomentCheck {
  double mean = 0.0;
  double variance = 0.0;
  double se_mean = 0.0;
  double se_variance = 0.0;
  int reps = 0;
};

// Sample mean and variance of P1 - p*ell1 over null replicates: a direct
// Monte Carlo check of the asymptotic law that shares nothing with the
// contour machinery.
inline MomentCheck mc_moments(int n1, int n2, int p, Distribution dist, int reps,
                              std::uint64_t seed, int threads = 0) {
  if (reps < 500) throw std::invalid_argument("mc_moments: need at least 500 replicates");
  Scenario sc;
  sc.case_id = 0;
  sc.n1 = n1;
  sc.n2 = n2;
  sc.p = p;
  sc.a = 0.0;
  sc.dist = dist;
  sc.sigma = SigmaStructure::identity;

  const SpectralParams sp = spectral_params(n1, n2, p);
  const double ell1 = centering_terms(sp).first;

  std::vector<double> stat(reps);
  detail::parallel_for(reps, resolve_threads(threads), [&](int rep) {
    RandomStream stream = RandomStream::derive(
        seed, {static_cast<std::uint64_t>(sc.case_id), 0ull, 1ull, key_bits(0.0),
               static_cast<std::uint64_t>(rep)});
    const auto data = draw_dataset(sc, stream);
    const ScatterMatrix a1 = scatter(data.first, CenteringMode::known_zero_mean);
    const ScatterMatrix a2 = scatter(data.second, CenteringMode::known_zero_mean);
    const BetaSpectrum spec = beta_spectrum(a1, a2);
    stat[rep] = truncated_sums(spec).p1 - p * ell1;
  });

  MomentCheck out;
  out.reps = reps;
  out.mean = sample_mean(stat);
  out.variance = sample_variance(stat);
  out.se_mean = std::sqrt(out.variance / reps);
  out.se_variance = out.variance * std::sqrt(2.0 / (reps - 1.0));
  return out;
}

struct OracleTolerances {
  double ell = 1e-8;
  double mu = 1e-5;
  double sigma2 = 1e-4;
};

inline std::vector<OracleReport> run_verification(
    const std::vector<OracleGridPoint>& grid, const OracleTolerances& tol = {},
    const ContourConfig& mean_cc = {}, const ContourConfig& var_cc = {1.0 / 32.0, 1024, 3}) {
  std::vector<OracleReport> reports;
  for (const auto& g : grid) {
    const SpectralParams sp = spectral_params(g.n1, g.n2, g.p);
    const KurtosisSpec ks{g.delta1, g.delta2};
    const NullLaw law = mean_variance(sp, ks);

    auto push = [&](const std::string& target, double closed, double numeric,
                    double tolerance) {
      OracleReport r;
      r.target = target;
      r.n1 = g.n1;
      r.n2 = g.n2;
      r.p = g.p;
      r.delta1 = g.delta1;
      r.delta2 = g.delta2;
      r.closed_form = closed;
      r.numeric = numeric;
      r.abs_error = std::fabs(closed - numeric);
      r.tolerance = tolerance;
      r.pass = r.abs_error <= tolerance;
      reports.push_back(r);
    };

    const double mass_closed = 1.0 - std::max(1.0 - 1.0 / sp.y1, 0.0) -
                               std::max(1.0 - 1.0 / sp.y2, 0.0);
    push("mass", mass_closed, quad_lsd_moment(sp, LsdMoment::one), tol.ell);
    push("ell1", law.ell1, quad_lsd_moment(sp, LsdMoment::x), tol.ell);
    push("ell2", law.ell2, quad_lsd_moment(sp, LsdMoment::one_minus_x), tol.ell);
    push("mu", law.mu, contour_mean(sp, ks, mean_cc), tol.mu);
    push("sigma2", law.sigma2, contour_variance(sp, ks, var_cc), tol.sigma2);
  }
  return reports;
}

}  // namespace covtest
