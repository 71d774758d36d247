#pragma once

#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "covtest/beta.hpp"
#include "covtest/matrix.hpp"
#include "covtest/null_law.hpp"
#include "covtest/rng.hpp"
#include "covtest/stats.hpp"
#include "covtest/test_engine.hpp"

namespace covtest {

enum class Distribution { standard_normal, uniform_pm_sqrt3 };
enum class SigmaStructure { identity, spike_diag, equicorrelated };
enum class Calibration { asymptotic, empirical_quantile };

// One table-cell data model: populations share Sigma_2 up to the scale
// 1 + a/n1 on sample 1, entries IID with unit variance.
struct Scenario {
  int case_id = 1;
  int n1 = 0, n2 = 0, p = 0;
  double a = 0.0;
  Distribution dist = Distribution::standard_normal;
  SigmaStructure sigma = SigmaStructure::identity;

  double delta() const {
    return dist == Distribution::standard_normal ? 0.0 : -1.2;
  }

  static Scenario for_case(int case_id, int n1, int n2, int p, double a) {
    Scenario sc;
    sc.case_id = case_id;
    sc.n1 = n1;
    sc.n2 = n2;
    sc.p = p;
    sc.a = a;
    switch (case_id) {
      case 1:
        sc.dist = Distribution::standard_normal;
        sc.sigma = SigmaStructure::identity;
        break;
      case 2:
        sc.dist = Distribution::uniform_pm_sqrt3;
        sc.sigma = SigmaStructure::identity;
        break;
      case 3:
        sc.dist = Distribution::uniform_pm_sqrt3;
        sc.sigma = SigmaStructure::spike_diag;
        break;
      case 4:
        sc.dist = Distribution::uniform_pm_sqrt3;
        sc.sigma = SigmaStructure::equicorrelated;
        break;
      default:
        throw std::invalid_argument("Scenario: case id must be 1..4");
    }
    return sc;
  }
};

// Square root of the population covariance for each structure:
//   identity        -> I
//   spike-diag      -> diag(p, 1, ..., 1)          (Sigma = diag(p^2, 1, ...))
//   equicorrelated  -> aI + bJ with (aI + bJ)^2 = 0.5 I + 0.5 J
inline Matrix sigma_sqrt(SigmaStructure structure, int p) {
  if (p < 2) throw std::invalid_argument("sigma_sqrt: p must be >= 2");
  Matrix m = Matrix::identity(p);
  switch (structure) {
    case SigmaStructure::identity:
      break;
    case SigmaStructure::spike_diag:
      m(0, 0) = static_cast<double>(p);
      break;
    case SigmaStructure::equicorrelated: {
      const double a = std::sqrt(0.5);
      const double b = (std::sqrt(0.5 + 0.5 * p) - a) / p;
      for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) m(i, j) = (i == j ? a : 0.0) + b;
      break;
    }
  }
  return m;
}

namespace detail {

inline void fill_observations(Matrix& x, int n, int p, Distribution dist,
                              SigmaStructure sigma, double scale,
                              RandomStream& stream) {
  x = Matrix(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j)
      x(i, j) = dist == Distribution::standard_normal
                    ? stream.next_normal()
                    : stream.next_uniform_pm_sqrt3();

  switch (sigma) {
    case SigmaStructure::identity:
      break;
    case SigmaStructure::spike_diag:
      for (int i = 0; i < n; ++i) x(i, 0) *= static_cast<double>(p);
      break;
    case SigmaStructure::equicorrelated: {
      const double a = std::sqrt(0.5);
      const double b = (std::sqrt(0.5 + 0.5 * p) - a) / p;
      for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = 0; j < p; ++j) s += x(i, j);
        for (int j = 0; j < p; ++j) x(i, j) = a * x(i, j) + b * s;
      }
      break;
    }
  }
  if (scale != 1.0)
    for (double& v : x.data) v *= scale;
}

}  // namespace detail

// Draws one replicate dataset: z = Sigma^{1/2} x, with sample 1 scaled by
// sqrt(1 + a/n1).  Identical (seed-derived) streams give identical data
// regardless of the number of workers.
inline std::pair<Matrix, Matrix> draw_dataset(const Scenario& sc, RandomStream& stream) {
  std::pair<Matrix, Matrix> out;
  const double s1 = std::sqrt(1.0 + sc.a / static_cast<double>(sc.n1));
  detail::fill_observations(out.first, sc.n1, sc.p, sc.dist, sc.sigma, s1, stream);
  detail::fill_observations(out.second, sc.n2, sc.p, sc.dist, sc.sigma, 1.0, stream);
  return out;
}

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("COVTEST_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

namespace detail {

// Runs fn(i) for i in [0, n) on `threads` workers.  Work items self-schedule
// off an atomic counter; callers must make fn(i) independent of ordering.
template <typename Fn>
void parallel_for(int n, int threads, Fn&& fn) {
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&]() {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace detail

// Per-replicate statistic values for one sweep of a cell.
struct SweepResult {
  std::vector<double> k;
  std::vector<double> l;
  std::vector<double> l_tilde;
  int failures = 0;
};

// Stream purposes: 0 for alternative draws (keyed by a), 1 for null draws.
// Null draws never depend on a, so the a = 0 sweep of a size group is shared
// between its own cell and the empirical calibration of the a > 0 cells.
inline SweepResult run_sweep(const Scenario& scenario, int reps, std::uint64_t seed,
                             int cell_index, int threads) {
  const Scenario sc = scenario;
  const int purpose = sc.a == 0.0 ? 1 : 0;
  const SpectralParams sp = spectral_params(sc.n1, sc.n2, sc.p);
  const NullLaw law = mean_variance(sp, {sc.delta(), sc.delta()});
  const MlrtConfig mlrt = MlrtConfig::likelihood_weights(sc.n1, sc.n2);
  const double nan = std::numeric_limits<double>::quiet_NaN();

  std::vector<double> k(reps, nan), l(reps, nan), lt(reps, nan);
  std::atomic<int> failures{0};

  detail::parallel_for(reps, resolve_threads(threads), [&](int rep) {
    try {
      RandomStream stream = RandomStream::derive(
          seed, {static_cast<std::uint64_t>(sc.case_id),
                 static_cast<std::uint64_t>(cell_index),
                 static_cast<std::uint64_t>(purpose), key_bits(sc.a),
                 static_cast<std::uint64_t>(rep)});
      const auto data = draw_dataset(sc, stream);
      const ScatterMatrix a1 = scatter(data.first, CenteringMode::known_zero_mean);
      const ScatterMatrix a2 = scatter(data.second, CenteringMode::known_zero_mean);
      const BetaSpectrum spec = beta_spectrum(a1, a2);
      const auto kk = k_statistics(truncated_sums(spec), law, sc.p);
      const auto ll = mlrt_statistics(spec, mlrt);
      k[rep] = kk.first;
      l[rep] = ll.first;
      lt[rep] = ll.second;
    } catch (const std::exception&) {
      failures.fetch_add(1);
    }
  });

  SweepResult out;
  out.failures = failures.load();
  out.k.reserve(reps);
  out.l.reserve(reps);
  out.l_tilde.reserve(reps);
  for (int rep = 0; rep < reps; ++rep) {
    if (std::isnan(k[rep])) continue;
    out.k.push_back(k[rep]);
    out.l.push_back(l[rep]);
    out.l_tilde.push_back(lt[rep]);
  }
  return out;
}

struct SimConfig {
  Scenario scenario;
  int reps = 1000;
  std::uint64_t seed = 42;
  double level = 0.05;
  Calibration calibration = Calibration::empirical_quantile;
  int cell_index = 0;
  int threads = 0;  // 0: COVTEST_THREADS env or hardware concurrency
};

// Empirical size or power of one table cell.
struct CellResult {
  int reps_requested = 0;
  int reps_completed = 0;
  int failures = 0;
  double elapsed_seconds = 0.0;
  // Asymptotic (two-sided normal) calibration; only K has an asymptotic law.
  double k_rate = std::numeric_limits<double>::quiet_NaN();
  // Empirical-null-quantile calibration.
  double k_rate_corrected = std::numeric_limits<double>::quiet_NaN();
  double l_rate_corrected = std::numeric_limits<double>::quiet_NaN();
  double l_tilde_rate_corrected = std::numeric_limits<double>::quiet_NaN();
};

inline double mc_standard_error(double rate, int reps) {
  if (reps <= 0 || std::isnan(rate)) return std::numeric_limits<double>::quiet_NaN();
  return std::sqrt(rate * (1.0 - rate) / static_cast<double>(reps));
}

namespace detail {

// Fraction rejected by the symmetric empirical rule |K| > (1-level) quantile
// of null |K|.
inline double corrected_rate_abs(const std::vector<double>& values,
                                 const std::vector<double>& null_values,
                                 double level) {
  std::vector<double> abs_null(null_values.size());
  for (std::size_t i = 0; i < null_values.size(); ++i)
    abs_null[i] = std::fabs(null_values[i]);
  const double crit = empirical_quantile(abs_null, 1.0 - level);
  int rejected = 0;
  for (double v : values)
    if (std::fabs(v) > crit) ++rejected;
  return static_cast<double>(rejected) / static_cast<double>(values.size());
}

// Equal-tailed two-sided empirical rule for statistics with no natural
// centering: reject outside the (level/2, 1 - level/2) null quantiles.
inline double corrected_rate_two_sided(const std::vector<double>& values,
                                       const std::vector<double>& null_values,
                                       double level) {
  std::vector<double> sorted = null_values;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  std::size_t klo = static_cast<std::size_t>(std::floor(level / 2.0 * n));
  klo = std::max<std::size_t>(klo, 1);
  const double lo = sorted[klo - 1];
  const double hi = empirical_quantile(sorted, 1.0 - level / 2.0);
  int rejected = 0;
  for (double v : values)
    if (v < lo || v > hi) ++rejected;
  return static_cast<double>(rejected) / static_cast<double>(values.size());
}

}  // namespace detail

// Runs one cell: a main sweep at the scenario's `a`, plus (for empirical
// calibration) a paired null sweep.  An externally computed null sweep may be
// passed in so a whole size group shares one calibration run; at a = 0 the
// main sweep is itself the null sweep and the size-corrected rate equals the
// nominal level by construction.
inline CellResult run_cell(const SimConfig& cfg, const SweepResult* shared_null = nullptr) {
  if (cfg.reps < 1) throw std::invalid_argument("run_cell: reps must be >= 1");
  if (!(cfg.level > 0.0 && cfg.level < 1.0))
    throw std::invalid_argument("run_cell: level must lie in (0,1)");
  const auto t0 = std::chrono::steady_clock::now();
  CellResult out;
  out.reps_requested = cfg.reps;

  // At a = 0 the main sweep and the null sweep use the same stream keys, so a
  // precomputed null sweep doubles as the main sweep.
  const bool reuse_null_as_main = cfg.scenario.a == 0.0 && shared_null != nullptr;
  const SweepResult main =
      reuse_null_as_main
          ? *shared_null
          : run_sweep(cfg.scenario, cfg.reps, cfg.seed, cfg.cell_index, cfg.threads);
  out.failures = main.failures;
  out.reps_completed = static_cast<int>(main.k.size());
  if (out.reps_completed == 0 ||
      main.failures * 100 > cfg.reps)
    throw std::runtime_error("run_cell: more than 1% of replicates failed");

  int rejected = 0;
  for (double k : main.k)
    if (decide(k, cfg.level, Sidedness::two_sided).reject) ++rejected;
  out.k_rate = static_cast<double>(rejected) / out.reps_completed;

  if (cfg.calibration == Calibration::empirical_quantile) {
    SweepResult null_local;
    const SweepResult* null_sweep = &main;
    if (cfg.scenario.a != 0.0) {
      if (shared_null != nullptr) {
        null_sweep = shared_null;
      } else {
        Scenario null_sc = cfg.scenario;
        null_sc.a = 0.0;
        null_local = run_sweep(null_sc, cfg.reps, cfg.seed, cfg.cell_index, cfg.threads);
        if (null_local.failures * 100 > cfg.reps)
          throw std::runtime_error("run_cell: calibration sweep failed");
        null_sweep = &null_local;
      }
    }
    out.k_rate_corrected = detail::corrected_rate_abs(main.k, null_sweep->k, cfg.level);
    out.l_rate_corrected =
        detail::corrected_rate_two_sided(main.l, null_sweep->l, cfg.level);
    out.l_tilde_rate_corrected =
        detail::corrected_rate_two_sided(main.l_tilde, null_sweep->l_tilde, cfg.level);
  }

  out.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

inline std::string regime_label(int n1, int n2, int p) {
  const double y1 = static_cast<double>(p) / n1;
  const double y2 = static_cast<double>(p) / n2;
  if (y1 > 1.0 && y2 > 1.0) return "i";
  if (y1 > 1.0 && y2 < 1.0) return "ii";
  if (y1 < 1.0 && y2 > 1.0) return "iii";
  return "iv";
}

// Size triples from the reference study: two desk-scale groups per regime,
// with the larger p = 180..400 groups behind `full`.
inline std::vector<std::array<int, 3>> table_sizes(bool full) {
  std::vector<std::array<int, 3>> sizes = {
      {45, 40, 50},  {90, 80, 100},   // (i)   y1 > 1, y2 > 1
      {36, 50, 45},  {72, 100, 90},   // (ii)  y1 > 1, y2 < 1
      {50, 36, 45},  {100, 72, 90},   // (iii) y1 < 1, y2 > 1
      {50, 50, 45},  {100, 100, 90},  // (iv)  y1 < 1, y2 < 1
  };
  if (full) {
    const std::vector<std::array<int, 3>> extra = {
        {180, 160, 200}, {360, 320, 400}, {144, 200, 180}, {288, 400, 360},
        {200, 144, 180}, {400, 288, 360}, {200, 200, 180}, {400, 400, 360},
    };
    sizes.insert(sizes.end(), extra.begin(), extra.end());
  }
  return sizes;
}

struct TableCell {
  int case_id = 0;
  std::string regime;
  int n1 = 0, n2 = 0, p = 0;
  double a = 0.0;
  CellResult result;
};

struct PowerTable {
  int case_id = 0;
  int reps = 0;
  std::uint64_t seed = 0;
  double level = 0.05;
  std::vector<TableCell> cells;
};

// One cell per (size, a).  Cells of a size group share the null sweep used
// for empirical calibration, mirroring one bracketed column per table block.
inline PowerTable run_table(int case_id, const std::vector<std::array<int, 3>>& sizes,
                            const std::vector<double>& a_grid, int reps,
                            std::uint64_t seed, double level = 0.05,
                            Calibration calibration = Calibration::empirical_quantile,
                            int threads = 0) {
  if (sizes.empty() || a_grid.empty())
    throw std::invalid_argument("run_table: empty grid");
  PowerTable table;
  table.case_id = case_id;
  table.reps = reps;
  table.seed = seed;
  table.level = level;

  for (std::size_t si = 0; si < sizes.size(); ++si) {
    const auto& s = sizes[si];
    SweepResult null_sweep;
    bool have_null = false;
    if (calibration == Calibration::empirical_quantile) {
      Scenario null_sc = Scenario::for_case(case_id, s[0], s[1], s[2], 0.0);
      null_sweep = run_sweep(null_sc, reps, seed, static_cast<int>(si), threads);
      have_null = true;
    }
    for (double a : a_grid) {
      SimConfig cfg;
      cfg.scenario = Scenario::for_case(case_id, s[0], s[1], s[2], a);
      cfg.reps = reps;
      cfg.seed = seed;
      cfg.level = level;
      cfg.calibration = calibration;
      cfg.cell_index = static_cast<int>(si);
      cfg.threads = threads;

      TableCell cell;
      cell.case_id = case_id;
      cell.regime = regime_label(s[0], s[1], s[2]);
      cell.n1 = s[0];
      cell.n2 = s[1];
      cell.p = s[2];
      cell.a = a;
      cell.result = run_cell(cfg, have_null ? &null_sweep : nullptr);
      table.cells.push_back(std::move(cell));
    }
  }
  return table;
}

}  // namespace covtest
