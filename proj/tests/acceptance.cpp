// Acceptance suite: runs every criterion at its stated tolerance and prints
// one PASS/FAIL line per criterion.  Nonzero exit if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "covtest/io.hpp"
#include "covtest/mc.hpp"
#include "covtest/oracle.hpp"
#include "covtest/stats.hpp"
#include "covtest/test_engine.hpp"
#include "support.hpp"

using namespace covtest;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeed = 42;
int g_failures = 0;

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

void report(int idx, bool pass, const std::string& detail, double elapsed) {
  std::printf("%s criterion %d: %s (%.1fs)\n", pass ? "PASS" : "FAIL", idx,
              detail.c_str(), elapsed);
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

char* fmt(char* buf, std::size_t n, const char* f, ...) {
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, n, f, args);
  va_end(args);
  return buf;
}

void criterion_1_null_size() {
  Timer timer;
  SimConfig cfg;
  cfg.scenario = Scenario::for_case(1, 90, 80, 100, 0.0);
  cfg.reps = 1000;
  cfg.seed = kSeed;
  cfg.calibration = Calibration::asymptotic;
  const CellResult r = run_cell(cfg);
  const bool pass = r.k_rate >= 0.034 && r.k_rate <= 0.074;
  char buf[160];
  report(1, pass,
         fmt(buf, sizeof(buf),
             "null size case 1 (90,80,100): K rate %.3f in [0.034,0.074]", r.k_rate),
         timer.seconds());
}

void criterion_2_power_reproduction() {
  Timer timer;
  const PowerTable t1 = run_table(1, {{45, 40, 50}}, {7.0, 10.0}, 1000, kSeed, 0.05,
                                  Calibration::asymptotic);
  const double p7 = t1.cells[0].result.k_rate;
  const double p10 = t1.cells[1].result.k_rate;
  const PowerTable t2 = run_table(2, {{100, 100, 90}}, {10.0}, 1000, kSeed, 0.05,
                                  Calibration::asymptotic);
  const double c2p10 = t2.cells[0].result.k_rate;
  const bool pass = p7 >= 0.528 && p7 <= 0.608 && p10 >= 0.795 && p10 <= 0.875 &&
                    c2p10 >= 0.961 && c2p10 <= 1.0;
  char buf[220];
  report(2, pass,
         fmt(buf, sizeof(buf),
             "power: case 1 (45,40,50) a=7 %.3f in [0.528,0.608], a=10 %.3f in "
             "[0.795,0.875]; case 2 (100,100,90) a=10 %.3f in [0.961,1.000]",
             p7, p10, c2p10),
         timer.seconds());
}

void criterion_3_power_ordering() {
  Timer timer;
  double min_gap_lt = 1.0, min_gap_l = 1.0;
  double worst_null = 0.05;
  int cells = 0;
  for (int case_id = 1; case_id <= 4; ++case_id) {
    const PowerTable t =
        run_table(case_id, table_sizes(false), {0.0, 7.0, 10.0}, 1000, kSeed);
    for (const auto& cell : t.cells) {
      if (cell.a == 0.0) {
        if (std::fabs(cell.result.k_rate - 0.05) >
            std::fabs(worst_null - 0.05))
          worst_null = cell.result.k_rate;
        continue;
      }
      ++cells;
      min_gap_lt = std::min(min_gap_lt, cell.result.k_rate_corrected -
                                            cell.result.l_tilde_rate_corrected);
      min_gap_l = std::min(min_gap_l, cell.result.k_rate_corrected -
                                          cell.result.l_rate_corrected);
    }
  }
  const bool pass = cells == 64 && min_gap_lt >= 0.05 && min_gap_l >= 0.10;
  char buf[220];
  report(3, pass,
         fmt(buf, sizeof(buf),
             "size-corrected ordering over %d desk cells: min K-Ltilde gap %.3f "
             "(need >= 0.05), min K-L gap %.3f (need >= 0.10); worst null size %.3f",
             cells, min_gap_lt, min_gap_l, worst_null),
         timer.seconds());
}

void criterion_4_oracle_agreement() {
  Timer timer;
  const auto reports =
      run_verification(default_verification_grid(), {1e-8, 1e-5, 1e-4});
  int checked = 0, passed = 0;
  double worst = 0.0;
  std::string worst_target = "-";
  for (const auto& r : reports) {
    ++checked;
    if (r.pass) ++passed;
    const double rel = r.abs_error / r.tolerance;
    if (rel > worst) {
      worst = rel;
      worst_target = r.target;
    }
  }
  const bool pass = checked == 60 && passed == checked;
  char buf[200];
  report(4, pass,
         fmt(buf, sizeof(buf),
             "closed form vs oracle on 12 triples: %d/%d targets within tolerance "
             "(worst %s at %.1e of its tolerance)",
             passed, checked, worst_target.c_str(), worst),
         timer.seconds());
}

void criterion_5_clt_shape() {
  Timer timer;
  Scenario sc = Scenario::for_case(1, 180, 160, 200, 0.0);
  const SweepResult sweep = run_sweep(sc, 2000, kSeed, 0, 0);
  const double ks = ks_distance_to_normal(sweep.k);
  const double mean = sample_mean(sweep.k);
  const double var = sample_variance(sweep.k);
  const bool pass = sweep.failures == 0 && ks < 0.035 && mean > -0.08 &&
                    mean < 0.08 && var > 0.87 && var < 1.13;
  char buf[200];
  report(5, pass,
         fmt(buf, sizeof(buf),
             "CLT shape at (180,160,200), 2000 reps: KS %.4f < 0.035, mean %.3f in "
             "(-0.08,0.08), variance %.3f in (0.87,1.13)",
             ks, mean, var),
         timer.seconds());
}

void criterion_6_exact_identities() {
  Timer timer;
  bool pass = true;
  std::string first_failure;
  auto fail = [&](const std::string& why) {
    pass = false;
    if (first_failure.empty()) first_failure = why;
  };

  const std::array<std::array<int, 3>, 4> regimes = {
      std::array<int, 3>{45, 40, 50}, {36, 50, 45}, {50, 36, 45}, {50, 50, 45}};

  // K' = -K on 200 random instances, 50 per regime.
  int instances = 0;
  for (const auto& rg : regimes) {
    const SpectralParams sp = spectral_params(rg[0], rg[1], rg[2]);
    const auto ells = centering_terms(sp);
    const NullLaw law = mean_variance(sp, {0.0, 0.0});
    const double expected_sum =
        rg[2] - std::max(rg[2] - rg[0], 0) - std::max(rg[2] - rg[1], 0);
    if (std::fabs(rg[2] * (ells.first + ells.second) - expected_sum) >
        1e-12 * expected_sum)
      fail("regime sum identity");
    for (int trial = 0; trial < 50; ++trial) {
      RandomStream stream = RandomStream::derive(
          kSeed, {900ull, static_cast<std::uint64_t>(instances)});
      ++instances;
      const Matrix x1 = testsupport::random_gaussian(rg[0], rg[2], stream);
      const Matrix x2 = testsupport::random_gaussian(rg[1], rg[2], stream);
      const ScatterMatrix a1 = scatter(x1, CenteringMode::known_zero_mean);
      const ScatterMatrix a2 = scatter(x2, CenteringMode::known_zero_mean);
      const BetaSpectrum spec = beta_spectrum(a1, a2);
      const TruncatedSums ts = truncated_sums(spec);
      if (std::fabs(ts.p1 + ts.p2 -
                    (rg[2] - spec.count_zero - spec.count_one)) > 1e-10)
        fail("truncated-sum identity");
      const auto kk = k_statistics(ts, law, rg[2]);
      if (std::fabs(kk.first + kk.second) > 1e-9) fail("K' = -K");

      if (trial < 5) {
        const BetaSpectrum rev = beta_spectrum(a2, a1);
        for (int i = 0; i < rg[2]; ++i)
          if (std::fabs(spec.eigenvalues[i] + rev.eigenvalues[rg[2] - 1 - i] - 1.0) >
              1e-9)
            fail("complementarity");
      }
    }
  }

  // Invariance of K under a common invertible transformation.
  for (int trial = 0; trial < 10; ++trial) {
    RandomStream stream =
        RandomStream::derive(kSeed, {901ull, static_cast<std::uint64_t>(trial)});
    const Matrix x1 = testsupport::random_gaussian(40, 16, stream);
    const Matrix x2 = testsupport::random_gaussian(36, 16, stream);
    const Matrix m = testsupport::random_invertible(16, stream);
    const TestReport base = run_test(x1, x2, CenteringMode::known_zero_mean, 0.0, 0.0);
    const TestReport moved = run_test(matmul(x1, m), matmul(x2, m),
                                      CenteringMode::known_zero_mean, 0.0, 0.0);
    if (std::fabs(base.k - moved.k) > 1e-7) fail("invariance of K");
  }

  char buf[200];
  report(6, pass,
         fmt(buf, sizeof(buf),
             "exact identities on %d instances across 4 regimes%s%s", instances,
             pass ? "" : "; first failure: ", first_failure.c_str()),
         timer.seconds());
}

void criterion_7_cli_determinism() {
  Timer timer;
  const fs::path out1 = fs::temp_directory_path() / "covtest_acc_t1.csv";
  const fs::path out2 = fs::temp_directory_path() / "covtest_acc_t2.csv";
  const std::string base = std::string(COVTEST_CLI_PATH) +
                           " table --case 1 --reps 200 --seed 7 --a 0,7 ";
  const int rc1 = std::system((base + "--threads 1 --out " + out1.string()).c_str());
  const int rc2 = std::system((base + "--threads 4 --out " + out2.string()).c_str());

  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  const std::string csv1 = slurp(out1);
  const std::string csv2 = slurp(out2);
  const bool pass = WEXITSTATUS(rc1) == 0 && WEXITSTATUS(rc2) == 0 &&
                    !csv1.empty() && csv1 == csv2;
  char buf[160];
  report(7, pass,
         fmt(buf, sizeof(buf),
             "cmd_table with --threads 1 vs 4: byte-identical CSV (%zu bytes)",
             csv1.size()),
         timer.seconds());
  std::error_code ec;
  fs::remove(out1, ec);
  fs::remove(out2, ec);
}

}  // namespace

int main() {
  criterion_1_null_size();
  criterion_2_power_reproduction();
  criterion_3_power_ordering();
  criterion_4_oracle_agreement();
  criterion_5_clt_shape();
  criterion_6_exact_identities();
  criterion_7_cli_determinism();
  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all acceptance criteria passed\n");
  return 0;
}
