// covtest: two-sample covariance equality testing at high dimension.
//
// Subcommands:
//   test    run the trace-based test on two CSV samples, JSON report out
//   params  print the dimension ratios and the asymptotic null law
//   table   reproduce empirical size/power tables for cases 1-4
//   curve   power-versus-a sweep for one size group, long-format CSV
//   verify  check the closed forms against numerical quadrature/contours
//
// Exit codes: 0 accept/success, 2 reject, 1 usage or data error,
// 3 verification failure.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "covtest/io.hpp"
#include "covtest/mc.hpp"
#include "covtest/oracle.hpp"
#include "covtest/report.hpp"
#include "covtest/test_engine.hpp"
#include "covtest/version.hpp"

namespace {

using namespace covtest;

std::vector<OracleGridPoint> load_grid_file(const std::string& path) {
  std::vector<OracleGridPoint> grid;
  Matrix m;
  try {
    m = read_csv(path, false);
  } catch (const std::exception&) {
    m = read_csv(path, true);  // retry assuming a header line
  }
  if (m.cols != 5)
    throw std::runtime_error(path + ": expected columns n1,n2,p,delta1,delta2");
  for (int i = 0; i < m.rows; ++i) {
    grid.push_back({static_cast<int>(m(i, 0)), static_cast<int>(m(i, 1)),
                    static_cast<int>(m(i, 2)), m(i, 3), m(i, 4)});
  }
  return grid;
}

int cmd_test(const std::string& file1, const std::string& file2, bool header,
             char delimiter, bool transpose_layout, const std::string& centering,
             std::optional<double> delta1, std::optional<double> delta2,
             double level, const std::string& sided, std::optional<double> c1,
             std::optional<double> c2, const std::string& out_path) {
  const Matrix x1 = read_csv(file1, header, delimiter, transpose_layout);
  const Matrix x2 = read_csv(file2, header, delimiter, transpose_layout);
  if (x1.cols != x2.cols)
    throw std::runtime_error("samples disagree on dimension: " + std::to_string(x1.cols) +
                             " vs " + std::to_string(x2.cols) + " columns");
  const CenteringMode mode = centering == "zero-mean" ? CenteringMode::known_zero_mean
                                                      : CenteringMode::sample_mean;
  const Sidedness sidedness = sided == "upper" ? Sidedness::upper : Sidedness::two_sided;
  std::optional<MlrtConfig> mlrt;
  if (c1 && c2) mlrt = MlrtConfig{*c1, *c2};

  TestReport report;
  try {
    report = run_test(x1, x2, mode, delta1, delta2, level, sidedness, mlrt);
  } catch (const NotPositiveDefinite& e) {
    throw std::runtime_error(
        std::string("pooled scatter is not positive definite; the test requires "
                    "p < n1 + n2 (after centering) and full-rank data (") +
        e.what() + ")");
  }
  const std::string json = to_json(report).dump(2);
  std::cout << json << "\n";
  if (!out_path.empty()) write_file(out_path, json + "\n");
  return report.reject ? 2 : 0;
}

int cmd_params(int n1, int n2, int p, double delta1, double delta2, bool as_json) {
  const SpectralParams sp = spectral_params(n1, n2, p);
  const NullLaw law = mean_variance(sp, {delta1, delta2});
  if (as_json) {
    nlohmann::json j;
    j["params"] = {{"n1", n1},       {"n2", n2},           {"p", p},
                   {"y1", sp.y1},    {"y2", sp.y2},        {"alpha_n", sp.alpha_n},
                   {"h", sp.h},      {"x_l", sp.x_l},      {"x_r", sp.x_r}};
    j["null_law"] = {{"ell1", law.ell1}, {"ell2", law.ell2}, {"mu", law.mu},
                     {"sigma2", law.sigma2}};
    j["near_one"] = sp.near_one;
    std::cout << j.dump(2) << "\n";
  } else {
    std::printf("n1=%d n2=%d p=%d\n", n1, n2, p);
    std::printf("y1=%.6f y2=%.6f alpha_n=%.6f h=%.6f\n", sp.y1, sp.y2, sp.alpha_n, sp.h);
    std::printf("support: x_l=%.6f x_r=%.6f\n", sp.x_l, sp.x_r);
    std::printf("ell1=%.6f ell2=%.6f mu=%.6g sigma2=%.6f\n", law.ell1, law.ell2,
                law.mu, law.sigma2);
    if (sp.near_one)
      std::printf("warning: a dimension ratio is within 0.02 of 1; "
                  "the asymptotic law excludes y = 1\n");
  }
  return 0;
}

int cmd_table(int case_id, int reps, std::uint64_t seed, double level, bool full,
              const std::vector<double>& a_grid, const std::string& calibration,
              int threads, const std::string& out_path, const std::string& json_path) {
  const Calibration cal = calibration == "asymptotic" ? Calibration::asymptotic
                                                      : Calibration::empirical_quantile;
  const PowerTable table =
      run_table(case_id, table_sizes(full), a_grid, reps, seed, level, cal, threads);
  const std::string csv = to_csv(table);
  if (out_path.empty())
    std::cout << csv;
  else
    write_file(out_path, csv);
  if (!json_path.empty()) write_file(json_path, to_json(table).dump(2) + "\n");
  return 0;
}

int cmd_curve(int case_id, int n1, int n2, int p, double a_max, double a_step,
              int reps, std::uint64_t seed, double level, int threads,
              const std::string& out_path) {
  std::vector<double> a_grid;
  for (double a = 0.0; a <= a_max + 1e-9; a += a_step) a_grid.push_back(a);
  const PowerTable table = run_table(case_id, {{n1, n2, p}}, a_grid, reps, seed,
                                     level, Calibration::empirical_quantile, threads);
  std::string csv = "a,statistic,rate\n";
  char buf[96];
  for (const auto& cell : table.cells) {
    std::snprintf(buf, sizeof(buf), "%g,K,%.6f\n", cell.a, cell.result.k_rate);
    csv += buf;
    std::snprintf(buf, sizeof(buf), "%g,L,%.6f\n", cell.a, cell.result.l_rate_corrected);
    csv += buf;
    std::snprintf(buf, sizeof(buf), "%g,Ltilde,%.6f\n", cell.a,
                  cell.result.l_tilde_rate_corrected);
    csv += buf;
  }
  if (out_path.empty())
    std::cout << csv;
  else
    write_file(out_path, csv);
  return 0;
}

int cmd_verify(std::optional<double> tol_all, std::optional<double> tol_ell,
               std::optional<double> tol_mu, std::optional<double> tol_sigma2,
               const std::string& grid_file, bool as_json) {
  OracleTolerances tol;
  if (tol_all) {
    tol.ell = *tol_all;
    tol.mu = *tol_all;
    tol.sigma2 = *tol_all;
  }
  if (tol_ell) tol.ell = *tol_ell;
  if (tol_mu) tol.mu = *tol_mu;
  if (tol_sigma2) tol.sigma2 = *tol_sigma2;

  const std::vector<OracleGridPoint> grid =
      grid_file.empty() ? default_verification_grid() : load_grid_file(grid_file);
  const auto reports = run_verification(grid, tol);

  bool all_pass = true;
  if (as_json) {
    std::cout << to_json(reports).dump(2) << "\n";
    for (const auto& r : reports) all_pass = all_pass && r.pass;
  } else {
    std::printf("%-7s %5s %5s %5s %6s %6s %15s %15s %10s %8s %s\n", "target", "n1",
                "n2", "p", "d1", "d2", "closed", "numeric", "abs_err", "tol", "ok");
    for (const auto& r : reports) {
      std::printf("%-7s %5d %5d %5d %6.2f %6.2f %15.9f %15.9f %10.2e %8.1e %s\n",
                  r.target.c_str(), r.n1, r.n2, r.p, r.delta1, r.delta2,
                  r.closed_form, r.numeric, r.abs_error, r.tolerance,
                  r.pass ? "PASS" : "FAIL");
      all_pass = all_pass && r.pass;
    }
  }
  return all_pass ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-sample covariance equality testing at high dimension"};
  app.set_version_flag("--version", covtest::kVersion);
  app.require_subcommand(1);

  auto* t = app.add_subcommand(
      "test", "Test equality of two covariance matrices from CSV samples");
  std::string file1, file2, centering = "sample-mean", sided = "two-sided", out_path;
  std::string delimiter = ",";
  bool header = false, transpose_layout = false;
  double level = 0.05;
  std::optional<double> delta1, delta2, c1, c2;
  t->add_option("file1", file1, "CSV for sample 1 (rows = observations)")->required();
  t->add_option("file2", file2, "CSV for sample 2")->required();
  t->add_flag("--header", header, "skip a header line");
  t->add_option("--delimiter", delimiter, "field delimiter (single character)");
  t->add_flag("--transpose", transpose_layout,
              "variables are in rows, observations in columns");
  t->add_option("--centering", centering, "sample-mean or zero-mean")
      ->check(CLI::IsMember({"sample-mean", "zero-mean"}));
  t->add_option("--delta1", delta1,
                "excess kurtosis of population 1 (estimated if omitted)");
  t->add_option("--delta2", delta2,
                "excess kurtosis of population 2 (estimated if omitted)");
  t->add_option("--level", level, "significance level")->check(CLI::Range(1e-6, 0.5));
  t->add_option("--sided", sided, "two-sided or upper")
      ->check(CLI::IsMember({"two-sided", "upper"}));
  t->add_option("--c1", c1, "weight of log(lambda) in L");
  t->add_option("--c2", c2, "weight of log(1 - lambda) in L");
  std::string test_calibration = "asymptotic";
  t->add_option("--calibration", test_calibration,
                "single tests are calibrated asymptotically; empirical quantiles "
                "apply to table/curve")
      ->check(CLI::IsMember({"asymptotic"}));
  t->add_option("--out", out_path, "also write the JSON report to this path");

  auto* pr = app.add_subcommand("params", "Print dimension ratios and the null law");
  int pn1 = 0, pn2 = 0, pp = 0;
  double pd1 = 0.0, pd2 = 0.0;
  bool params_json = false;
  pr->add_option("--n1", pn1, "sample size 1")->required();
  pr->add_option("--n2", pn2, "sample size 2")->required();
  pr->add_option("--p", pp, "dimension")->required();
  pr->add_option("--delta1", pd1, "excess kurtosis of population 1");
  pr->add_option("--delta2", pd2, "excess kurtosis of population 2");
  pr->add_flag("--json", params_json, "emit JSON");

  auto* tab = app.add_subcommand("table", "Empirical size/power table for one case");
  int case_id = 1, reps = 1000, threads = 0;
  std::uint64_t seed = 42;
  double tab_level = 0.05;
  bool full = false;
  std::vector<double> a_grid = {0.0, 3.0, 7.0, 10.0};
  std::string tab_out, tab_json, calibration = "empirical";
  tab->add_option("--case", case_id, "case 1..4")->required()->check(CLI::Range(1, 4));
  tab->add_option("--reps", reps, "replicates per cell")->check(CLI::PositiveNumber);
  tab->add_option("--seed", seed, "base seed");
  tab->add_option("--level", tab_level, "significance level");
  tab->add_flag("--full", full, "include the p = 180..400 size groups");
  tab->add_option("--a", a_grid, "comma-separated a grid")->delimiter(',');
  tab->add_option("--calibration", calibration, "empirical or asymptotic")
      ->check(CLI::IsMember({"empirical", "asymptotic"}));
  tab->add_option("--threads", threads,
                  "worker threads (0: COVTEST_THREADS or hardware)");
  tab->add_option("--out", tab_out, "write CSV here instead of stdout");
  tab->add_option("--json", tab_json, "also write a JSON version to this path");

  auto* cv = app.add_subcommand("curve", "Power versus a for one size group");
  int cv_case = 1, cv_n1 = 0, cv_n2 = 0, cv_p = 0, cv_reps = 500, cv_threads = 0;
  std::uint64_t cv_seed = 42;
  double a_max = 10.0, a_step = 1.0, cv_level = 0.05;
  std::string cv_out;
  cv->add_option("--case", cv_case, "case 1..4")->required()->check(CLI::Range(1, 4));
  cv->add_option("--n1", cv_n1, "sample size 1")->required();
  cv->add_option("--n2", cv_n2, "sample size 2")->required();
  cv->add_option("--p", cv_p, "dimension")->required();
  cv->add_option("--a-max", a_max, "largest a");
  cv->add_option("--a-step", a_step, "grid step")->check(CLI::PositiveNumber);
  cv->add_option("--reps", cv_reps, "replicates per cell");
  cv->add_option("--seed", cv_seed, "base seed");
  cv->add_option("--level", cv_level, "significance level");
  cv->add_option("--threads", cv_threads, "worker threads");
  cv->add_option("--out", cv_out, "write CSV here instead of stdout");

  auto* vf = app.add_subcommand("verify", "Closed forms versus numerical oracles");
  std::optional<double> tol_all, tol_ell, tol_mu, tol_sigma2;
  std::string grid_file;
  bool verify_json = false;
  vf->add_option("--tol", tol_all, "tolerance for every target");
  vf->add_option("--tol-ell", tol_ell, "tolerance for the centering terms");
  vf->add_option("--tol-mu", tol_mu, "tolerance for the mean shift");
  vf->add_option("--tol-sigma2", tol_sigma2, "tolerance for the variance");
  vf->add_option("--grid-file", grid_file, "CSV of n1,n2,p,delta1,delta2 rows");
  vf->add_flag("--json", verify_json, "emit JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*t)
      return cmd_test(file1, file2, header, delimiter.empty() ? ',' : delimiter[0],
                      transpose_layout, centering, delta1, delta2, level, sided,
                      c1, c2, out_path);
    if (*pr) return cmd_params(pn1, pn2, pp, pd1, pd2, params_json);
    if (*tab)
      return cmd_table(case_id, reps, seed, tab_level, full, a_grid, calibration,
                       threads, tab_out, tab_json);
    if (*cv)
      return cmd_curve(cv_case, cv_n1, cv_n2, cv_p, a_max, a_step, cv_reps, cv_seed,
                       cv_level, cv_threads, cv_out);
    if (*vf)
      return cmd_verify(tol_all, tol_ell, tol_mu, tol_sigma2, grid_file, verify_json);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
