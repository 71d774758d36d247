#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include <json.hpp>

#include "covtest/mc.hpp"
#include "covtest/oracle.hpp"
#include "covtest/test_engine.hpp"
#include "covtest/version.hpp"

namespace covtest {

// JSON views of the public result types; field layouts are pinned by the
// schema files under schemas/.

inline nlohmann::json to_json(const TestReport& r) {
  nlohmann::json j;
  j["version"] = kVersion;
  j["statistics"] = {
      {"k", r.k}, {"k_prime", r.k_prime}, {"l", r.l}, {"l_tilde", r.l_tilde}};
  j["p_value_k"] = r.p_value_k;
  j["decision"] = r.reject ? "reject" : "accept";
  j["level"] = r.level;
  j["sidedness"] = r.sidedness == Sidedness::two_sided ? "two-sided" : "upper";
  j["null_law"] = {{"ell1", r.law.ell1},
                   {"ell2", r.law.ell2},
                   {"mu", r.law.mu},
                   {"sigma2", r.law.sigma2}};
  j["params"] = {{"n1", r.params.n1}, {"n2", r.params.n2}, {"p", r.params.p},
                 {"y1", r.params.y1}, {"y2", r.params.y2}, {"h", r.params.h},
                 {"x_l", r.params.x_l}, {"x_r", r.params.x_r}};
  j["spectrum"] = {{"p", r.spectrum.p},
                   {"count_zero", r.spectrum.count_zero},
                   {"count_one", r.spectrum.count_one},
                   {"lambda_min", r.spectrum.lambda_min},
                   {"lambda_max", r.spectrum.lambda_max}};
  j["mlrt_weights"] = {{"c1", r.mlrt.c1}, {"c2", r.mlrt.c2}};
  j["kurtosis"] = {{"delta1", r.delta1},
                   {"delta2", r.delta2},
                   {"estimated", r.kurtosis_estimated}};
  j["warnings"] = r.warnings;
  return j;
}

inline nlohmann::json to_json(const PowerTable& table) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& cell : table.cells) {
    nlohmann::json c;
    c["case"] = cell.case_id;
    c["regime"] = cell.regime;
    c["n1"] = cell.n1;
    c["n2"] = cell.n2;
    c["p"] = cell.p;
    c["a"] = cell.a;
    c["reps_completed"] = cell.result.reps_completed;
    c["failures"] = cell.result.failures;
    c["elapsed_seconds"] = cell.result.elapsed_seconds;
    auto rate = [](double v) {
      return std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v);
    };
    c["k_rate"] = rate(cell.result.k_rate);
    c["k_rate_corrected"] = rate(cell.result.k_rate_corrected);
    c["l_rate_corrected"] = rate(cell.result.l_rate_corrected);
    c["l_tilde_rate_corrected"] = rate(cell.result.l_tilde_rate_corrected);
    cells.push_back(std::move(c));
  }
  nlohmann::json j;
  j["version"] = kVersion;
  j["case"] = table.case_id;
  j["reps"] = table.reps;
  j["seed"] = table.seed;
  j["level"] = table.level;
  j["cells"] = std::move(cells);
  return j;
}

inline nlohmann::json to_json(const std::vector<OracleReport>& reports) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : reports) {
    arr.push_back({{"target", r.target},
                   {"n1", r.n1},
                   {"n2", r.n2},
                   {"p", r.p},
                   {"delta1", r.delta1},
                   {"delta2", r.delta2},
                   {"closed_form", r.closed_form},
                   {"numeric", r.numeric},
                   {"abs_error", r.abs_error},
                   {"tolerance", r.tolerance},
                   {"pass", r.pass}});
  }
  return arr;
}

}  // namespace covtest
