#pragma once

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "covtest/matrix.hpp"
#include "covtest/mc.hpp"

namespace covtest {

// Reads a numeric CSV with rows as observations.  `transpose` covers the
// variables-in-rows layout.
inline Matrix read_csv(const std::string& path, bool header = false,
                       char delimiter = ',', bool transpose_layout = false) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);

  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (header && line_no == 1) continue;
    if (line.empty()) continue;

    std::vector<double> row;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, delimiter)) {
      try {
        std::size_t pos = 0;
        const double v = std::stod(field, &pos);
        while (pos < field.size() && std::isspace(static_cast<unsigned char>(field[pos]))) ++pos;
        if (pos != field.size()) throw std::invalid_argument(field);
        row.push_back(v);
      } catch (const std::exception&) {
        throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                 ": cannot parse '" + field + "' as a number");
      }
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": ragged row (expected " +
                               std::to_string(rows.front().size()) + " fields)");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error(path + ": no data rows");

  Matrix m(static_cast<int>(rows.size()), static_cast<int>(rows.front().size()));
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) m(i, j) = rows[i][j];
  return transpose_layout ? transpose(m) : m;
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

namespace detail {

inline std::string format_rate(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

inline std::string format_a(double a) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", a);
  return buf;
}

}  // namespace detail

// Long-format CSV, one row per (cell, statistic).  The `rate` column is the
// asymptotic-calibration rejection rate and is empty for the log statistics,
// which have no asymptotic law here.
inline std::string to_csv(const PowerTable& table) {
  std::string out =
      "case,regime,n1,n2,p,a,statistic,rate,size_corrected_rate,mc_se,reps,seed\n";
  for (const auto& cell : table.cells) {
    const struct {
      const char* name;
      double rate;
      double corrected;
    } stats[] = {
        {"K", cell.result.k_rate, cell.result.k_rate_corrected},
        {"L", std::numeric_limits<double>::quiet_NaN(), cell.result.l_rate_corrected},
        {"Ltilde", std::numeric_limits<double>::quiet_NaN(),
         cell.result.l_tilde_rate_corrected},
    };
    for (const auto& s : stats) {
      const double basis = std::isnan(s.rate) ? s.corrected : s.rate;
      out += std::to_string(cell.case_id);
      out += ',';
      out += cell.regime;
      out += ',';
      out += std::to_string(cell.n1);
      out += ',';
      out += std::to_string(cell.n2);
      out += ',';
      out += std::to_string(cell.p);
      out += ',';
      out += detail::format_a(cell.a);
      out += ',';
      out += s.name;
      out += ',';
      out += detail::format_rate(s.rate);
      out += ',';
      out += detail::format_rate(s.corrected);
      out += ',';
      out += detail::format_rate(mc_standard_error(basis, cell.result.reps_completed));
      out += ',';
      out += std::to_string(table.reps);
      out += ',';
      out += std::to_string(table.seed);
      out += '\n';
    }
  }
  return out;
}

}  // namespace covtest
