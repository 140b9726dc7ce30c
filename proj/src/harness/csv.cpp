// Copyright 2026 The dpboot Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <tuple>

#include "dpboot/error.hpp"
#include "dpboot/harness.hpp"

namespace dpboot {
namespace {

std::string Num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

constexpr const char* kColumns =
    "trial,n,epsilon,alpha,method,coordinate,setting,truth,estimate,abs_error,"
    "ci_lo,ci_hi,covered,failed_low,failed_high,width,replicate_failures";

}  // namespace

void ClassifyCoverage(TrialRecord& record) {
  record.failed_low = record.truth < record.ci_lo;
  record.failed_high = record.truth > record.ci_hi;
  record.covered = !record.failed_low && !record.failed_high;
}

std::vector<SummaryRecord> Summarize(const std::vector<TrialRecord>& trials) {
  using Key = std::tuple<std::size_t, double, double, std::string, int, double>;
  std::map<Key, std::size_t> index;
  std::vector<SummaryRecord> out;
  for (const TrialRecord& r : trials) {
    const Key key{r.n, r.epsilon, r.alpha, r.method, r.coordinate, r.setting};
    auto [it, inserted] = index.emplace(key, out.size());
    if (inserted) {
      SummaryRecord s;
      s.n = r.n;
      s.epsilon = r.epsilon;
      s.alpha = r.alpha;
      s.method = r.method;
      s.coordinate = r.coordinate;
      s.setting = r.setting;
      s.truth = r.truth;
      out.push_back(s);
    }
    SummaryRecord& s = out[it->second];
    ++s.trials;
    s.mean_estimate += r.estimate;
    s.mean_abs_error += r.abs_error();
    s.mean_ci_lo += r.ci_lo;
    s.mean_ci_hi += r.ci_hi;
    s.coverage += r.covered ? 1.0 : 0.0;
    s.failed_low += r.failed_low ? 1 : 0;
    s.failed_high += r.failed_high ? 1 : 0;
    s.mean_width += r.width();
    s.replicate_failures += r.replicate_failures;
  }
  for (SummaryRecord& s : out) {
    const double t = static_cast<double>(s.trials);
    s.mean_estimate /= t;
    s.mean_abs_error /= t;
    s.mean_ci_lo /= t;
    s.mean_ci_hi /= t;
    s.coverage /= t;
    s.mean_width /= t;
  }
  return out;
}

void WriteCsv(const ExperimentOutput& output, std::ostream& out) {
  out << kCsvSchemaTag << ',' << kColumns << '\n';
  for (const TrialRecord& r : output.trials) {
    out << "trial," << r.trial << ',' << r.n << ',' << Num(r.epsilon) << ','
        << Num(r.alpha) << ',' << r.method << ',' << r.coordinate << ','
        << Num(r.setting) << ',' << Num(r.truth) << ',' << Num(r.estimate)
        << ',' << Num(r.abs_error()) << ',' << Num(r.ci_lo) << ','
        << Num(r.ci_hi) << ',' << (r.covered ? 1 : 0) << ','
        << (r.failed_low ? 1 : 0) << ',' << (r.failed_high ? 1 : 0) << ','
        << Num(r.width()) << ',' << r.replicate_failures << '\n';
  }
  for (const SummaryRecord& s : output.summary) {
    out << "summary," << s.trials << ',' << s.n << ',' << Num(s.epsilon)
        << ',' << Num(s.alpha) << ',' << s.method << ',' << s.coordinate
        << ',' << Num(s.setting) << ',' << Num(s.truth) << ','
        << Num(s.mean_estimate) << ',' << Num(s.mean_abs_error) << ','
        << Num(s.mean_ci_lo) << ',' << Num(s.mean_ci_hi) << ','
        << Num(s.coverage) << ',' << s.failed_low << ',' << s.failed_high
        << ',' << Num(s.mean_width) << ',' << s.replicate_failures << '\n';
  }
}

std::string FormatCsv(const ExperimentOutput& output) {
  std::ostringstream out;
  WriteCsv(output, out);
  return out.str();
}

Eigen::MatrixXd ReadNumericCsv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> row;
    std::stringstream fields(line);
    std::string field;
    while (std::getline(fields, field, ',')) {
      try {
        std::size_t used = 0;
        const double v = std::stod(field, &used);
        if (field.find_first_not_of(" \t", used) != std::string::npos) throw 0;
        if (!std::isfinite(v)) throw 0;
        row.push_back(v);
      } catch (...) {
        Fail(ErrorCode::kIo, "line " + std::to_string(line_no) +
                                 ": not a finite number: '" + field + "'");
      }
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      Fail(ErrorCode::kShape, "line " + std::to_string(line_no) +
                                  " has a different number of columns");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) Fail(ErrorCode::kEmptyInput, "CSV has no data rows");
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return out;
}

Eigen::MatrixXd ReadNumericCsvFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIo, "cannot open data file '" + path + "'");
  return ReadNumericCsv(in);
}

}  // namespace dpboot
