// Copyright 2026 The qauction Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QAUCTION_ANALYZE_HPP_
#define QAUCTION_ANALYZE_HPP_

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qauction/formats.hpp"

namespace qauction {

struct GroupAnalysis {
  int group = 0;
  std::string name;
  double alpha = 0.0;
  std::vector<double> levels;
  int n_runs = 0;
  int n_converged = 0;
  std::optional<double> diagonal_fraction;  // converged runs with equal first two bids
  std::optional<std::pair<double, double>> modal_cell;
  double bin_width = 0.0;
  std::vector<int> revenue_histogram;  // bin k covers [k, k + 1) * bin_width
  int collusive = 0;
  int competitive = 0;
  std::optional<double> mean_revenue;
};

struct AnalysisReport {
  std::vector<GroupAnalysis> groups;
};

AnalysisReport Analyze(const RecordSet& records);
// Reads <dir>/records.jsonl. Fails with a "no records" error when the
// directory holds none.
AnalysisReport AnalyzeDirectory(const std::string& dir);

void PrintAnalysis(std::ostream& out, const AnalysisReport& report);
Json ToJson(const AnalysisReport& report);

}  // namespace qauction

#endif  // QAUCTION_ANALYZE_HPP_
