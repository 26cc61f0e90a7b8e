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

#ifndef QAUCTION_FORMATS_HPP_
#define QAUCTION_FORMATS_HPP_

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qauction/config.hpp"
#include "qauction/runner.hpp"

namespace qauction {

inline constexpr const char* kRecordSchema = "qauction.records/1";

// %.17g; enough digits for an exact round trip.
std::string FormatDouble(double x);

// Grid-indexed count matrix (heatmap or occupancy): a header line with the
// m grid levels, then m rows of m counts. Row = bidder 1 bid index,
// column = bidder 2 bid index, both ascending.
struct LevelMatrix {
  std::vector<double> levels;
  CountMatrix counts;

  bool operator==(const LevelMatrix&) const = default;
};

void WriteLevelMatrix(std::ostream& out, const LevelMatrix& matrix);
LevelMatrix ReadLevelMatrix(std::istream& in);

// One line-delimited JSON record per run plus one per experiment.
struct RunRecord {
  int group = 0;  // sweep point index, 0 for plain experiments
  int run = 0;
  std::uint64_t seed = 0;
  bool converged = false;
  std::int64_t periods = 0;
  std::vector<int> profile_index;
  std::vector<double> profile;
  double revenue = 0.0;
  double fringe_revenue = 0.0;
  bool collusive = false;

  bool operator==(const RunRecord&) const = default;
};

struct ExperimentRecord {
  int group = 0;
  std::string name;
  double alpha = 0.0;
  std::vector<double> levels;
  int n_runs = 0;
  int n_converged = 0;
  double convergence_rate = 0.0;
  std::optional<double> mean_revenue;
  std::optional<double> revenue_dispersion;
  std::optional<double> mean_revenue_with_fringe;
  std::optional<double> collusive_fraction;
  Json config;

  bool operator==(const ExperimentRecord&) const = default;
};

struct RecordSet {
  std::vector<RunRecord> runs;
  std::vector<ExperimentRecord> experiments;

  bool operator==(const RecordSet&) const = default;
};

RunRecord MakeRunRecord(const ExperimentConfig& config, const RunResult& run, int index,
                        int group = 0);
ExperimentRecord MakeExperimentRecord(const ExperimentConfig& config,
                                      const ExperimentSummary& summary, int group = 0);

Json ToJson(const RunRecord& record);
Json ToJson(const ExperimentRecord& record);
void WriteRecordLine(std::ostream& out, const Json& record);
RecordSet ReadRecords(std::istream& in);

// run,sample,period_end,winning_bid
void WriteSeries(std::ostream& out, std::span<const RunResult> runs, int stride);
struct SeriesRow {
  int run = 0;
  int sample = 0;
  std::int64_t period_end = 0;
  double winning_bid = 0.0;
  bool operator==(const SeriesRow&) const = default;
};
std::vector<SeriesRow> ReadSeries(std::istream& in);

// alpha,collusive_fraction,convergence_rate,converged_runs,runs
void WriteSweep(std::ostream& out, std::span<const SweepPoint> points);
std::vector<SweepPoint> ReadSweep(std::istream& in);

}  // namespace qauction

#endif  // QAUCTION_FORMATS_HPP_
