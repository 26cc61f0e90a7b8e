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

#include "qauction/formats.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "qauction/error.hpp"

namespace qauction {
namespace {

std::vector<std::string> SplitCsv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double ParseDouble(const std::string& text) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    Fail(ErrorKind::kParse, "not a number: '" + text + "'");
  }
  Require(used == text.size(), ErrorKind::kParse, "trailing characters in '" + text + "'");
  return value;
}

std::int64_t ParseInt(const std::string& text) {
  std::size_t used = 0;
  long long value = 0;
  try {
    value = std::stoll(text, &used);
  } catch (const std::exception&) {
    Fail(ErrorKind::kParse, "not an integer: '" + text + "'");
  }
  Require(used == text.size(), ErrorKind::kParse, "trailing characters in '" + text + "'");
  return value;
}

bool NextLine(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) return true;
  }
  return false;
}

Json OptionalJson(const std::optional<double>& x) { return x ? Json(*x) : Json(nullptr); }

std::optional<double> OptionalFrom(const Json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return j[key].get<double>();
}

std::vector<double> Levels(const BidGridd& grid) {
  return {grid.values().data(), grid.values().data() + grid.count()};
}

}  // namespace

std::string FormatDouble(double x) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.17g", x);
  return buffer;
}

void WriteLevelMatrix(std::ostream& out, const LevelMatrix& matrix) {
  const auto m = static_cast<Eigen::Index>(matrix.levels.size());
  Require(matrix.counts.rows() == m && matrix.counts.cols() == m, ErrorKind::kLengthMismatch,
          "matrix dimensions must match the grid");
  for (Eigen::Index i = 0; i < m; ++i) {
    out << (i ? "," : "") << FormatDouble(matrix.levels[i]);
  }
  out << '\n';
  for (Eigen::Index r = 0; r < m; ++r) {
    for (Eigen::Index c = 0; c < m; ++c) out << (c ? "," : "") << matrix.counts(r, c);
    out << '\n';
  }
}

LevelMatrix ReadLevelMatrix(std::istream& in) {
  LevelMatrix matrix;
  std::string line;
  Require(NextLine(in, line), ErrorKind::kParse, "matrix file is empty");
  for (const auto& cell : SplitCsv(line)) matrix.levels.push_back(ParseDouble(cell));
  const auto m = static_cast<Eigen::Index>(matrix.levels.size());
  Require(m > 0, ErrorKind::kParse, "matrix header lists no grid levels");
  matrix.counts.setZero(m, m);
  for (Eigen::Index r = 0; r < m; ++r) {
    Require(NextLine(in, line), ErrorKind::kParse, "matrix has fewer rows than grid levels");
    const auto cells = SplitCsv(line);
    Require(static_cast<Eigen::Index>(cells.size()) == m, ErrorKind::kParse,
            "matrix row " + std::to_string(r) + " has wrong width");
    for (Eigen::Index c = 0; c < m; ++c) {
      matrix.counts(r, c) = ParseInt(cells[c]);
      Require(matrix.counts(r, c) >= 0, ErrorKind::kParse, "matrix counts must be non-negative");
    }
  }
  Require(!NextLine(in, line), ErrorKind::kParse, "matrix has more rows than grid levels");
  return matrix;
}

RunRecord MakeRunRecord(const ExperimentConfig& config, const RunResult& run, int index,
                        int group) {
  RunRecord record;
  record.group = group;
  record.run = index;
  record.seed = run.seed;
  record.converged = run.converged;
  record.periods = run.periods_elapsed;
  record.profile_index = run.final_profile;
  for (int i : run.final_profile) record.profile.push_back(config.grid[i]);
  record.revenue = run.final_revenue;
  record.fringe_revenue = run.final_fringe_revenue;
  record.collusive = run.collusive;
  return record;
}

ExperimentRecord MakeExperimentRecord(const ExperimentConfig& config,
                                      const ExperimentSummary& summary, int group) {
  ExperimentRecord record;
  record.group = group;
  record.name = config.name;
  record.alpha = config.mechanism.alpha;
  record.levels = Levels(config.grid);
  record.n_runs = summary.n_runs;
  record.n_converged = summary.n_converged;
  record.convergence_rate = summary.convergence_rate;
  record.mean_revenue = summary.mean_revenue;
  record.revenue_dispersion = summary.revenue_dispersion;
  record.mean_revenue_with_fringe = summary.mean_revenue_with_fringe;
  record.collusive_fraction = summary.collusive_fraction;
  record.config = ConfigToJson(config);
  return record;
}

Json ToJson(const RunRecord& r) {
  return Json{{"schema", kRecordSchema},  {"kind", "run"},
              {"group", r.group},         {"run", r.run},
              {"seed", r.seed},           {"converged", r.converged},
              {"periods", r.periods},     {"profile_index", r.profile_index},
              {"profile", r.profile},     {"revenue", r.revenue},
              {"fringe_revenue", r.fringe_revenue}, {"collusive", r.collusive}};
}

Json ToJson(const ExperimentRecord& r) {
  return Json{{"schema", kRecordSchema},
              {"kind", "experiment"},
              {"group", r.group},
              {"name", r.name},
              {"alpha", r.alpha},
              {"levels", r.levels},
              {"n_runs", r.n_runs},
              {"n_converged", r.n_converged},
              {"convergence_rate", r.convergence_rate},
              {"mean_revenue", OptionalJson(r.mean_revenue)},
              {"revenue_dispersion", OptionalJson(r.revenue_dispersion)},
              {"mean_revenue_with_fringe", OptionalJson(r.mean_revenue_with_fringe)},
              {"collusive_fraction", OptionalJson(r.collusive_fraction)},
              {"config", r.config}};
}

void WriteRecordLine(std::ostream& out, const Json& record) { out << record.dump() << '\n'; }

RecordSet ReadRecords(std::istream& in) {
  RecordSet set;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    const std::string where = "record line " + std::to_string(line_number);
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::exception& e) {
      Fail(ErrorKind::kParse, where + ": " + e.what());
    }
    try {
      Require(j.value("schema", "") == kRecordSchema, ErrorKind::kParse,
              where + ": unsupported schema");
      const std::string kind = j.at("kind").get<std::string>();
      if (kind == "run") {
        RunRecord r;
        r.group = j.at("group").get<int>();
        r.run = j.at("run").get<int>();
        r.seed = j.at("seed").get<std::uint64_t>();
        r.converged = j.at("converged").get<bool>();
        r.periods = j.at("periods").get<std::int64_t>();
        r.profile_index = j.at("profile_index").get<std::vector<int>>();
        r.profile = j.at("profile").get<std::vector<double>>();
        r.revenue = j.at("revenue").get<double>();
        r.fringe_revenue = j.at("fringe_revenue").get<double>();
        r.collusive = j.at("collusive").get<bool>();
        set.runs.push_back(std::move(r));
      } else if (kind == "experiment") {
        ExperimentRecord r;
        r.group = j.at("group").get<int>();
        r.name = j.at("name").get<std::string>();
        r.alpha = j.at("alpha").get<double>();
        r.levels = j.at("levels").get<std::vector<double>>();
        r.n_runs = j.at("n_runs").get<int>();
        r.n_converged = j.at("n_converged").get<int>();
        r.convergence_rate = j.at("convergence_rate").get<double>();
        r.mean_revenue = OptionalFrom(j, "mean_revenue");
        r.revenue_dispersion = OptionalFrom(j, "revenue_dispersion");
        r.mean_revenue_with_fringe = OptionalFrom(j, "mean_revenue_with_fringe");
        r.collusive_fraction = OptionalFrom(j, "collusive_fraction");
        r.config = j.at("config");
        set.experiments.push_back(std::move(r));
      } else {
        Fail(ErrorKind::kParse, where + ": unknown record kind '" + kind + "'");
      }
    } catch (const Json::exception& e) {
      Fail(ErrorKind::kParse, where + ": " + e.what());
    }
  }
  return set;
}

void WriteSeries(std::ostream& out, std::span<const RunResult> runs, int stride) {
  out << "run,sample,period_end,winning_bid\n";
  for (std::size_t k = 0; k < runs.size(); ++k) {
    const auto& series = runs[k].winning_bid_series;
    for (std::size_t s = 0; s < series.size(); ++s) {
      const std::int64_t end =
          std::min<std::int64_t>(static_cast<std::int64_t>(s + 1) * stride,
                                 runs[k].periods_elapsed);
      out << k << ',' << s << ',' << end << ',' << FormatDouble(series[s]) << '\n';
    }
  }
}

std::vector<SeriesRow> ReadSeries(std::istream& in) {
  std::string line;
  Require(NextLine(in, line) && line == "run,sample,period_end,winning_bid", ErrorKind::kParse,
          "series file lacks its header");
  std::vector<SeriesRow> rows;
  while (NextLine(in, line)) {
    const auto cells = SplitCsv(line);
    Require(cells.size() == 4, ErrorKind::kParse, "series row must have 4 columns");
    rows.push_back({static_cast<int>(ParseInt(cells[0])), static_cast<int>(ParseInt(cells[1])),
                    ParseInt(cells[2]), ParseDouble(cells[3])});
  }
  return rows;
}

void WriteSweep(std::ostream& out, std::span<const SweepPoint> points) {
  out << "alpha,collusive_fraction,convergence_rate,converged_runs,runs\n";
  for (const auto& p : points) {
    out << FormatDouble(p.alpha) << ',' << FormatDouble(p.collusive_fraction) << ','
        << FormatDouble(p.convergence_rate) << ',' << p.n_converged << ',' << p.n_runs << '\n';
  }
}

std::vector<SweepPoint> ReadSweep(std::istream& in) {
  std::string line;
  Require(NextLine(in, line) && line == "alpha,collusive_fraction,convergence_rate,converged_runs,runs",
          ErrorKind::kParse, "sweep file lacks its header");
  std::vector<SweepPoint> points;
  while (NextLine(in, line)) {
    const auto cells = SplitCsv(line);
    Require(cells.size() == 5, ErrorKind::kParse, "sweep row must have 5 columns");
    SweepPoint p;
    p.alpha = ParseDouble(cells[0]);
    p.collusive_fraction = ParseDouble(cells[1]);
    p.convergence_rate = ParseDouble(cells[2]);
    p.n_converged = static_cast<int>(ParseInt(cells[3]));
    p.n_runs = static_cast<int>(ParseInt(cells[4]));
    points.push_back(p);
  }
  return points;
}

}  // namespace qauction
