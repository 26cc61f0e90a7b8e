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

#include "qauction/analyze.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>

#include "qauction/error.hpp"

namespace qauction {

AnalysisReport Analyze(const RecordSet& records) {
  Require(!records.runs.empty(), ErrorKind::kParse, "no records: no run records found");
  std::map<int, const ExperimentRecord*> experiments;
  for (const auto& e : records.experiments) experiments[e.group] = &e;

  std::map<int, GroupAnalysis> groups;
  std::map<int, std::map<std::pair<int, int>, int>> cells;
  std::map<int, double> revenue_sums;
  for (const auto& run : records.runs) {
    auto [it, inserted] = groups.try_emplace(run.group);
    GroupAnalysis& g = it->second;
    if (inserted) {
      g.group = run.group;
      const auto e = experiments.find(run.group);
      Require(e != experiments.end(), ErrorKind::kParse,
              "no records: run group " + std::to_string(run.group) +
                  " has no experiment record");
      g.name = e->second->name;
      g.alpha = e->second->alpha;
      g.levels = e->second->levels;
      Require(g.levels.size() >= 2, ErrorKind::kParse, "experiment record lists no grid");
      g.bin_width = g.levels[1] - g.levels[0];
      const double top = std::max(g.levels.back(), 0.0) + g.bin_width;
      g.revenue_histogram.assign(static_cast<std::size_t>(std::ceil(top / g.bin_width - 1e-9)), 0);
    }
    ++g.n_runs;
    if (!run.converged) continue;
    ++g.n_converged;
    Require(run.profile_index.size() >= 2 && run.profile.size() >= 2, ErrorKind::kParse,
            "run record profile needs two bidders");
    ++cells[run.group][{run.profile_index[0], run.profile_index[1]}];
    revenue_sums[run.group] += run.revenue;
    (run.collusive ? g.collusive : g.competitive) += 1;
    const auto bin = static_cast<long>(std::floor(run.revenue / g.bin_width + 1e-9));
    const auto clamped =
        std::clamp<long>(bin, 0, static_cast<long>(g.revenue_histogram.size()) - 1);
    ++g.revenue_histogram[clamped];
  }

  AnalysisReport report;
  for (auto& [group, g] : groups) {
    if (g.n_converged > 0) {
      int diagonal = 0, best = -1;
      for (const auto& [cell, count] : cells[group]) {
        if (cell.first == cell.second) diagonal += count;
        if (count > best) {
          best = count;
          g.modal_cell = std::pair{g.levels.at(cell.first), g.levels.at(cell.second)};
        }
      }
      g.diagonal_fraction = static_cast<double>(diagonal) / g.n_converged;
      g.mean_revenue = revenue_sums[group] / g.n_converged;
    }
    report.groups.push_back(std::move(g));
  }
  return report;
}

AnalysisReport AnalyzeDirectory(const std::string& dir) {
  namespace fs = std::filesystem;
  Require(fs::is_directory(dir), ErrorKind::kIo, "no records: '" + dir + "' is not a directory");
  const fs::path path = fs::path(dir) / "records.jsonl";
  Require(fs::exists(path), ErrorKind::kIo, "no records: '" + path.string() + "' not found");
  std::ifstream in(path);
  Require(static_cast<bool>(in), ErrorKind::kIo, "cannot read '" + path.string() + "'");
  return Analyze(ReadRecords(in));
}

void PrintAnalysis(std::ostream& out, const AnalysisReport& report) {
  for (const auto& g : report.groups) {
    out << "experiment " << g.name << " (group " << g.group << ", alpha "
        << FormatDouble(g.alpha) << ")\n";
    out << "  runs " << g.n_runs << ", converged " << g.n_converged << '\n';
    if (g.mean_revenue) out << "  mean revenue " << FormatDouble(*g.mean_revenue) << '\n';
    if (g.diagonal_fraction) {
      out << "  diagonal mass fraction " << FormatDouble(*g.diagonal_fraction) << '\n';
    }
    if (g.modal_cell) {
      out << "  modal cell (" << FormatDouble(g.modal_cell->first) << ", "
          << FormatDouble(g.modal_cell->second) << ")\n";
    }
    out << "  collusion: collusive " << g.collusive << ", competitive " << g.competitive
        << '\n';
    out << "  revenue histogram (bin_low,count)\n";
    for (std::size_t k = 0; k < g.revenue_histogram.size(); ++k) {
      if (g.revenue_histogram[k] == 0) continue;
      out << "    " << FormatDouble(static_cast<double>(k) * g.bin_width) << ','
          << g.revenue_histogram[k] << '\n';
    }
  }
}

Json ToJson(const AnalysisReport& report) {
  Json groups = Json::array();
  for (const auto& g : report.groups) {
    Json j{{"group", g.group},
           {"name", g.name},
           {"alpha", g.alpha},
           {"n_runs", g.n_runs},
           {"n_converged", g.n_converged},
           {"diagonal_fraction", g.diagonal_fraction ? Json(*g.diagonal_fraction) : Json(nullptr)},
           {"modal_cell", g.modal_cell ? Json{g.modal_cell->first, g.modal_cell->second}
                                       : Json(nullptr)},
           {"mean_revenue", g.mean_revenue ? Json(*g.mean_revenue) : Json(nullptr)},
           {"collusive", g.collusive},
           {"competitive", g.competitive},
           {"bin_width", g.bin_width},
           {"revenue_histogram", g.revenue_histogram}};
    groups.push_back(std::move(j));
  }
  return Json{{"groups", groups}};
}

}  // namespace qauction
