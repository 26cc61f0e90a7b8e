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

#include "qauction/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "qauction/analyze.hpp"
#include "qauction/config.hpp"
#include "qauction/error.hpp"
#include "qauction/formats.hpp"
#include "qauction/runner.hpp"
#include "qauction/theory.hpp"

namespace qauction {
namespace {

namespace fs = std::filesystem;

struct RunOptions {
  std::string preset;
  std::string config_path;
  std::string out_dir = "qauction-out";
  std::optional<int> runs;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> periods;
  int threads = 0;
  std::vector<std::string> overrides;
};

ExperimentConfig ResolveConfig(const RunOptions& options) {
  Require(options.preset.empty() != options.config_path.empty(), ErrorKind::kInvalidConfig,
          "give exactly one of --preset or --config");
  Json doc;
  if (!options.preset.empty()) {
    doc = PresetDocument(options.preset);
  } else {
    std::ifstream in(options.config_path);
    Require(static_cast<bool>(in), ErrorKind::kIo,
            "cannot read config '" + options.config_path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    try {
      doc = Json::parse(buffer.str(), nullptr, true, /*ignore_comments=*/true);
    } catch (const Json::exception& e) {
      Fail(ErrorKind::kParse, std::string("config is not valid JSON: ") + e.what());
    }
  }
  for (const auto& assignment : options.overrides) ApplyOverride(doc, assignment);
  if (options.runs) doc["run"]["n_runs"] = *options.runs;
  if (options.seed) doc["run"]["base_seed"] = *options.seed;
  if (options.periods) doc["run"]["max_periods"] = *options.periods;
  return ConfigFromJson(doc);
}

std::ofstream OpenOutput(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  Require(static_cast<bool>(out), ErrorKind::kIo, "cannot write '" + path.string() + "'");
  return out;
}

void CloseOutput(std::ofstream& out, const fs::path& path) {
  out.close();
  Require(!out.fail(), ErrorKind::kIo, "failed writing '" + path.string() + "'");
}

std::string OptionalText(const std::optional<double>& x) {
  return x ? FormatDouble(*x) : std::string("n/a");
}

std::string Digest(const ExperimentConfig& config, const ExperimentSummary& summary) {
  std::ostringstream line;
  line << config.name << ": alpha=" << FormatDouble(config.mechanism.alpha)
       << " runs=" << summary.n_runs << " converged=" << summary.n_converged
       << " convergence_rate=" << FormatDouble(summary.convergence_rate)
       << " mean_revenue=" << OptionalText(summary.mean_revenue)
       << " revenue_dispersion=" << OptionalText(summary.revenue_dispersion)
       << " collusive_fraction=" << OptionalText(summary.collusive_fraction);
  if (config.mechanism.fringe) {
    line << " mean_revenue_with_fringe=" << OptionalText(summary.mean_revenue_with_fringe);
  }
  return line.str();
}

void WriteMatrixFile(const fs::path& path, const BidGridd& grid, const CountMatrix& counts) {
  auto out = OpenOutput(path);
  WriteLevelMatrix(out, {{grid.values().data(), grid.values().data() + grid.count()}, counts});
  CloseOutput(out, path);
}

void WriteExperimentOutputs(const fs::path& dir, const std::string& suffix,
                            const ExperimentConfig& config, const ExperimentSummary& summary,
                            std::ofstream& records, int group) {
  for (std::size_t k = 0; k < summary.runs.size(); ++k) {
    WriteRecordLine(records,
                    ToJson(MakeRunRecord(config, summary.runs[k], static_cast<int>(k), group)));
  }
  WriteRecordLine(records, ToJson(MakeExperimentRecord(config, summary, group)));
  WriteMatrixFile(dir / ("heatmap" + suffix + ".csv"), config.grid, summary.heatmap);
  if (config.record.occupancy && summary.occupancy.size() != 0) {
    WriteMatrixFile(dir / ("occupancy" + suffix + ".csv"), config.grid, summary.occupancy);
  }
  if (config.record.series) {
    const fs::path path = dir / ("series" + suffix + ".csv");
    auto out = OpenOutput(path);
    WriteSeries(out, summary.runs, config.record.series_stride);
    CloseOutput(out, path);
  }
}

int CommandRun(const RunOptions& options, bool sweep, std::ostream& out) {
  ExperimentConfig config = ResolveConfig(options);
  if (sweep && config.sweep_alphas.empty()) {
    for (int k = 0; k <= 10; ++k) config.sweep_alphas.push_back(1.0 + 0.1 * k);
  }
  const int threads = options.threads > 0
                          ? options.threads
                          : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

  const fs::path dir(options.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  Require(!ec && fs::is_directory(dir), ErrorKind::kIo,
          "cannot create output directory '" + dir.string() + "'");
  const fs::path records_path = dir / "records.jsonl";
  auto records = OpenOutput(records_path);

  if (config.sweep_alphas.empty()) {
    const auto summary = RunExperiment(config, threads);
    WriteExperimentOutputs(dir, "", config, summary, records, 0);
    CloseOutput(records, records_path);
    out << Digest(config, summary) << '\n';
    return 0;
  }

  std::vector<ExperimentSummary> summaries;
  const auto points = AlphaSweep(config, config.sweep_alphas, threads, &summaries);
  for (std::size_t g = 0; g < points.size(); ++g) {
    ExperimentConfig point_config = config;
    point_config.mechanism.alpha = points[g].alpha;
    point_config.sweep_alphas.clear();
    char suffix[16];
    std::snprintf(suffix, sizeof(suffix), "_%02zu", g);
    WriteExperimentOutputs(dir, suffix, point_config, summaries[g], records,
                           static_cast<int>(g));
    out << Digest(point_config, summaries[g]) << '\n';
  }
  CloseOutput(records, records_path);
  const fs::path sweep_path = dir / "sweep.csv";
  auto sweep_out = OpenOutput(sweep_path);
  WriteSweep(sweep_out, points);
  CloseOutput(sweep_out, sweep_path);
  WriteSweep(out, points);
  return 0;
}

int CommandTheory(int m, bool json, std::ostream& out) {
  const auto r = theory::MakeThresholdReport(m);
  if (json) {
    out << Json{{"m", r.m},
                {"gamma_sse_fpa", r.gamma_sse_fpa},
                {"gamma_sse_spa", r.gamma_sse_spa},
                {"gamma_brs_fpa", r.gamma_brs_fpa},
                {"gamma_brs_spa", r.gamma_brs_spa},
                {"limit_sse_fpa", r.limit_sse_fpa},
                {"limit_sse_spa", r.limit_sse_spa},
                {"limit_brs_fpa", r.limit_brs_fpa},
                {"limit_brs_spa", r.limit_brs_spa}}
               .dump(2)
        << '\n';
    return 0;
  }
  out << "m " << r.m << '\n'
      << "gamma_sse_fpa " << FormatDouble(r.gamma_sse_fpa) << '\n'
      << "gamma_sse_spa " << FormatDouble(r.gamma_sse_spa) << '\n'
      << "gamma_brs_fpa " << FormatDouble(r.gamma_brs_fpa) << '\n'
      << "gamma_brs_spa " << FormatDouble(r.gamma_brs_spa) << '\n'
      << "limit_sse_fpa " << FormatDouble(r.limit_sse_fpa) << '\n'
      << "limit_sse_spa " << FormatDouble(r.limit_sse_spa) << '\n'
      << "limit_brs_fpa " << FormatDouble(r.limit_brs_fpa) << '\n'
      << "limit_brs_spa " << FormatDouble(r.limit_brs_spa) << '\n';
  return 0;
}

void AddRunOptions(CLI::App* cmd, RunOptions& options) {
  cmd->add_option("--preset", options.preset, "Named experiment preset");
  cmd->add_option("--config", options.config_path, "Path to a JSON config document");
  cmd->add_option("--out", options.out_dir, "Output directory")->capture_default_str();
  cmd->add_option("--runs", options.runs, "Number of runs (run.n_runs)");
  cmd->add_option("--seed", options.seed, "Base seed (run.base_seed)");
  cmd->add_option("--periods", options.periods, "Horizon per run (run.max_periods)");
  cmd->add_option("--threads", options.threads, "Worker threads, 0 = all cores");
  cmd->add_option("--override", options.overrides, "Config override key=value")
      ->allow_extra_args(false);
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Repeated alpha-price auctions played by tabular Q-learning bidders", "qauction"};
  app.require_subcommand(1);

  RunOptions run_options;
  auto* run = app.add_subcommand("run", "Run an experiment and write its outputs");
  AddRunOptions(run, run_options);
  RunOptions sweep_options;
  auto* sweep = app.add_subcommand("sweep", "Run an alpha sweep (default alphas 1.0..2.0)");
  AddRunOptions(sweep, sweep_options);

  int m = 19;
  bool theory_json = false;
  auto* theory_cmd = app.add_subcommand("theory", "Print repeated-game discount thresholds");
  theory_cmd->add_option("m,--m", m, "Number of grid levels")->capture_default_str();
  theory_cmd->add_flag("--json", theory_json, "Emit JSON");

  std::string input_dir;
  bool analyze_json = false;
  auto* analyze = app.add_subcommand("analyze", "Summarize a run output directory");
  analyze->add_option("input,--input", input_dir, "Directory holding records.jsonl")->required();
  analyze->add_flag("--json", analyze_json, "Emit JSON");

  auto* presets = app.add_subcommand("presets", "List the built-in presets");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*run) return CommandRun(run_options, false, out);
    if (*sweep) return CommandRun(sweep_options, true, out);
    if (*theory_cmd) return CommandTheory(m, theory_json, out);
    if (*analyze) {
      const auto report = AnalyzeDirectory(input_dir);
      if (analyze_json) {
        out << ToJson(report).dump(2) << '\n';
      } else {
        PrintAnalysis(out, report);
      }
      return 0;
    }
    if (*presets) {
      for (const auto& name : PresetNames()) out << name << '\n';
      return 0;
    }
  } catch (const Error& e) {
    err << "qauction: " << e.what() << '\n';
    return e.kind() == ErrorKind::kIo ? 2 : 1;
  } catch (const std::exception& e) {
    err << "qauction: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace qauction
