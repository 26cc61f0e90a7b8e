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

#ifndef QAUCTION_RUNNER_HPP_
#define QAUCTION_RUNNER_HPP_

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qauction/agent.hpp"
#include "qauction/grid.hpp"
#include "qauction/mechanism.hpp"

namespace qauction {

using CountMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

struct RecordSpec {
  bool occupancy = false;
  bool series = false;
  int series_stride = 100;  // periods averaged into one series sample
  bool profile = true;

  bool operator==(const RecordSpec&) const = default;
};

struct ExperimentConfig {
  std::string name;
  MechanismConfig mechanism;
  BidGridd grid = BidGridd::Uniform(19);
  std::vector<AgentConfig> agents;  // one per bidder
  std::int64_t max_periods = 1'000'000;
  std::int64_t convergence_window = 1000;
  int n_runs = 1;
  std::uint64_t base_seed = 0;
  bool early_stop = true;
  RecordSpec record;
  std::vector<double> sweep_alphas;  // non-empty: run an alpha sweep
  int collusion_steps = 1;

  bool operator==(const ExperimentConfig&) const = default;
};

void Validate(const ExperimentConfig& config);

using Profile = std::vector<int>;

struct RunResult {
  std::uint64_t seed = 0;
  bool converged = false;
  std::int64_t periods_elapsed = 0;
  Profile final_profile;        // grid indices
  double final_revenue = 0.0;   // strategic payments at the final profile
  double final_fringe_revenue = 0.0;
  bool collusive = false;
  CountMatrix occupancy;        // first two bidders; empty unless recorded
  std::vector<double> winning_bid_series;

  bool operator==(const RunResult&) const = default;
};

struct ExperimentSummary {
  CountMatrix heatmap;  // converged profiles of the first two bidders
  int n_runs = 0;
  int n_converged = 0;
  double convergence_rate = 0.0;
  std::optional<double> mean_revenue;
  std::optional<double> revenue_dispersion;  // population standard deviation
  std::optional<double> mean_revenue_with_fringe;
  std::optional<double> collusive_fraction;
  CountMatrix occupancy;  // summed over runs when recorded
  std::vector<RunResult> runs;

  bool operator==(const ExperimentSummary&) const = default;
};

// True iff every profile in the window is identical.
bool CheckConvergence(std::span<const Profile> window);

// Streaming form of CheckConvergence over a sliding window.
class ConvergenceTracker {
 public:
  explicit ConvergenceTracker(std::int64_t window) : window_(window) {}

  // Records one greedy profile; returns whether the last `window` agree.
  bool Observe(const Profile& profile) {
    if (streak_ > 0 && profile == last_) {
      ++streak_;
    } else {
      last_ = profile;
      streak_ = 1;
    }
    return converged();
  }

  bool converged() const { return streak_ >= window_; }
  std::int64_t streak() const { return streak_; }
  const Profile& last() const { return last_; }

 private:
  std::int64_t window_;
  std::int64_t streak_ = 0;
  Profile last_;
};

RunResult RunEpisode(const ExperimentConfig& config, std::uint64_t seed);

// Runs base_seed + k for k < n_runs on `threads` workers; the result does not
// depend on the thread count.
ExperimentSummary RunExperiment(const ExperimentConfig& config, int threads = 1);

ExperimentSummary Summarize(const ExperimentConfig& config, std::vector<RunResult> runs);

struct SweepPoint {
  double alpha = 0.0;
  double collusive_fraction = 0.0;  // over converged runs
  double convergence_rate = 0.0;
  int n_converged = 0;
  int n_runs = 0;

  bool operator==(const SweepPoint&) const = default;
};

std::vector<SweepPoint> AlphaSweep(const ExperimentConfig& base,
                                   std::span<const double> alphas, int threads = 1,
                                   std::vector<ExperimentSummary>* summaries = nullptr);

// Single long run (seed = base_seed) with early stopping disabled.
CountMatrix OccupancyRun(const ExperimentConfig& config);

// Trailing mean; the first window - 1 entries average the available prefix.
std::vector<double> MovingAverage(std::span<const double> series, int window);

}  // namespace qauction

#endif  // QAUCTION_RUNNER_HPP_
