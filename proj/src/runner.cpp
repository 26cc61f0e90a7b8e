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

#include "qauction/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "qauction/error.hpp"
#include "qauction/random.hpp"
#include "qauction/theory.hpp"

namespace qauction {
namespace {

double LowestPrice(const ExperimentConfig& config) {
  const double front = config.grid.front();
  if (config.mechanism.negative_bid_mode == NegativeBidMode::kNonParticipation) {
    return std::max(front, 0.0);
  }
  return front;
}

// Calls fn(k) for k in [0, n) on up to `threads` workers.
template <typename Fn>
void ParallelFor(int n, int threads, Fn&& fn) {
  threads = std::clamp(threads, 1, std::max(1, n));
  if (threads == 1) {
    for (int k = 0; k < n; ++k) fn(k);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::jthread> workers;
  workers.reserve(threads);
  for (int w = 0; w < threads; ++w) {
    workers.emplace_back([&] {
      for (int k = next.fetch_add(1); k < n; k = next.fetch_add(1)) {
        try {
          fn(k);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  workers.clear();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

void Validate(const ExperimentConfig& config) {
  Validate(config.mechanism, config.grid);
  Require(static_cast<int>(config.agents.size()) == config.mechanism.n_bidders,
          ErrorKind::kInvalidConfig, "need one agent config per bidder");
  for (const auto& agent : config.agents) Validate(agent);
  Require(config.n_runs >= 1, ErrorKind::kInvalidConfig, "n_runs must be at least 1");
  Require(config.convergence_window >= 1, ErrorKind::kInvalidConfig,
          "convergence window must be at least 1");
  Require(config.max_periods >= config.convergence_window, ErrorKind::kInvalidConfig,
          "max_periods must be at least the convergence window");
  Require(config.record.series_stride >= 1, ErrorKind::kInvalidConfig,
          "series stride must be at least 1");
  Require(config.collusion_steps >= 1, ErrorKind::kInvalidConfig,
          "collusion threshold must be at least one grid step");
  for (double alpha : config.sweep_alphas) {
    Require(alpha >= 1.0 && alpha <= 2.0, ErrorKind::kInvalidConfig,
            "sweep alphas must lie in [1, 2]");
  }
  const bool synchronous = std::any_of(config.agents.begin(), config.agents.end(), [](const auto& a) {
    return a.update_mode == UpdateMode::kSynchronous;
  });
  Require(!synchronous || config.mechanism.feedback == Feedback::kMinBidToWin,
          ErrorKind::kFeedbackUnavailable,
          "synchronous updating needs min-bid-to-win feedback");
}

bool CheckConvergence(std::span<const Profile> window) {
  return std::all_of(window.begin(), window.end(),
                     [&](const Profile& p) { return p == window.front(); });
}

RunResult RunEpisode(const ExperimentConfig& config, std::uint64_t seed) {
  Validate(config);
  const auto& grid = config.grid;
  const auto& mech = config.mechanism;
  const int n = mech.n_bidders;
  const int m = grid.count();

  std::vector<QTabled> tables;
  std::vector<Rng> explore;
  tables.reserve(n);
  explore.reserve(n);
  for (int i = 0; i < n; ++i) {
    tables.push_back(InitQ(config.agents[i], grid, mech.value, LowestPrice(config)));
    explore.emplace_back(DeriveSeed(seed, StreamPurpose::kExploration, i));
  }
  Rng tie_rng(DeriveSeed(seed, StreamPurpose::kTieBreak));
  Rng fringe_rng(DeriveSeed(seed, StreamPurpose::kFringe));

  RunResult result;
  result.seed = seed;
  if (config.record.occupancy) result.occupancy.setZero(m, m);

  ConvergenceTracker tracker(config.convergence_window);
  Profile greedy(n), bids(n);
  AuctionOutcomed outcome;
  std::vector<double> levels;
  Eigen::VectorXd hindsight(m);
  double series_sum = 0.0;
  int series_count = 0;

  std::int64_t t = 0;
  for (;; ++t) {
    for (int i = 0; i < n; ++i) greedy[i] = GreedyAction(tables[i]);
    const bool converged = tracker.Observe(greedy);
    if ((converged && config.early_stop) || t == config.max_periods) break;

    for (int i = 0; i < n; ++i) {
      bids[i] = SelectActionFromGreedy(tables[i], greedy[i], tables[i].t, config.agents[i],
                                       explore[i]);
    }
    std::optional<double> fringe_draw;
    if (mech.fringe) fringe_draw = fringe_rng.Uniform(mech.fringe->low, mech.fringe->high);
    ResolveInto<double>(mech, grid, bids, fringe_draw, tie_rng, levels, outcome);

    if (config.record.occupancy) ++result.occupancy(bids[0], bids[1]);
    if (config.record.series) {
      series_sum += outcome.top_bid;
      if (++series_count == config.record.series_stride) {
        result.winning_bid_series.push_back(series_sum / series_count);
        series_sum = 0.0;
        series_count = 0;
      }
    }

    for (int i = 0; i < n; ++i) {
      const auto& agent = config.agents[i];
      if (agent.update_mode == UpdateMode::kAsynchronous) {
        ApplyAsyncUpdate(tables[i], bids[i], outcome.rewards[i], agent);
      } else {
        HindsightRewardsInto<double>(mech, grid, outcome.competing_max[i],
                                     outcome.competing_ties[i], hindsight);
        ApplySyncUpdate(tables[i], hindsight, agent);
      }
    }
  }
  if (series_count > 0) result.winning_bid_series.push_back(series_sum / series_count);

  result.converged = tracker.converged();
  result.periods_elapsed = t;
  result.final_profile = tracker.last();
  const auto expected = ExpectedAtProfile<double>(mech, grid, result.final_profile);
  result.final_revenue = expected.revenue;
  result.final_fringe_revenue = expected.fringe_revenue;
  result.collusive = theory::ClassifyCollusive(result.final_profile, mech, grid,
                                               config.collusion_steps);
  return result;
}

ExperimentSummary Summarize(const ExperimentConfig& config, std::vector<RunResult> runs) {
  const int m = config.grid.count();
  ExperimentSummary summary;
  summary.heatmap.setZero(m, m);
  summary.n_runs = static_cast<int>(runs.size());

  double revenue_sum = 0.0, with_fringe_sum = 0.0;
  int collusive = 0;
  for (const auto& run : runs) {
    if (run.occupancy.size() != 0) {
      if (summary.occupancy.size() == 0) summary.occupancy.setZero(m, m);
      summary.occupancy += run.occupancy;
    }
    if (!run.converged) continue;
    ++summary.n_converged;
    ++summary.heatmap(run.final_profile[0], run.final_profile[1]);
    revenue_sum += run.final_revenue;
    with_fringe_sum += run.final_revenue + run.final_fringe_revenue;
    collusive += run.collusive ? 1 : 0;
  }
  summary.convergence_rate =
      summary.n_runs > 0 ? static_cast<double>(summary.n_converged) / summary.n_runs : 0.0;
  if (summary.n_converged > 0) {
    const double k = summary.n_converged;
    const double mean = revenue_sum / k;
    double squares = 0.0;
    for (const auto& run : runs) {
      if (run.converged) squares += (run.final_revenue - mean) * (run.final_revenue - mean);
    }
    summary.mean_revenue = mean;
    summary.revenue_dispersion = std::sqrt(squares / k);
    summary.mean_revenue_with_fringe = with_fringe_sum / k;
    summary.collusive_fraction = collusive / k;
  }
  if (config.record.profile) summary.runs = std::move(runs);
  return summary;
}

ExperimentSummary RunExperiment(const ExperimentConfig& config, int threads) {
  Validate(config);
  std::vector<RunResult> runs(config.n_runs);
  ParallelFor(config.n_runs, threads, [&](int k) {
    runs[k] = RunEpisode(config, config.base_seed + static_cast<std::uint64_t>(k));
  });
  return Summarize(config, std::move(runs));
}

std::vector<SweepPoint> AlphaSweep(const ExperimentConfig& base,
                                   std::span<const double> alphas, int threads,
                                   std::vector<ExperimentSummary>* summaries) {
  std::vector<SweepPoint> points;
  for (double alpha : alphas) {
    Require(alpha >= 1.0 && alpha <= 2.0, ErrorKind::kInvalidConfig,
            "sweep alphas must lie in [1, 2]");
    ExperimentConfig config = base;
    config.mechanism.alpha = alpha;
    config.sweep_alphas.clear();
    auto summary = RunExperiment(config, threads);
    SweepPoint point;
    point.alpha = alpha;
    point.collusive_fraction = summary.collusive_fraction.value_or(0.0);
    point.convergence_rate = summary.convergence_rate;
    point.n_converged = summary.n_converged;
    point.n_runs = summary.n_runs;
    points.push_back(point);
    if (summaries != nullptr) summaries->push_back(std::move(summary));
  }
  return points;
}

CountMatrix OccupancyRun(const ExperimentConfig& config) {
  ExperimentConfig long_run = config;
  long_run.early_stop = false;
  long_run.record.occupancy = true;
  return RunEpisode(long_run, config.base_seed).occupancy;
}

std::vector<double> MovingAverage(std::span<const double> series, int window) {
  Require(window >= 1, ErrorKind::kInvalidConfig, "moving average window must be >= 1");
  std::vector<double> out(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) {
    const std::size_t start = i + 1 > static_cast<std::size_t>(window) ? i + 1 - window : 0;
    double sum = 0.0;
    for (std::size_t k = start; k <= i; ++k) sum += series[k];
    out[i] = sum / static_cast<double>(i + 1 - start);
  }
  return out;
}

}  // namespace qauction
