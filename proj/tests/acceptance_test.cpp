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

// Acceptance checks at desk scale. Prints one PASS/FAIL line per criterion
// and exits nonzero if any criterion fails. An optional argument restricts
// the run to criteria whose name contains it.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "qauction/agent.hpp"
#include "qauction/config.hpp"
#include "qauction/mechanism.hpp"
#include "qauction/runner.hpp"
#include "qauction/theory.hpp"

namespace qauction {
namespace {

// Pinned thresholds.
constexpr int kBaselineRuns = 100;
constexpr double kSpaMinConverged = 0.90;
constexpr double kSpaMinAtNash = 0.90;
constexpr double kSpaRevenue = 0.95;
constexpr double kSpaRevenueTol = 0.02;
constexpr double kFpaRevenue = 0.24;
constexpr double kFpaRevenueTol = 0.08;
constexpr int kSweepRuns = 50;
constexpr double kSweepMaxSpearman = -0.9;
constexpr double kSweepEndpointTol = 0.10;
constexpr int kSyncRuns = 100;
constexpr double kSyncMinHigh = 0.80;
constexpr double kSyncHighBid = 0.90;
constexpr int kBiasedSeeds = 20;
constexpr int kBiasedWindowPeriods = 1000;
constexpr double kBiasedSpaAbove = 0.90;
constexpr double kBiasedFpaBelow = 0.50;
constexpr std::int64_t kOccupancyPeriods = 10'000'000;
constexpr double kOccupancyFpaMaxBid = 0.5;
constexpr double kTheoryTol = 1e-12;
constexpr double kFixedPointTol = 1e-9;
constexpr int kExtensionRuns = 100;
constexpr double kReserve = 0.2;
constexpr double kFringeMinModalBid = 0.5;
constexpr int kThreeBidderRuns = 50;

int Threads() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Detail {
 public:
  template <typename T>
  Detail& operator()(const std::string& key, const T& value) {
    if (text_.tellp() > 0) text_ << ' ';
    text_ << key << '=' << value;
    return *this;
  }
  std::string str() const { return text_.str(); }

 private:
  std::ostringstream text_;
};

ExperimentConfig Preset(const std::string& name, int runs) {
  auto config = LoadPreset(name);
  config.n_runs = runs;
  return config;
}

double Share(std::int64_t part, std::int64_t whole) {
  return whole > 0 ? static_cast<double>(part) / static_cast<double>(whole) : 0.0;
}

// Shared between the SPA and FPA baseline criteria.
const ExperimentSummary& SpaBaseline() {
  static const ExperimentSummary summary = RunExperiment(Preset("baseline-spa", kBaselineRuns), Threads());
  return summary;
}
const ExperimentSummary& FpaBaseline() {
  static const ExperimentSummary summary = RunExperiment(Preset("baseline-fpa", kBaselineRuns), Threads());
  return summary;
}

Outcome SpaBaselineCriterion() {
  const auto& s = SpaBaseline();
  const int top = static_cast<int>(s.heatmap.rows()) - 1;
  const double at_nash = Share(s.heatmap(top, top), s.n_converged);
  const double mean = s.mean_revenue.value_or(NAN);
  Outcome o;
  o.pass = s.convergence_rate >= kSpaMinConverged && at_nash >= kSpaMinAtNash &&
           std::abs(mean - kSpaRevenue) <= kSpaRevenueTol;
  o.detail = Detail()("runs", s.n_runs)("convergence_rate", s.convergence_rate)(
                 "share_at_0.95", at_nash)("mean_revenue", mean)
                 .str();
  return o;
}

Outcome FpaBaselineCriterion() {
  const auto& f = FpaBaseline();
  const auto& s = SpaBaseline();
  const double diagonal = Share(f.heatmap.diagonal().sum(), f.n_converged);
  const double mean = f.mean_revenue.value_or(NAN);
  const double fpa_sd = f.revenue_dispersion.value_or(NAN);
  const double spa_sd = s.revenue_dispersion.value_or(NAN);
  Outcome o;
  o.pass = f.n_converged > 0 && diagonal == 1.0 &&
           std::abs(mean - kFpaRevenue) <= kFpaRevenueTol && fpa_sd > spa_sd;
  o.detail = Detail()("runs", f.n_runs)("converged", f.n_converged)("diagonal_share", diagonal)(
                 "mean_revenue", mean)("dispersion_fpa", fpa_sd)("dispersion_spa", spa_sd)
                 .str();
  return o;
}

std::vector<double> AverageRanks(const std::vector<double>& x) {
  std::vector<int> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double Spearman(const std::vector<double>& x, const std::vector<double>& y) {
  const auto rx = AverageRanks(x);
  const auto ry = AverageRanks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return sxx > 0 && syy > 0 ? sxy / std::sqrt(sxx * syy) : NAN;
}

Outcome AlphaSweepCriterion() {
  const auto config = Preset("alpha-sweep", kSweepRuns);
  const auto points = AlphaSweep(config, config.sweep_alphas, Threads());
  std::vector<double> alphas, fractions;
  std::ostringstream series;
  for (const auto& p : points) {
    alphas.push_back(p.alpha);
    fractions.push_back(p.collusive_fraction);
    series << (series.tellp() == 0 ? "" : ",") << p.collusive_fraction;
  }
  const double rho = Spearman(alphas, fractions);
  Outcome o;
  o.pass = points.size() == 11 && rho <= kSweepMaxSpearman &&
           std::abs(fractions.front() - 1.0) <= kSweepEndpointTol &&
           std::abs(fractions.back()) <= kSweepEndpointTol;
  o.detail = Detail()("runs_per_alpha", kSweepRuns)("spearman", rho)("fractions", series.str()).str();
  return o;
}

Outcome SyncCriterion() {
  const auto config = Preset("sync-fpa", kSyncRuns);
  const auto s = RunExperiment(config, Threads());
  int high = 0;
  for (const auto& run : s.runs) {
    if (!run.converged) continue;
    high += config.grid[run.final_profile[0]] >= kSyncHighBid - config.grid.tolerance() &&
            config.grid[run.final_profile[1]] >= kSyncHighBid - config.grid.tolerance();
  }
  const double share = Share(high, s.n_converged);
  Outcome o;
  o.pass = s.n_converged > 0 && share >= kSyncMinHigh;
  o.detail = Detail()("runs", s.n_runs)("converged", s.n_converged)("share_both_ge_0.90", share).str();
  return o;
}

double FinalMovingAverage(const ExperimentConfig& config, std::uint64_t seed) {
  const auto run = RunEpisode(config, seed);
  const int window = std::max(1, kBiasedWindowPeriods / config.record.series_stride);
  const auto ma = MovingAverage(run.winning_bid_series, window);
  return ma.empty() ? NAN : ma.back();
}

Outcome BiasedInitCriterion() {
  auto fpa = LoadPreset("biased-init");
  fpa.mechanism.alpha = 1.0;
  auto spa = fpa;
  spa.mechanism.alpha = 2.0;
  std::vector<double> fpa_end(kBiasedSeeds), spa_end(kBiasedSeeds);
  std::vector<std::jthread> workers;
  for (int w = 0; w < Threads(); ++w) {
    workers.emplace_back([&, w] {
      for (int k = w; k < kBiasedSeeds; k += Threads()) {
        fpa_end[k] = FinalMovingAverage(fpa, fpa.base_seed + k);
        spa_end[k] = FinalMovingAverage(spa, spa.base_seed + k);
      }
    });
  }
  workers.clear();
  int both = 0;
  for (int k = 0; k < kBiasedSeeds; ++k) {
    both += spa_end[k] > kBiasedSpaAbove && fpa_end[k] < kBiasedFpaBelow;
  }
  Outcome o;
  o.pass = 2 * both > kBiasedSeeds;
  o.detail = Detail()("seeds", kBiasedSeeds)("periods", fpa.max_periods)("seeds_meeting_both", both)(
                 "fpa_max_end", *std::max_element(fpa_end.begin(), fpa_end.end()))(
                 "spa_min_end", *std::min_element(spa_end.begin(), spa_end.end()))
                 .str();
  return o;
}

std::pair<int, int> ModalCell(const CountMatrix& counts) {
  Eigen::Index r = 0, c = 0;
  counts.maxCoeff(&r, &c);
  return {static_cast<int>(r), static_cast<int>(c)};
}

Outcome OccupancyCriterion() {
  auto fpa = LoadPreset("occupancy");
  fpa.max_periods = kOccupancyPeriods;
  fpa.mechanism.alpha = 1.0;
  auto spa = fpa;
  spa.mechanism.alpha = 2.0;
  CountMatrix fpa_counts, spa_counts;
  {
    std::jthread a([&] { fpa_counts = OccupancyRun(fpa); });
    std::jthread b([&] { spa_counts = OccupancyRun(spa); });
  }
  const auto [fr, fc] = ModalCell(fpa_counts);
  const auto [sr, sc] = ModalCell(spa_counts);
  const int top = fpa.grid.count() - 1;
  const double tol = fpa.grid.tolerance();
  Outcome o;
  o.pass = sr == top && sc == top && fr == fc && fpa.grid[fr] <= kOccupancyFpaMaxBid + tol &&
           fpa_counts.sum() == kOccupancyPeriods && spa_counts.sum() == kOccupancyPeriods;
  std::ostringstream fpa_cell, spa_cell;
  fpa_cell << '(' << fpa.grid[fr] << ',' << fpa.grid[fc] << ')';
  spa_cell << '(' << spa.grid[sr] << ',' << spa.grid[sc] << ')';
  o.detail = Detail()("periods", kOccupancyPeriods)("fpa_modal", fpa_cell.str())(
                 "spa_modal", spa_cell.str())
                 .str();
  return o;
}

// Incentive slack of each repeated-game condition on b_i = i / (m + 1).
double Slack(int which, int m, double g) {
  const auto b = [m](int i) { return static_cast<double>(i) / (m + 1); };
  switch (which) {
    case 0:
      return (1 - b(1)) / (2 * (1 - g)) - (1 - b(2) + g * (1 - b(m)) / (2 * (1 - g)));
    case 1:
      return (1 - b(1)) / (2 * (1 - g)) - (1 - b(1) + g * (1 - b(m)) / (2 * (1 - g)));
    case 2:
      return g * (1 - b(2)) / (1 - g * g) - (1 - b(2) + g * (1 - b(m)) / (2 * (1 - g)));
    default:
      return g * (1 - b(1)) / (1 - g * g) - ((1 - b(m)) / 2 + g * (1 - b(m)) / (2 * (1 - g)));
  }
}

double Threshold(int which, int m) {
  using theory::Format;
  switch (which) {
    case 0: return theory::GammaSse(m, Format::kFirstPrice);
    case 1: return theory::GammaSse(m, Format::kSecondPrice);
    case 2: return theory::GammaBrs(m, Format::kFirstPrice);
    default: return theory::GammaBrs(m, Format::kSecondPrice);
  }
}

Outcome TheoryCriterion() {
  using theory::Format;
  bool ok = std::abs(theory::GammaSse(19, Format::kFirstPrice) - 17.0 / 35.0) <= kTheoryTol &&
            std::abs(theory::GammaSse(19, Format::kSecondPrice) - 19.0 / 37.0) <= kTheoryTol &&
            std::abs(theory::GammaBrs(19, Format::kSecondPrice) - 1.0 / 37.0) <= kTheoryTol;
  const double limits[4] = {0.5, 0.5, (std::sqrt(5.0) - 1) / 2, 0.0};
  int monotone_breaks = 0;
  for (int which = 0; which < 4; ++which) {
    double prev_gap = std::abs(Threshold(which, 3) - limits[which]);
    for (int m = 4; m <= 10000; ++m) {
      const double gap = std::abs(Threshold(which, m) - limits[which]);
      monotone_breaks += gap >= prev_gap;
      prev_gap = gap;
    }
    ok = ok && prev_gap < 1e-4;
  }
  int inequality_breaks = 0;
  for (int which = 0; which < 4; ++which) {
    for (int m : {3, 5, 19, 100, 1000}) {
      const double g = Threshold(which, m);
      for (double d : {1e-6, 1e-3, 1e-2}) {
        if (g + d < 1) inequality_breaks += !(Slack(which, m, g + d) > 0);
        if (g - d > 0) inequality_breaks += !(Slack(which, m, g - d) < 0);
      }
    }
  }
  Outcome o;
  o.pass = ok && monotone_breaks == 0 && inequality_breaks == 0;
  o.detail = Detail()("gamma_sse_fpa_19", theory::GammaSse(19, Format::kFirstPrice))(
                 "monotone_breaks", monotone_breaks)("inequality_breaks", inequality_breaks)
                 .str();
  return o;
}

Outcome FixedPointCriterion() {
  const auto grid = BidGridd::Uniform(19);
  double worst = 0.0;
  bool greedy_kept = true;
  for (double gamma : {0.9, 0.99}) {
    for (double bid : {0.05, 0.3, 0.95}) {
      AgentConfig config;
      config.discount = gamma;
      const int index = *grid.IndexOf(bid);
      auto table = InitQ(config, grid, 1.0, grid.front());
      table.q.setZero();
      table.q[index] = OptimisticLevel(config, 1.0, grid.front());
      for (int k = 0; k < 400000; ++k) ApplyAsyncUpdate(table, index, (1 - bid) / 2, config);
      greedy_kept = greedy_kept && GreedyAction(table) == index;
      worst = std::max(worst, std::abs(table.q[index] - theory::SymmetricFixedPoint(bid, gamma)));
    }
  }
  Outcome o;
  o.pass = greedy_kept && worst <= kFixedPointTol;
  o.detail = Detail()("max_error", worst).str();
  return o;
}

Outcome PropertyCriterion() {
  Rng rng(20240611);
  int failures = 0;
  const AgentConfig agent;

  // Boundedness of Q under random reward streams in [0, 1].
  for (int trial = 0; trial < 20; ++trial) {
    QTabled table;
    table.q = Eigen::VectorXd::NullaryExpr(19, [&] { return rng.Uniform(0.0, 100.0); });
    const double hi = std::max(table.q.maxCoeff(), 1.0 / (1 - agent.discount));
    const double lo = std::min(table.q.minCoeff(), 0.0);
    for (int step = 0; step < 20000; ++step) {
      if (trial % 2 == 0) {
        ApplyAsyncUpdate(table, static_cast<int>(rng.Below(19)), rng.Uniform(), agent);
      } else {
        const Eigen::VectorXd r = Eigen::VectorXd::NullaryExpr(19, [&] { return rng.Uniform(); });
        ApplySyncUpdate(table, r, agent);
      }
      failures += table.q.maxCoeff() > hi + 1e-9 || table.q.minCoeff() < lo - 1e-9;
    }
  }
  // Async touches one entry; sync with a constant vector keeps the argmax.
  for (int trial = 0; trial < 2000; ++trial) {
    QTabled table;
    table.q = Eigen::VectorXd::NullaryExpr(19, [&] { return rng.Uniform(0.0, 95.0); });
    const int a = static_cast<int>(rng.Below(19));
    const auto next = UpdateAsync(table, a, rng.Uniform(), agent);
    failures += ((next.q.array() != table.q.array()).count() > 1);
    const auto synced = UpdateSync(table, Eigen::VectorXd::Constant(19, rng.Uniform()), agent);
    failures += GreedyAction(synced) != GreedyAction(table);
  }
  // Price bounds and second-price neutrality.
  const auto grid = BidGridd::Uniform(19);
  MechanismConfig spa;
  spa.alpha = 2.0;
  for (int trial = 0; trial < 2000; ++trial) {
    const double alpha = rng.Uniform(1.0, 2.0);
    const double lo = rng.Uniform();
    const double hi = lo + rng.Uniform(0.0, 1.0 - lo);
    const double p = AlphaPrice(alpha, hi, lo);
    failures += p < lo - 1e-15 || p > hi + 1e-15;
    const int loser = static_cast<int>(rng.Below(18));
    const int w1 = loser + 1 + static_cast<int>(rng.Below(18 - loser));
    const int w2 = loser + 1 + static_cast<int>(rng.Below(18 - loser));
    const std::vector<int> b1{w1, loser}, b2{w2, loser};
    failures += ExpectedAtProfile<double>(spa, grid, b1).revenue !=
                ExpectedAtProfile<double>(spa, grid, b2).revenue;
  }
  // Reproducibility across thread counts.
  auto config = Preset("baseline-fpa", 16);
  config.mechanism.alpha = 1.5;
  config.max_periods = 200000;
  const bool same = RunExperiment(config, 1) == RunExperiment(config, 8);
  Outcome o;
  o.pass = failures == 0 && same;
  o.detail = Detail()("property_failures", failures)("threads_1_vs_8_identical", same ? "yes" : "no").str();
  return o;
}

double MeanConvergedPrice(const ExperimentSummary& s, const ExperimentConfig& config) {
  double sum = 0.0;
  for (const auto& run : s.runs) {
    if (run.converged) sum += theory::ProfilePrice(config.mechanism, config.grid, run.final_profile);
  }
  return s.n_converged > 0 ? sum / s.n_converged : NAN;
}

Outcome ExtensionsCriterion() {
  // Reserve price: no converged mass with a bid below the reserve.
  const auto reserve_config = Preset("reserve", kExtensionRuns);
  const auto reserve = RunExperiment(reserve_config, Threads());
  std::int64_t below = 0;
  for (int i = 0; i < reserve_config.grid.count(); ++i) {
    for (int j = 0; j < reserve_config.grid.count(); ++j) {
      const bool low = reserve_config.grid[i] < kReserve - reserve_config.grid.tolerance() ||
                       reserve_config.grid[j] < kReserve - reserve_config.grid.tolerance();
      if (low) below += reserve.heatmap(i, j);
    }
  }
  const bool reserve_ok = reserve.n_converged > 0 && below == 0;

  // Negative bids: more mass at the lowest positive bid and lower prices.
  const auto negative_config = Preset("negative-bids", kExtensionRuns);
  const auto negative = RunExperiment(negative_config, Threads());
  const auto& baseline = FpaBaseline();
  const auto baseline_config = Preset("baseline-fpa", kBaselineRuns);
  const int neg_low = *negative_config.grid.IndexOf(0.05);
  const double neg_share = Share(negative.heatmap(neg_low, neg_low), negative.n_converged);
  const double base_share = Share(baseline.heatmap(0, 0), baseline.n_converged);
  const double neg_price = MeanConvergedPrice(negative, negative_config);
  const double base_price = MeanConvergedPrice(baseline, baseline_config);
  const bool negative_ok = neg_share > base_share && neg_price < base_price;

  // Fringe: modal diagonal cell at or above 0.5.
  const auto fringe_config = Preset("fringe", kExtensionRuns);
  const auto fringe = RunExperiment(fringe_config, Threads());
  Eigen::Index modal = 0;
  fringe.heatmap.diagonal().maxCoeff(&modal);
  const double fringe_bid = fringe_config.grid[static_cast<int>(modal)];
  const bool fringe_ok = fringe.n_converged > 0 &&
                         fringe_bid >= kFringeMinModalBid - fringe_config.grid.tolerance();

  // Three bidders at two discount factors.
  auto patient = Preset("three-bidders", kThreeBidderRuns);
  for (auto& a : patient.agents) a.discount = 0.999;
  auto impatient = Preset("three-bidders", kThreeBidderRuns);
  const auto p = RunExperiment(patient, Threads());
  const auto q = RunExperiment(impatient, Threads());
  const double p_frac = p.collusive_fraction.value_or(0.0);
  const double q_frac = q.collusive_fraction.value_or(0.0);
  const bool three_ok = p_frac > 0.0 && q_frac < p_frac;

  Outcome o;
  o.pass = reserve_ok && negative_ok && fringe_ok && three_ok;
  o.detail = Detail()("reserve_mass_below", below)("neg_share_0.05", neg_share)(
                 "base_share_0.05", base_share)("neg_mean_price", neg_price)(
                 "base_mean_price", base_price)("fringe_modal_diag", fringe_bid)(
                 "three_collusive_g0.999", p_frac)("three_converged_g0.999", p.convergence_rate)(
                 "three_collusive_g0.99", q_frac)
                 .str();
  return o;
}

struct Criterion {
  const char* name;
  std::function<Outcome()> check;
};

}  // namespace
}  // namespace qauction

int main(int argc, char** argv) {
  using namespace qauction;
  const std::string filter = argc > 1 ? argv[1] : "";
  const std::vector<Criterion> criteria{
      {"spa-baseline", SpaBaselineCriterion},
      {"fpa-baseline", FpaBaselineCriterion},
      {"alpha-sweep", AlphaSweepCriterion},
      {"sync-fpa", SyncCriterion},
      {"biased-init", BiasedInitCriterion},
      {"occupancy", OccupancyCriterion},
      {"theory", TheoryCriterion},
      {"fixed-point", FixedPointCriterion},
      {"properties", PropertyCriterion},
      {"extensions", ExtensionsCriterion},
  };
  int failed = 0, ran = 0;
  for (const auto& c : criteria) {
    if (!filter.empty() && std::string(c.name).find(filter) == std::string::npos) continue;
    ++ran;
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.check();
    } catch (const std::exception& e) {
      outcome = {false, std::string("error: ") + e.what()};
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !outcome.pass;
    std::printf("%s %-13s %s (%.1fs)\n", outcome.pass ? "PASS" : "FAIL", c.name,
                outcome.detail.c_str(), seconds);
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", ran - failed, ran);
  return failed == 0 ? 0 : 1;
}
