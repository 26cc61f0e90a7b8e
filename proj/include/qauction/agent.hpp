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

#ifndef QAUCTION_AGENT_HPP_
#define QAUCTION_AGENT_HPP_

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <vector>

#include "qauction/error.hpp"
#include "qauction/grid.hpp"
#include "qauction/random.hpp"

namespace qauction {

struct InitSpec {
  enum class Kind { kOptimistic, kBiased, kExplicit };
  Kind kind = Kind::kOptimistic;
  // Scales the optimistic level for every kind that uses it.
  double multiplier = 1.0;
  // kBiased: entry at `bid` = strength * optimistic, others = low_ratio * optimistic.
  double bid = 0.4;
  double strength = 1.0;
  double low_ratio = 0.5;
  // kExplicit
  std::vector<double> values;

  bool operator==(const InitSpec&) const = default;
};

struct ExplorationSpec {
  enum class Kind { kGlobal, kLocal, kPushDown };
  Kind kind = Kind::kGlobal;
  // kPushDown: chi(t) = chi_base * exp(-chi_decay * t); jump to the lowest
  // action whose value is within `closeness` of the maximum.
  double chi_base = 0.62;
  double chi_decay = 0.002;
  double closeness = 0.3;

  bool operator==(const ExplorationSpec&) const = default;
};

enum class UpdateMode { kAsynchronous, kSynchronous };

struct AgentConfig {
  double learning_rate = 0.05;
  double discount = 0.99;
  double eps_base = 0.025;
  double eps_decay = 0.0002;
  InitSpec init;
  ExplorationSpec exploration;
  UpdateMode update_mode = UpdateMode::kAsynchronous;

  bool operator==(const AgentConfig&) const = default;
};

inline void Validate(const AgentConfig& config) {
  Require(config.learning_rate > 0.0 && config.learning_rate < 1.0,
          ErrorKind::kInvalidConfig, "learning rate must lie in (0, 1)");
  Require(config.discount > 0.0 && config.discount < 1.0, ErrorKind::kInvalidConfig,
          "discount must lie in (0, 1)");
  Require(config.eps_base >= 0.0 && config.eps_base <= 1.0, ErrorKind::kInvalidConfig,
          "exploration base must lie in [0, 1]");
  Require(config.eps_decay >= 0.0, ErrorKind::kInvalidConfig,
          "exploration decay must be non-negative");
  Require(config.init.multiplier > 0.0, ErrorKind::kInvalidConfig,
          "init multiplier must be positive");
  if (config.exploration.kind == ExplorationSpec::Kind::kPushDown) {
    Require(config.exploration.closeness > 0.0, ErrorKind::kInvalidConfig,
            "push-down closeness must be positive");
    Require(config.exploration.chi_base >= 0.0 && config.exploration.chi_base <= 1.0,
            ErrorKind::kInvalidConfig, "push-down chi must lie in [0, 1]");
    Require(config.exploration.chi_decay >= 0.0, ErrorKind::kInvalidConfig,
            "push-down chi decay must be non-negative");
  }
}

// Stateless action-value vector for one bidder.
template <typename Scalar>
struct QTable {
  Vector<Scalar> q;
  std::int64_t t = 0;  // updates applied so far

  int size() const { return static_cast<int>(q.size()); }
  bool operator==(const QTable& other) const {
    return t == other.t && q.size() == other.q.size() && q == other.q;
  }
};

using QTabled = QTable<double>;

// Supremum of the discounted payoff stream when every period pays
// value - lowest_price.
template <typename Scalar>
Scalar OptimisticLevel(const AgentConfig& config, Scalar value, Scalar lowest_price) {
  return Scalar(config.init.multiplier) * (value - lowest_price) /
         (Scalar(1) - Scalar(config.discount));
}

template <typename Scalar>
QTable<Scalar> InitQ(const AgentConfig& config, const BidGrid<Scalar>& grid, Scalar value,
                     Scalar lowest_price) {
  Validate(config);
  QTable<Scalar> table;
  const Scalar optimistic = OptimisticLevel(config, value, lowest_price);
  switch (config.init.kind) {
    case InitSpec::Kind::kOptimistic:
      table.q.setConstant(grid.count(), optimistic);
      break;
    case InitSpec::Kind::kBiased: {
      const auto index = grid.IndexOf(Scalar(config.init.bid));
      Require(index.has_value(), ErrorKind::kInvalidConfig,
              "biased initialization bid is not a grid level");
      table.q.setConstant(grid.count(), Scalar(config.init.low_ratio) * optimistic);
      table.q[*index] = Scalar(config.init.strength) * optimistic;
      break;
    }
    case InitSpec::Kind::kExplicit:
      Require(static_cast<int>(config.init.values.size()) == grid.count(),
              ErrorKind::kLengthMismatch, "explicit initialization length must equal grid count");
      table.q = Eigen::Map<const Eigen::VectorXd>(config.init.values.data(),
                                                  grid.count())
                    .template cast<Scalar>();
      break;
  }
  return table;
}

template <typename Scalar>
QTable<Scalar> InitQ(const AgentConfig& config, const BidGrid<Scalar>& grid,
                     Scalar value = Scalar(1)) {
  return InitQ(config, grid, value, grid.front());
}

inline double EpsilonAt(std::int64_t t, const AgentConfig& config) {
  return config.eps_base * std::exp(-config.eps_decay * static_cast<double>(t));
}

inline double ChiAt(std::int64_t t, const AgentConfig& config) {
  return config.exploration.chi_base *
         std::exp(-config.exploration.chi_decay * static_cast<double>(t));
}

// Index of the maximal entry; ties go to the lowest index.
template <typename Derived>
int GreedyAction(const Eigen::DenseBase<Derived>& q) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < q.size(); ++i) {
    if (q[i] > q[best]) best = i;
  }
  return static_cast<int>(best);
}

template <typename Scalar>
int GreedyAction(const QTable<Scalar>& table) {
  return GreedyAction(table.q);
}

// Lowest action whose value is within `closeness` of the maximum.
template <typename Scalar>
int PushDownAction(const QTable<Scalar>& table, double closeness) {
  const Scalar threshold = table.q.maxCoeff() - Scalar(closeness);
  for (int i = 0; i < table.size(); ++i) {
    if (table.q[i] >= threshold) return i;
  }
  return GreedyAction(table);
}

// Same as SelectAction with the greedy index already known.
template <typename Scalar>
int SelectActionFromGreedy(const QTable<Scalar>& table, int greedy, std::int64_t t,
                           const AgentConfig& config, Rng& rng) {
  const auto& exploration = config.exploration;
  if (exploration.kind == ExplorationSpec::Kind::kPushDown) {
    const double chi = ChiAt(t, config);
    if (chi > 0.0 && rng.Bernoulli(chi)) return PushDownAction(table, exploration.closeness);
  }
  const double eps = EpsilonAt(t, config);
  if (eps <= 0.0 || !rng.Bernoulli(eps)) return greedy;

  const int m = table.size();
  if (exploration.kind == ExplorationSpec::Kind::kLocal) {
    if (m == 1) return greedy;
    if (greedy == 0) return 1;
    if (greedy == m - 1) return m - 2;
    return rng.Below(2) == 0 ? greedy - 1 : greedy + 1;
  }
  return static_cast<int>(rng.Below(static_cast<std::uint64_t>(m)));
}

template <typename Scalar>
int SelectAction(const QTable<Scalar>& table, std::int64_t t, const AgentConfig& config,
                 Rng& rng) {
  return SelectActionFromGreedy(table, GreedyAction(table), t, config, rng);
}

// q[a] <- (1 - lr) q[a] + lr (reward + discount * max_b q[b]), max taken
// before the update. Only entry `action` changes.
template <typename Scalar>
void ApplyAsyncUpdate(QTable<Scalar>& table, int action, Scalar reward,
                      const AgentConfig& config) {
  Require(action >= 0 && action < table.size(), ErrorKind::kInvalidBid,
          "action outside table");
  const Scalar lr(config.learning_rate);
  const Scalar target = reward + Scalar(config.discount) * table.q.maxCoeff();
  table.q[action] = (Scalar(1) - lr) * table.q[action] + lr * target;
  ++table.t;
}

// Same rule applied to every entry with its own counterfactual reward.
template <typename Scalar, typename Derived>
void ApplySyncUpdate(QTable<Scalar>& table, const Eigen::MatrixBase<Derived>& rewards,
                     const AgentConfig& config) {
  Require(rewards.size() == table.q.size(), ErrorKind::kLengthMismatch,
          "rewards length must equal table length");
  const Scalar lr(config.learning_rate);
  const Scalar continuation = Scalar(config.discount) * table.q.maxCoeff();
  table.q = (Scalar(1) - lr) * table.q +
            lr * (rewards.array() + continuation).matrix();
  ++table.t;
}

template <typename Scalar>
QTable<Scalar> UpdateAsync(QTable<Scalar> table, int action, Scalar reward,
                           const AgentConfig& config) {
  ApplyAsyncUpdate(table, action, reward, config);
  return table;
}

template <typename Scalar, typename Derived>
QTable<Scalar> UpdateSync(QTable<Scalar> table, const Eigen::MatrixBase<Derived>& rewards,
                          const AgentConfig& config) {
  ApplySyncUpdate(table, rewards, config);
  return table;
}

}  // namespace qauction

#endif  // QAUCTION_AGENT_HPP_
