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

#ifndef QAUCTION_MECHANISM_HPP_
#define QAUCTION_MECHANISM_HPP_

#include <Eigen/Core>

#include <algorithm>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qauction/error.hpp"
#include "qauction/grid.hpp"
#include "qauction/random.hpp"

namespace qauction {

// Non-strategic competing bid drawn i.i.d. Uniform(low, high) each auction.
struct FringeSpec {
  double low = 0.0;
  double high = 1.0;
  bool operator==(const FringeSpec&) const = default;
};

enum class TieRule { kUniformRandomWinner };

// kNonParticipation: non-positive bids never win and never set the price.
// kLiteral: every grid level is an ordinary bid.
enum class NegativeBidMode { kNonParticipation, kLiteral };

// What a bidder learns after each auction.
enum class Feedback { kWinOnly, kMinBidToWin };

struct MechanismConfig {
  double alpha = 1.0;  // 1 = first price, 2 = second price
  std::optional<double> reserve;
  std::optional<FringeSpec> fringe;
  int n_bidders = 2;
  double value = 1.0;
  TieRule tie_rule = TieRule::kUniformRandomWinner;
  NegativeBidMode negative_bid_mode = NegativeBidMode::kNonParticipation;
  Feedback feedback = Feedback::kWinOnly;

  bool operator==(const MechanismConfig&) const = default;
};

template <typename Scalar>
void Validate(const MechanismConfig& mech, const BidGrid<Scalar>& grid) {
  Require(mech.alpha >= 1.0 && mech.alpha <= 2.0, ErrorKind::kInvalidConfig,
          "alpha must lie in [1, 2]");
  Require(mech.n_bidders >= 2, ErrorKind::kInvalidConfig, "need at least two bidders");
  Require(mech.value > static_cast<double>(grid.back()), ErrorKind::kInvalidConfig,
          "value must exceed the highest grid bid");
  if (mech.reserve) {
    const double tol = static_cast<double>(grid.tolerance());
    Require(*mech.reserve >= static_cast<double>(grid.front()) - tol &&
                *mech.reserve <= static_cast<double>(grid.back()) + tol,
            ErrorKind::kInvalidConfig, "reserve must lie within the grid range");
  }
  if (mech.fringe) {
    Require(mech.fringe->low < mech.fringe->high, ErrorKind::kInvalidConfig,
            "fringe requires low < high");
  }
}

// (2 - alpha) * highest + (alpha - 1) * second_highest.
template <typename Scalar>
Scalar AlphaPrice(double alpha, Scalar highest, Scalar second_highest) {
  Require(alpha >= 1.0 && alpha <= 2.0, ErrorKind::kInvalidConfig,
          "alpha must lie in [1, 2]");
  const Scalar a(alpha);
  return (Scalar(2) - a) * highest + (a - Scalar(1)) * second_highest;
}

// Whether a bid at `level` can win and enter price formation.
template <typename Scalar>
bool Participates(const MechanismConfig& mech, Scalar level, Scalar tol) {
  if (mech.negative_bid_mode == NegativeBidMode::kNonParticipation && level <= tol) {
    return false;
  }
  if (mech.reserve && level < Scalar(*mech.reserve) - tol) return false;
  return true;
}

// Losing-bid component of the price when `competing` is the best other
// participating bid (-inf when there is none).
template <typename Scalar>
Scalar LosingComponent(const MechanismConfig& mech, Scalar competing) {
  Scalar losing = competing == -std::numeric_limits<Scalar>::infinity() ? Scalar(0)
                                                                        : competing;
  if (mech.reserve) losing = std::max(losing, Scalar(*mech.reserve));
  return losing;
}

template <typename Scalar>
struct AuctionOutcome {
  std::optional<int> winner;  // strategic winner; absent on no sale or fringe win
  bool fringe_won = false;
  Scalar price = Scalar(0);
  Scalar top_bid = Scalar(0);         // winning bid level, 0 on no sale
  Scalar revenue = Scalar(0);         // paid by strategic bidders
  Scalar fringe_revenue = Scalar(0);  // paid by the fringe when it wins
  Vector<Scalar> rewards;
  // Per bidder: highest other participating bid (fringe included), -inf if none,
  // and how many competitors sit at that level.
  Vector<Scalar> competing_max;
  Eigen::VectorXi competing_ties;
  // Per bidder: lowest grid level that beats every other participant outright,
  // clamped to the top level.
  Vector<Scalar> min_bid_to_win;

  bool sold() const { return winner.has_value() || fringe_won; }
};

using AuctionOutcomed = AuctionOutcome<double>;

namespace internal {

template <typename Scalar>
Scalar MinBidToWin(const MechanismConfig& mech, const BidGrid<Scalar>& grid,
                   Scalar competing) {
  const Scalar tol = grid.tolerance();
  int start = 0;
  if (competing != -std::numeric_limits<Scalar>::infinity()) {
    const Scalar pos = (competing - grid.front()) / grid.step();
    start = std::max(0, static_cast<int>(std::floor(static_cast<double>(pos))));
  }
  for (int k = start; k < grid.count(); ++k) {
    if (grid[k] > competing + tol && Participates(mech, grid[k], tol)) return grid[k];
  }
  return grid.back();
}

// Shared auction core. `levels` are the strategic bids; `fringe` is an
// already-filtered participating fringe bid. If `rng` is null, ties are
// resolved in expectation: `rewards` and `fringe_revenue` hold expected values.
template <typename Scalar>
void ResolveLevels(const MechanismConfig& mech, const BidGrid<Scalar>& grid,
                   std::span<const Scalar> levels, std::optional<Scalar> fringe,
                   Rng* rng, AuctionOutcome<Scalar>& out) {
  const int n = static_cast<int>(levels.size());
  const Scalar tol = grid.tolerance();
  const Scalar kNone = -std::numeric_limits<Scalar>::infinity();

  out.winner.reset();
  out.fringe_won = false;
  out.price = Scalar(0);
  out.top_bid = Scalar(0);
  out.revenue = Scalar(0);
  out.fringe_revenue = Scalar(0);
  out.rewards.setZero(n);
  out.competing_max.setConstant(n, kNone);
  out.competing_ties.setZero(n);
  out.min_bid_to_win.resize(n);

  // Slot n is the fringe.
  auto participates = [&](int i) {
    return i < n ? Participates(mech, levels[i], tol) : fringe.has_value();
  };
  auto level_of = [&](int i) { return i < n ? levels[i] : *fringe; };

  Scalar top = kNone;
  int tied = 0;
  for (int i = 0; i <= n; ++i) {
    if (!participates(i)) continue;
    const Scalar b = level_of(i);
    if (b > top + tol) {
      top = b;
      tied = 1;
    } else if (b >= top - tol) {
      ++tied;
    }
  }

  for (int i = 0; i < n; ++i) {
    Scalar best = kNone;
    int ties = 0;
    for (int j = 0; j <= n; ++j) {
      if (j == i || !participates(j)) continue;
      const Scalar b = level_of(j);
      if (b > best + tol) {
        best = b;
        ties = 1;
      } else if (b >= best - tol) {
        ++ties;
      }
    }
    out.competing_max[i] = best;
    out.competing_ties[i] = ties;
    out.min_bid_to_win[i] = MinBidToWin(mech, grid, best);
  }

  if (tied == 0) return;  // nobody meets the reserve

  // A tie at the top means the losing component equals the top bid.
  Scalar second = kNone;
  if (tied >= 2) {
    second = top;
  } else {
    for (int i = 0; i <= n; ++i) {
      if (!participates(i)) continue;
      const Scalar b = level_of(i);
      if (b < top - tol) second = std::max(second, b);
    }
  }
  const Scalar price = AlphaPrice(mech.alpha, top, LosingComponent(mech, second));
  const Scalar surplus = Scalar(mech.value) - price;
  out.price = price;
  out.top_bid = top;

  auto at_top = [&](int i) { return participates(i) && level_of(i) >= top - tol; };
  if (rng == nullptr) {
    const Scalar share = Scalar(1) / static_cast<Scalar>(tied);
    for (int i = 0; i < n; ++i) {
      if (at_top(i)) {
        out.rewards[i] = surplus * share;
        out.revenue += price * share;
      }
    }
    if (at_top(n)) out.fringe_revenue = price * share;
    return;
  }

  int pick = tied > 1 ? static_cast<int>(rng->Below(static_cast<std::uint64_t>(tied))) : 0;
  for (int i = 0; i <= n; ++i) {
    if (!at_top(i)) continue;
    if (pick-- == 0) {
      if (i == n) {
        out.fringe_won = true;
        out.fringe_revenue = price;
      } else {
        out.winner = i;
        out.rewards[i] = surplus;
        out.revenue = price;
      }
      break;
    }
  }
}

template <typename Scalar>
std::optional<Scalar> ParticipatingFringe(const MechanismConfig& mech,
                                          const BidGrid<Scalar>& grid,
                                          std::optional<Scalar> fringe_draw) {
  Require(fringe_draw.has_value() == mech.fringe.has_value(), ErrorKind::kInvalidConfig,
          "fringe draw must be supplied exactly when the mechanism has a fringe");
  if (!fringe_draw) return std::nullopt;
  const Scalar tol = grid.tolerance();
  if (mech.reserve && *fringe_draw < Scalar(*mech.reserve) - tol) return std::nullopt;
  return fringe_draw;
}

}  // namespace internal

// Resolves one auction from per-bidder grid indices. `levels_scratch` avoids
// an allocation per call in hot loops.
template <typename Scalar>
void ResolveInto(const MechanismConfig& mech, const BidGrid<Scalar>& grid,
                 std::span<const int> bids, std::optional<Scalar> fringe_draw, Rng& rng,
                 std::vector<Scalar>& levels_scratch, AuctionOutcome<Scalar>& out) {
  levels_scratch.resize(bids.size());
  for (std::size_t i = 0; i < bids.size(); ++i) {
    Require(grid.Contains(bids[i]), ErrorKind::kInvalidBid,
            "bid index " + std::to_string(bids[i]) + " outside grid");
    levels_scratch[i] = grid[bids[i]];
  }
  internal::ResolveLevels<Scalar>(mech, grid, levels_scratch,
                                  internal::ParticipatingFringe(mech, grid, fringe_draw),
                                  &rng, out);
}

template <typename Scalar>
AuctionOutcome<Scalar> Resolve(const MechanismConfig& mech, const BidGrid<Scalar>& grid,
                               std::span<const int> bids,
                               std::optional<Scalar> fringe_draw, Rng& rng) {
  std::vector<Scalar> levels;
  AuctionOutcome<Scalar> out;
  ResolveInto(mech, grid, bids, fringe_draw, rng, levels, out);
  return out;
}

// Counterfactual payoff of every grid bid against a fixed highest competing
// bid. A tie with `competitors_at_max` rivals pays its expected share.
template <typename Scalar>
void HindsightRewardsInto(const MechanismConfig& mech, const BidGrid<Scalar>& grid,
                          Scalar opponents_max, int competitors_at_max,
                          Eigen::Ref<Vector<Scalar>> out) {
  Require(mech.feedback == Feedback::kMinBidToWin, ErrorKind::kFeedbackUnavailable,
          "hindsight rewards need min-bid-to-win feedback");
  Require(out.size() == grid.count(), ErrorKind::kLengthMismatch,
          "hindsight output length must equal grid count");
  const Scalar tol = grid.tolerance();
  const Scalar value(mech.value);
  const Scalar losing = LosingComponent(mech, opponents_max);
  const Scalar tie_share = Scalar(1) / static_cast<Scalar>(std::max(1, competitors_at_max) + 1);
  for (int a = 0; a < grid.count(); ++a) {
    const Scalar b = grid[a];
    if (!Participates(mech, b, tol) || b < opponents_max - tol) {
      out[a] = Scalar(0);
    } else if (b > opponents_max + tol) {
      out[a] = value - AlphaPrice(mech.alpha, b, losing);
    } else {
      out[a] = (value - AlphaPrice(mech.alpha, b, std::max(b, losing))) * tie_share;
    }
  }
}

template <typename Scalar>
Vector<Scalar> HindsightRewards(const MechanismConfig& mech, const BidGrid<Scalar>& grid,
                                Scalar opponents_max,
                                std::optional<Scalar> fringe_draw = std::nullopt,
                                int competitors_at_max = 1) {
  if (fringe_draw) {
    const auto f = internal::ParticipatingFringe(mech, grid, fringe_draw);
    if (f && *f > opponents_max + grid.tolerance()) {
      opponents_max = *f;
      competitors_at_max = 1;
    }
  }
  Vector<Scalar> out(grid.count());
  HindsightRewardsInto<Scalar>(mech, grid, opponents_max, competitors_at_max, out);
  return out;
}

template <typename Scalar>
struct ExpectedOutcome {
  Scalar revenue = Scalar(0);
  Scalar fringe_revenue = Scalar(0);
  Vector<Scalar> rewards;
};

// Expectation over the tie rule and the fringe draw for a fixed bid profile.
// Between consecutive breakpoints of the fringe draw the outcome is affine in
// the draw, so the midpoint rule per piece is exact.
template <typename Scalar>
ExpectedOutcome<Scalar> ExpectedAtProfile(const MechanismConfig& mech,
                                          const BidGrid<Scalar>& grid,
                                          std::span<const int> bids) {
  std::vector<Scalar> levels(bids.size());
  for (std::size_t i = 0; i < bids.size(); ++i) {
    Require(grid.Contains(bids[i]), ErrorKind::kInvalidBid, "bid index outside grid");
    levels[i] = grid[bids[i]];
  }
  ExpectedOutcome<Scalar> result;
  result.rewards.setZero(static_cast<Eigen::Index>(bids.size()));
  AuctionOutcome<Scalar> out;

  if (!mech.fringe) {
    internal::ResolveLevels<Scalar>(mech, grid, levels, std::nullopt, nullptr, out);
    result.revenue = out.revenue;
    result.rewards = out.rewards;
    return result;
  }

  const Scalar lo(mech.fringe->low), hi(mech.fringe->high);
  std::vector<Scalar> cuts{lo, hi};
  for (Scalar b : levels) {
    if (b > lo && b < hi) cuts.push_back(b);
  }
  if (mech.reserve && Scalar(*mech.reserve) > lo && Scalar(*mech.reserve) < hi) {
    cuts.push_back(Scalar(*mech.reserve));
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const Scalar width = cuts[k + 1] - cuts[k];
    const Scalar mid = (cuts[k] + cuts[k + 1]) / Scalar(2);
    const auto f = internal::ParticipatingFringe<Scalar>(mech, grid, mid);
    internal::ResolveLevels<Scalar>(mech, grid, levels, f, nullptr, out);
    const Scalar weight = width / (hi - lo);
    result.revenue += weight * out.revenue;
    result.fringe_revenue += weight * out.fringe_revenue;
    result.rewards += weight * out.rewards;
  }
  return result;
}

}  // namespace qauction

#endif  // QAUCTION_MECHANISM_HPP_
