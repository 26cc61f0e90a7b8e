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

#ifndef QAUCTION_THEORY_HPP_
#define QAUCTION_THEORY_HPP_

#include <span>
#include <vector>

#include "qauction/grid.hpp"
#include "qauction/mechanism.hpp"

namespace qauction::theory {

enum class Format { kFirstPrice, kSecondPrice };

// One-shot equilibrium: every bidder at the top grid level.
std::vector<int> StaticNash(const BidGridd& grid, const MechanismConfig& mech);

// Critical discount factors of the repeated auction with m grid levels.
// Strongly symmetric collusion at b_1 with grim reversion to b_m.
double GammaSse(int m, Format format);
// Bid rotation with grim reversion to b_m.
double GammaBrs(int m, Format format);

// Q(b) at the rest point of the asynchronous update when b is played by
// both bidders and wins half the time: (value - b) / (2 (1 - gamma)).
double SymmetricFixedPoint(double bid, double gamma, double value = 1.0);

// Deterministic price at a profile, fringe excluded, ties irrelevant.
double ProfilePrice(const MechanismConfig& mech, const BidGridd& grid,
                    std::span<const int> profile);

// Collusive iff the price sits at least `steps` grid steps below the
// static-Nash price.
bool ClassifyCollusive(double price, const BidGridd& grid, int steps = 1);
bool ClassifyCollusive(std::span<const int> profile, const MechanismConfig& mech,
                       const BidGridd& grid, int steps = 1);

struct ThresholdReport {
  int m = 0;
  double gamma_sse_fpa = 0.0;
  double gamma_sse_spa = 0.0;
  double gamma_brs_fpa = 0.0;
  double gamma_brs_spa = 0.0;
  // m -> infinity
  double limit_sse_fpa = 0.5;
  double limit_sse_spa = 0.5;
  double limit_brs_fpa = 0.0;
  double limit_brs_spa = 0.0;
};

ThresholdReport MakeThresholdReport(int m);

}  // namespace qauction::theory

#endif  // QAUCTION_THEORY_HPP_
