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

#include "qauction/theory.hpp"

#include <cmath>

#include "qauction/error.hpp"

namespace qauction::theory {

std::vector<int> StaticNash(const BidGridd& grid, const MechanismConfig& mech) {
  Require(mech.value > grid.back(), ErrorKind::kInvalidConfig,
          "static equilibrium needs value above the top bid");
  return std::vector<int>(mech.n_bidders, grid.count() - 1);
}

double GammaSse(int m, Format format) {
  Require(m >= 2, ErrorKind::kInvalidConfig, "threshold needs m >= 2");
  const double md = m;
  if (format == Format::kFirstPrice) return (md - 2.0) / (2.0 * md - 3.0);
  return md / (2.0 * md - 1.0);
}

double GammaBrs(int m, Format format) {
  Require(m >= 2, ErrorKind::kInvalidConfig, "threshold needs m >= 2");
  const double md = m;
  if (format == Format::kFirstPrice) {
    return 0.5 * std::sqrt((10.0 * md - 11.0) / (2.0 * md - 3.0)) - 0.5;
  }
  return 1.0 / (2.0 * md - 1.0);
}

double SymmetricFixedPoint(double bid, double gamma, double value) {
  Require(gamma < 1.0, ErrorKind::kInvalidConfig, "discount must be below 1");
  return (value - bid) / (2.0 * (1.0 - gamma));
}

double ProfilePrice(const MechanismConfig& mech, const BidGridd& grid,
                    std::span<const int> profile) {
  MechanismConfig bare = mech;
  bare.fringe.reset();
  std::vector<double> levels(profile.size());
  for (std::size_t i = 0; i < profile.size(); ++i) {
    Require(grid.Contains(profile[i]), ErrorKind::kInvalidBid, "profile index outside grid");
    levels[i] = grid[profile[i]];
  }
  AuctionOutcomed out;
  internal::ResolveLevels<double>(bare, grid, levels, std::nullopt, nullptr, out);
  return out.price;
}

bool ClassifyCollusive(double price, const BidGridd& grid, int steps) {
  const double nash_price = grid.back();
  return price <= nash_price - steps * grid.step() + grid.tolerance();
}

bool ClassifyCollusive(std::span<const int> profile, const MechanismConfig& mech,
                       const BidGridd& grid, int steps) {
  return ClassifyCollusive(ProfilePrice(mech, grid, profile), grid, steps);
}

ThresholdReport MakeThresholdReport(int m) {
  ThresholdReport report;
  report.m = m;
  report.gamma_sse_fpa = GammaSse(m, Format::kFirstPrice);
  report.gamma_sse_spa = GammaSse(m, Format::kSecondPrice);
  report.gamma_brs_fpa = GammaBrs(m, Format::kFirstPrice);
  report.gamma_brs_spa = GammaBrs(m, Format::kSecondPrice);
  report.limit_brs_fpa = (std::sqrt(5.0) - 1.0) / 2.0;
  return report;
}

}  // namespace qauction::theory
