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

#ifndef QAUCTION_GRID_HPP_
#define QAUCTION_GRID_HPP_

#include <Eigen/Core>

#include <cmath>
#include <optional>
#include <string>

#include "qauction/error.hpp"

namespace qauction {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// Finite, strictly increasing, equidistant set of admissible bids.
template <typename Scalar>
class BidGrid {
 public:
  BidGrid() = default;

  // `count` levels from `lo` to `hi` inclusive.
  static BidGrid Build(int count, Scalar lo, Scalar hi) {
    Require(count >= 2, ErrorKind::kInvalidConfig,
            "grid needs at least two levels, got " + std::to_string(count));
    Require(lo < hi, ErrorKind::kInvalidConfig, "grid requires lo < hi");
    // Interpolate in extended precision so each level rounds to the nearest
    // representable value and both endpoints are reproduced exactly.
    using Wide = long double;
    const Wide span = static_cast<Wide>(count - 1);
    BidGrid grid;
    grid.step_ = static_cast<Scalar>((static_cast<Wide>(hi) - static_cast<Wide>(lo)) / span);
    grid.values_.resize(count);
    // Grids like 0.05, 0.10, ... sit on a lattice k / q with integer q; take
    // the quotient directly so levels match their decimal spelling.
    const Wide inv_step = span / (static_cast<Wide>(hi) - static_cast<Wide>(lo));
    const Wide q = std::round(inv_step);
    const Wide k0 = std::round(static_cast<Wide>(lo) * q);
    const bool lattice = q >= 1 && q <= 1e6 && std::abs(inv_step - q) < 1e-9L * q &&
                         std::abs(static_cast<Wide>(lo) * q - k0) < 1e-9L;
    for (int i = 0; i < count; ++i) {
      grid.values_[i] =
          lattice ? static_cast<Scalar>(static_cast<double>(k0 + i) / static_cast<double>(q))
                  : static_cast<Scalar>((static_cast<Wide>(lo) * (span - i) +
                                         static_cast<Wide>(hi) * i) / span);
    }
    if (lattice) grid.step_ = static_cast<Scalar>(1.0 / static_cast<double>(q));
    return grid;
  }

  // b_i = i / (m + 1), i = 1..m.
  static BidGrid Uniform(int m) {
    Require(m >= 2, ErrorKind::kInvalidConfig, "grid needs m >= 2");
    return Build(m, Scalar(1) / Scalar(m + 1), Scalar(m) / Scalar(m + 1));
  }

  int count() const { return static_cast<int>(values_.size()); }
  Scalar step() const { return step_; }
  const Vector<Scalar>& values() const { return values_; }
  Scalar operator[](int i) const { return values_[i]; }
  Scalar front() const { return values_[0]; }
  Scalar back() const { return values_[values_.size() - 1]; }

  bool Contains(int index) const { return index >= 0 && index < count(); }

  // Comparison slack for levels produced by floating-point interpolation.
  Scalar tolerance() const { return step_ * Scalar(1e-7); }

  // Index of the level equal to `level` (within tolerance), if any.
  std::optional<int> IndexOf(Scalar level) const {
    const Scalar pos = (level - front()) / step_;
    const long nearest = std::lround(static_cast<double>(pos));
    if (nearest < 0 || nearest >= count()) return std::nullopt;
    if (std::abs(values_[nearest] - level) > tolerance()) return std::nullopt;
    return static_cast<int>(nearest);
  }

  bool operator==(const BidGrid& other) const {
    return step_ == other.step_ && values_.size() == other.values_.size() &&
           values_ == other.values_;
  }

 private:
  Vector<Scalar> values_;
  Scalar step_ = Scalar(0);
};

using BidGridd = BidGrid<double>;

}  // namespace qauction

#endif  // QAUCTION_GRID_HPP_
