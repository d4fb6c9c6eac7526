// Copyright 2026 The feemech Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <deque>
#include <span>

#include "feemech/core.hpp"

namespace feemech {

/// Adjustment factor ζ for a block of `block_gas` against `target`.
///   linear:      1 + η·(s−T)/T
///   exponential: e^{η·(s−T)/T}
///   taylor2:     1 + h + h²/2 with h = η·(s−T)/T
double adjustment(const UpdateRule& rule, Gas block_gas, Gas target);

/// Base fee of the block following `pred_block`. For decomposable rules this
/// is max(floor, r_pred·ζ(pred_block)). Sliding-window rules ignore r_pred and
/// return r0·Π ζ over the last `window` blocks of `history`, which must
/// already end with pred_block; fewer blocks throw insufficient_history.
Price next_base_fee(const UpdateRule& rule, Price r_pred, const Block& pred_block,
                    std::span<const Block> history, Gas target);

/// Folds the rule over a whole history starting from r0 (floor applied at
/// every step). Sliding-window rules use the available blocks when fewer than
/// `window` exist.
Price base_fee_from_history(const UpdateRule& rule, std::span<const Block> blocks, Gas target);

/// Base fee the chain's rule assigns to the next block.
Price current_base_fee(const ChainState& chain);

/// Running product for sliding-window rules. Divides out the exiting factor
/// and recomputes the product from scratch every kRefreshInterval pushes.
class SlidingWindowProduct {
 public:
  static constexpr std::size_t kRefreshInterval = std::size_t{1} << 14;

  explicit SlidingWindowProduct(std::size_t window) : window_(window) {}

  void push(double factor);
  double product() const { return product_; }
  std::size_t size() const { return factors_.size(); }

 private:
  std::size_t window_;
  std::deque<double> factors_;
  double product_ = 1.0;
  std::size_t pushes_since_refresh_ = 0;
};

}  // namespace feemech
