// Copyright 2026 The feemech Authors.
// SPDX-License-Identifier: Apache-2.0

#include "feemech/basefee.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace feemech {

double adjustment(const UpdateRule& rule, Gas block_gas, Gas target) {
  const double h = rule.learning_rate *
                   (static_cast<double>(block_gas) - static_cast<double>(target)) /
                   static_cast<double>(target);
  switch (rule.kind) {
    case AdjustmentKind::linear: return 1.0 + h;
    case AdjustmentKind::exponential: return std::exp(h);
    case AdjustmentKind::taylor2: return 1.0 + h + h * h / 2.0;
  }
  return 1.0;
}

namespace {

Price window_fee(const UpdateRule& rule, std::span<const Block> blocks, Gas target) {
  const auto window = static_cast<std::size_t>(*rule.window);
  const std::size_t first = blocks.size() > window ? blocks.size() - window : 0;
  double product = 1.0;
  for (std::size_t i = first; i < blocks.size(); ++i) {
    product *= adjustment(rule, blocks[i].gas_used, target);
  }
  return std::max(rule.min_base_fee, rule.r0 * product);
}

}  // namespace

Price next_base_fee(const UpdateRule& rule, Price r_pred, const Block& pred_block,
                    std::span<const Block> history, Gas target) {
  if (rule.window) {
    if (history.size() < static_cast<std::size_t>(*rule.window)) {
      throw Error(ErrorCode::insufficient_history,
                  "sliding window of " + std::to_string(*rule.window) + " blocks, history has " +
                      std::to_string(history.size()));
    }
    return window_fee(rule, history, target);
  }
  return std::max(rule.min_base_fee, r_pred * adjustment(rule, pred_block.gas_used, target));
}

Price base_fee_from_history(const UpdateRule& rule, std::span<const Block> blocks, Gas target) {
  if (rule.window) return blocks.empty() ? rule.r0 : window_fee(rule, blocks, target);
  Price r = rule.r0;
  for (const auto& block : blocks) {
    r = std::max(rule.min_base_fee, r * adjustment(rule, block.gas_used, target));
  }
  return r;
}

Price current_base_fee(const ChainState& chain) {
  return base_fee_from_history(chain.rule, chain.blocks, chain.env.target_block_size);
}

void SlidingWindowProduct::push(double factor) {
  factors_.push_back(factor);
  product_ *= factor;
  if (factors_.size() > window_) {
    product_ /= factors_.front();
    factors_.pop_front();
  }
  if (++pushes_since_refresh_ >= kRefreshInterval) {
    product_ = std::accumulate(factors_.begin(), factors_.end(), 1.0, std::multiplies<>());
    pushes_since_refresh_ = 0;
  }
}

}  // namespace feemech
