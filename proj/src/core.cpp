// Copyright 2026 The feemech Authors.
// SPDX-License-Identifier: Apache-2.0

#include "feemech/core.hpp"

#include <numeric>
#include <unordered_set>

namespace feemech {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::oversize_block: return "OversizeBlock";
    case ErrorCode::height_gap: return "HeightGap";
    case ErrorCode::bid_variant_mismatch: return "BidVariantMismatch";
    case ErrorCode::exact_mode_too_large: return "ExactModeTooLarge";
    case ErrorCode::non_concave_revenue: return "NonConcaveRevenue";
    case ErrorCode::insufficient_history: return "InsufficientHistory";
    case ErrorCode::budget_exceeded: return "BudgetExceeded";
    case ErrorCode::infeasible_strategy: return "InfeasibleStrategy";
    case ErrorCode::invalid_block: return "InvalidBlock";
    case ErrorCode::config_error: return "ConfigError";
  }
  return "Unknown";
}

void EnvParams::validate() const {
  if (target_block_size < 1 || max_block_size < target_block_size) {
    throw Error(ErrorCode::config_error,
                "block sizes must satisfy G >= G_target >= 1");
  }
  if (!(marginal_cost >= 0.0) || !(min_base_fee >= 0.0)) {
    throw Error(ErrorCode::config_error,
                "marginal_cost and min_base_fee must be non-negative");
  }
}

const char* bid_kind(const BidParams& bid) {
  struct Visitor {
    const char* operator()(const FpaBid&) const { return "fpa"; }
    const char* operator()(const FeeCapTipBid&) const { return "fee_cap_tip"; }
    const char* operator()(const CapOnlyBid&) const { return "cap_only"; }
    const char* operator()(const EscalatorBid&) const { return "escalator"; }
  };
  return std::visit(Visitor{}, bid);
}

void validate_bid(const BidParams& bid) {
  auto fail = [](const char* what) {
    throw Error(ErrorCode::config_error, what);
  };
  if (const auto* b = std::get_if<FpaBid>(&bid)) {
    if (!(b->gas_price >= 0)) fail("gas_price must be non-negative");
  } else if (const auto* b = std::get_if<FeeCapTipBid>(&bid)) {
    if (!(b->fee_cap >= 0) || !(b->tip >= 0)) fail("fee cap and tip must be non-negative");
  } else if (const auto* b = std::get_if<CapOnlyBid>(&bid)) {
    if (!(b->fee_cap >= 0)) fail("fee cap must be non-negative");
  } else if (const auto* b = std::get_if<EscalatorBid>(&bid)) {
    if (!(b->start_bid >= 0) || !(b->end_bid >= 0)) fail("escalator bids must be non-negative");
    if (b->start_height > b->end_height) fail("escalator start_height > end_height");
  }
}

std::vector<TxView> redact(std::span<const Transaction> txs) {
  std::vector<TxView> views;
  views.reserve(txs.size());
  for (const auto& tx : txs) views.emplace_back(tx);
  return views;
}

Gas total_gas(std::span<const Transaction> txs) {
  return std::accumulate(txs.begin(), txs.end(), Gas{0},
                         [](Gas acc, const Transaction& tx) { return acc + tx.gas_limit; });
}

Gas block_gas(const Block& block) { return total_gas(block.txs); }

Block make_block(std::int64_t height, Price base_fee, std::vector<Transaction> txs) {
  Block block{height, base_fee, std::move(txs), 0};
  block.gas_used = block_gas(block);
  return block;
}

void UpdateRule::validate() const {
  if (!(learning_rate > 0.0 && learning_rate < 1.0)) {
    throw Error(ErrorCode::config_error, "learning_rate must lie in (0,1)");
  }
  if (window && *window < 1) {
    throw Error(ErrorCode::config_error, "sliding window must be >= 1");
  }
  if (!(min_base_fee >= 0.0) || !(r0 >= min_base_fee)) {
    throw Error(ErrorCode::config_error, "require r0 >= min_base_fee >= 0");
  }
}

ChainState append_block(const ChainState& chain, Block block) {
  if (block.gas_used != block_gas(block)) {
    throw Error(ErrorCode::invalid_block, "gas_used does not match the transactions");
  }
  if (block.gas_used > chain.env.max_block_size) {
    throw Error(ErrorCode::oversize_block,
                "block uses " + std::to_string(block.gas_used) + " gas, limit " +
                    std::to_string(chain.env.max_block_size));
  }
  if (block.height != chain.next_height()) {
    throw Error(ErrorCode::height_gap,
                "expected height " + std::to_string(chain.next_height()) + ", got " +
                    std::to_string(block.height));
  }
  ChainState next = chain;
  next.blocks.push_back(std::move(block));
  return next;
}

void check_unique_ids(std::span<const Transaction> txs) {
  std::unordered_set<std::string> seen;
  for (const auto& tx : txs) {
    if (!seen.insert(tx.id).second) {
      throw Error(ErrorCode::config_error, "duplicate transaction id: " + tx.id);
    }
  }
}

}  // namespace feemech
