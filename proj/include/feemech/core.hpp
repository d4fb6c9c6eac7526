// Copyright 2026 The feemech Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace feemech {

/// Gas quantities are integral units.
using Gas = std::int64_t;
/// Prices are gwei per unit of gas.
using Price = double;
/// Absolute amounts in gwei.
using Gwei = double;

inline constexpr double kGweiPerEth = 1e9;

enum class ErrorCode {
  oversize_block,
  height_gap,
  bid_variant_mismatch,
  exact_mode_too_large,
  non_concave_revenue,
  insufficient_history,
  budget_exceeded,
  infeasible_strategy,
  invalid_block,
  config_error,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

struct EnvParams {
  Gas max_block_size = 25'000'000;
  Gas target_block_size = 12'500'000;
  Price marginal_cost = 0.0;
  Price min_base_fee = 1.0;

  /// Throws Error(config_error) when G ≥ G_target ≥ 1, μ ≥ 0 or the floor
  /// constraint is violated.
  void validate() const;
};

// Bid records. Which one a transaction carries depends on the mechanism.
struct FpaBid {
  Price gas_price = 0.0;
};

struct FeeCapTipBid {
  Price fee_cap = 0.0;
  Price tip = 0.0;
};

struct CapOnlyBid {
  Price fee_cap = 0.0;
};

/// Bid that rises linearly from start_bid at start_height to end_bid at
/// end_height; invalid outside that window.
struct EscalatorBid {
  std::int64_t start_height = 0;
  Price start_bid = 0.0;
  std::int64_t end_height = 0;
  Price end_bid = 0.0;
};

using BidParams = std::variant<FpaBid, FeeCapTipBid, CapOnlyBid, EscalatorBid>;

const char* bid_kind(const BidParams& bid);
void validate_bid(const BidParams& bid);

struct Transaction {
  std::string id;
  Gas gas_limit = 1;
  /// Private value. Mechanism rules only ever see a TxView.
  Price value = 0.0;
  BidParams bid = FpaBid{};
  bool is_fake = false;
};

/// The part of a transaction visible to allocation, payment and burning rules.
class TxView {
 public:
  explicit TxView(const Transaction& tx) : tx_(&tx) {}

  const std::string& id() const { return tx_->id; }
  Gas gas_limit() const { return tx_->gas_limit; }
  const BidParams& bid() const { return tx_->bid; }

 private:
  const Transaction* tx_;
};

std::vector<TxView> redact(std::span<const Transaction> txs);

struct Block {
  std::int64_t height = 1;
  Price base_fee = 0.0;
  std::vector<Transaction> txs;
  Gas gas_used = 0;
};

Gas block_gas(const Block& block);
Gas total_gas(std::span<const Transaction> txs);

/// Builds a block with gas_used filled in.
Block make_block(std::int64_t height, Price base_fee,
                 std::vector<Transaction> txs);

enum class AdjustmentKind { linear, exponential, taylor2 };

/// Base-fee update rule. A set window turns the rule into its sliding-window
/// form r0 · Π of the last `window` adjustment factors.
struct UpdateRule {
  AdjustmentKind kind = AdjustmentKind::linear;
  double learning_rate = 0.125;
  std::optional<int> window;
  Price r0 = 1.0;
  Price min_base_fee = 1.0;

  void validate() const;
};

struct ChainState {
  std::vector<Block> blocks;
  EnvParams env;
  UpdateRule rule;

  std::int64_t next_height() const {
    return blocks.empty() ? 1 : blocks.back().height + 1;
  }
};

/// Returns a new chain with `block` appended. Throws oversize_block or
/// height_gap.
ChainState append_block(const ChainState& chain, Block block);

struct Mempool {
  std::vector<Transaction> txs;
};

/// Throws config_error when two transactions share an id.
void check_unique_ids(std::span<const Transaction> txs);

}  // namespace feemech
