// Copyright 2026 The feemech Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "feemech/core.hpp"
#include "feemech/knapsack.hpp"

namespace feemech {

struct FirstPrice {};
/// Charges every included transaction the lowest included bid.
struct Vickrey {};
/// First-price allocation with payments and burns swapped: the whole bid burns.
struct FeeBurningFpa {};
struct M1559 {};
/// 1559 allocation, but the miner keeps the entire bid.
struct M1559R {};
struct Tipless {
  Price hardcoded_tip = 0.0;
};
/// 1559 whose base-fee revenue is paid forward to the next `window` miners.
struct Smoothed {
  int window = 1;
};
/// Burns `burn_fraction` of the base-fee revenue, pays the rest forward.
struct Blended {
  double burn_fraction = 1.0;
  int window = 1;
};
struct Beos {
  int window = 1;
  std::optional<Price> min_fee;  // defaults to the marginal cost
  double full_threshold_fraction = 1.0;
};

using MechanismSpec =
    std::variant<FirstPrice, Vickrey, FeeBurningFpa, M1559, M1559R, Tipless, Smoothed, Blended, Beos>;

std::string mechanism_name(const MechanismSpec& spec);
void validate_mechanism(const MechanismSpec& spec);

/// True for mechanisms with a protocol base fee below which bids are invalid.
bool has_base_fee(const MechanismSpec& spec);

enum class AllocMode { greedy, exact };

/// Scalar bid b_t of the formal model, or nullopt when an escalator bid is
/// outside its window. Throws bid_variant_mismatch.
std::optional<Price> induced_bid(const MechanismSpec& spec, const TxView& tx, Price base_fee,
                                 std::int64_t height);
std::optional<Price> induced_bid(const MechanismSpec& spec, const Transaction& tx, Price base_fee,
                                 std::int64_t height);

/// Canonical bid record of the mechanism's bid variant whose induced bid is
/// `level` at base fee r (fee caps get tip max(0, level − r)).
BidParams bid_for_level(const MechanismSpec& spec, Price level, Price base_fee);

/// Whether the protocol accepts a transaction with this bid in a block.
bool bid_is_valid(const MechanismSpec& spec, const TxView& tx, Price base_fee, std::int64_t height);

/// Context of the block being built on top of a chain.
struct BlockContext {
  std::int64_t height = 1;
  Price base_fee = 0.0;
  EnvParams env;
};

BlockContext next_block_context(const ChainState& chain);

/// Validity in a concrete block context (adds the BEOS minimum fee).
bool bid_is_valid(const MechanismSpec& spec, const BlockContext& ctx, const TxView& tx);

/// Induced bid of a transaction the honest allocation may include: valid,
/// with non-negative per-gas margin for the miner (and a non-zero bid under the
/// first-price family). nullopt otherwise.
std::optional<Price> eligible_bid(const MechanismSpec& spec, const BlockContext& ctx,
                                  const TxView& tx);

/// Indices (into `txs`) the honest allocation rule includes, ascending by id.
std::vector<std::size_t> allocate_views(const MechanismSpec& spec, const BlockContext& ctx,
                                        std::span<const TxView> txs, AllocMode mode,
                                        Gas dp_bound = kDefaultDpBound);

Block allocate(const MechanismSpec& spec, const ChainState& chain, const Mempool& mempool,
               AllocMode mode, Gas dp_bound = kDefaultDpBound);

/// Per-gas amounts charged to one included transaction.
struct TxCharge {
  std::string id;
  Price bid = 0.0;
  Price payment = 0.0;  // p_t, to this block's miner
  Price burn = 0.0;     // q_t
  Price forward = 0.0;  // paid forward to later miners
};

struct SettlementReport {
  std::vector<TxCharge> charges;  // block order
  Gwei miner_revenue = 0.0;       // Σ p_t·g_t over real transactions
  Gwei burned_total = 0.0;
  Gwei forwarded_total = 0.0;
  Gwei paid_forward_received = 0.0;  // R_k
};

SettlementReport settle(const MechanismSpec& spec, const ChainState& chain, const Block& block);

/// Settlement without validation; `chain` only supplies pay-forward history.
SettlementReport settle_unchecked(const MechanismSpec& spec, const ChainState& chain,
                                  const Block& block);

enum class ViolationKind {
  oversize,
  gas_used_mismatch,
  height_mismatch,
  base_fee_mismatch,
  fee_cap_below_base,
  bid_below_base,
  bid_not_valid,
  bid_variant_mismatch,
  duplicate_id,
};

const char* to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::string tx_id;  // empty for block-level violations
  std::string detail;
};

std::vector<Violation> validate_block(const MechanismSpec& spec, const ChainState& chain,
                                      const Block& block);

}  // namespace feemech
