// Copyright 2026 The feemech Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "feemech/core.hpp"
#include "feemech/mechanisms.hpp"

namespace feemech {

// Miner strategies.
struct HonestMyopic {};
/// Include the highest bids up to q gas.
struct QuantitySetting {
  Gas q = 0;
};
/// Include every transaction whose bid is at least p.
struct PriceSetting {
  Price p = 0.0;
};
/// Publish empty blocks until the base fee reaches its floor, then act as a
/// quantity-setting monopolist. An unset quantity is filled in by the
/// simulator from the demand curve's monopoly point.
struct BaseFeeCrashThenMonopoly {
  std::optional<Gas> monopoly_quantity;
};
/// Honest block topped up with fake gas up to pad_to.
struct FakePadding {
  Gas pad_to = 0;
  Price pad_bid = 0.0;
};

using MinerStrategy =
    std::variant<HonestMyopic, QuantitySetting, PriceSetting, BaseFeeCrashThenMonopoly, FakePadding>;

std::string strategy_name(const MinerStrategy& strategy);

// User strategies.
/// Fee cap = value, tip = marginal cost (induced bid min{r+μ, v}).
struct Truthful1559 {
  std::optional<Price> assumed_mu;
};
struct TruthfulTipless {};
struct ShadedFpa {
  double factor = 1.0;
};
/// Escalator from start_fraction·v at start_height to end_fraction·v at end_height.
struct EscalatorLinear {
  std::int64_t start_height = 1;
  std::int64_t end_height = 1;
  double start_fraction = 1.0;
  double end_fraction = 1.0;
};
/// First-price bid min{v, price}: every user able to afford `price` bids it.
struct UniformPriceFpa {
  Price price = 0.0;
};

using UserStrategy =
    std::variant<Truthful1559, TruthfulTipless, ShadedFpa, EscalatorLinear, UniformPriceFpa>;

std::string strategy_name(const UserStrategy& strategy);

BidParams recommended_bid(const UserStrategy& strategy, Price value, Price base_fee, Price mu);

/// The mechanism's truthful bid: FPA{v}, FeeCapTip{v, μ} or CapOnly{v}.
BidParams truthful_bid(const MechanismSpec& spec, Price value, Price mu);

/// Rewrites every bid in the mempool with the strategy's recommendation.
Mempool apply_user_strategy(const UserStrategy& strategy, Mempool mempool, Price base_fee, Price mu);

/// Σ_real p_t·g_t − Σ_fake (q_t + forwarded_t)·g_t − μ·Σ g_t. Fake transactions
/// are recognised by their is_fake flag.
Gwei myopic_miner_utility(const MechanismSpec& spec, const ChainState& chain, const Block& block);

/// Same, after checking that every real transaction of `block` is in `mempool`.
Gwei myopic_miner_utility(const MechanismSpec& spec, const ChainState& chain,
                          const Mempool& mempool, const Block& block);

/// Utility of tx's creator when it joins `mempool` with `candidate_bid`:
/// (v − p − q − forwarded)·g if the honest allocation includes it, else 0.
Gwei user_utility(const MechanismSpec& spec, const ChainState& chain, const Mempool& mempool,
                  const Transaction& tx, const BidParams& candidate_bid,
                  AllocMode mode = AllocMode::exact);

/// Σ (v_t − q_t − forwarded_t − μ)·g_t over the block.
Gwei joint_utility(const MechanismSpec& spec, const ChainState& chain, const Block& block);

struct MinerAction {
  std::vector<Transaction> fakes;
  Block block;
};

MinerAction miner_act(const MinerStrategy& strategy, const MechanismSpec& spec,
                      const ChainState& chain, const Mempool& mempool,
                      AllocMode mode = AllocMode::greedy);

}  // namespace feemech
