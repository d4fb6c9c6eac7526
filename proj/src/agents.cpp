// Copyright 2026 The feemech Authors.
// SPDX-License-Identifier: Apache-2.0

#include "feemech/agents.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_set>

#include "feemech/basefee.hpp"

namespace feemech {

std::string strategy_name(const MinerStrategy& strategy) {
  static constexpr const char* kNames[] = {"honest_myopic", "quantity_setting", "price_setting",
                                           "base_fee_crash_then_monopoly", "fake_padding"};
  return kNames[strategy.index()];
}

std::string strategy_name(const UserStrategy& strategy) {
  static constexpr const char* kNames[] = {"truthful_1559", "truthful_tipless", "shaded_fpa",
                                           "escalator_linear", "uniform_price_fpa"};
  return kNames[strategy.index()];
}

BidParams recommended_bid(const UserStrategy& strategy, Price value, Price base_fee, Price mu) {
  (void)base_fee;
  switch (strategy.index()) {
    case 0: return FeeCapTipBid{value, std::get<Truthful1559>(strategy).assumed_mu.value_or(mu)};
    case 1: return CapOnlyBid{value};
    case 2: return FpaBid{std::get<ShadedFpa>(strategy).factor * value};
    case 3: {
      const auto& e = std::get<EscalatorLinear>(strategy);
      return EscalatorBid{e.start_height, e.start_fraction * value, e.end_height,
                          e.end_fraction * value};
    }
    case 4: return FpaBid{std::min(value, std::get<UniformPriceFpa>(strategy).price)};
  }
  return FpaBid{value};
}

BidParams truthful_bid(const MechanismSpec& spec, Price value, Price mu) {
  BidParams bid = bid_for_level(spec, value, 0.0);
  if (auto* fct = std::get_if<FeeCapTipBid>(&bid)) fct->tip = mu;
  return bid;
}

Mempool apply_user_strategy(const UserStrategy& strategy, Mempool mempool, Price base_fee,
                            Price mu) {
  for (auto& tx : mempool.txs) {
    if (!tx.is_fake) tx.bid = recommended_bid(strategy, tx.value, base_fee, mu);
  }
  return mempool;
}

Gwei myopic_miner_utility(const MechanismSpec& spec, const ChainState& chain, const Block& block) {
  const auto report = settle_unchecked(spec, chain, block);
  const Price mu = chain.env.marginal_cost;
  Gwei u = 0.0;
  for (std::size_t i = 0; i < block.txs.size(); ++i) {
    const auto& tx = block.txs[i];
    const auto& c = report.charges[i];
    const auto g = static_cast<double>(tx.gas_limit);
    if (tx.is_fake) {
      u -= (c.burn + c.forward) * g;
    } else {
      u += c.payment * g;
    }
    u -= mu * g;
  }
  return u;
}

Gwei myopic_miner_utility(const MechanismSpec& spec, const ChainState& chain,
                          const Mempool& mempool, const Block& block) {
  std::unordered_set<std::string> ids;
  for (const auto& tx : mempool.txs) ids.insert(tx.id);
  for (const auto& tx : block.txs) {
    if (!tx.is_fake && !ids.contains(tx.id)) {
      throw Error(ErrorCode::invalid_block, "block transaction " + tx.id + " is not in the mempool");
    }
  }
  return myopic_miner_utility(spec, chain, block);
}

Gwei user_utility(const MechanismSpec& spec, const ChainState& chain, const Mempool& mempool,
                  const Transaction& tx, const BidParams& candidate_bid, AllocMode mode) {
  Mempool with = mempool;
  Transaction mine = tx;
  mine.bid = candidate_bid;
  with.txs.push_back(mine);
  const Block block = allocate(spec, chain, with, mode);
  const auto it = std::find_if(block.txs.begin(), block.txs.end(),
                               [&](const Transaction& t) { return t.id == tx.id; });
  if (it == block.txs.end()) return 0.0;
  const auto report = settle_unchecked(spec, chain, block);
  const auto& c = report.charges[static_cast<std::size_t>(it - block.txs.begin())];
  return (tx.value - c.payment - c.burn - c.forward) * static_cast<double>(tx.gas_limit);
}

Gwei joint_utility(const MechanismSpec& spec, const ChainState& chain, const Block& block) {
  const auto report = settle_unchecked(spec, chain, block);
  const Price mu = chain.env.marginal_cost;
  Gwei u = 0.0;
  for (std::size_t i = 0; i < block.txs.size(); ++i) {
    const auto& tx = block.txs[i];
    const auto& c = report.charges[i];
    u += (tx.value - c.burn - c.forward - mu) * static_cast<double>(tx.gas_limit);
  }
  return u;
}

namespace {

struct Ranked {
  std::size_t index;
  Price bid;
};

// Eligible real transactions by descending bid, ties by id.
std::vector<Ranked> rank_eligible(const MechanismSpec& spec, const BlockContext& ctx,
                                  const Mempool& mempool) {
  std::vector<Ranked> ranked;
  for (std::size_t i = 0; i < mempool.txs.size(); ++i) {
    if (const auto b = eligible_bid(spec, ctx, TxView(mempool.txs[i]))) ranked.push_back({i, *b});
  }
  std::sort(ranked.begin(), ranked.end(), [&](const Ranked& a, const Ranked& b) {
    if (a.bid != b.bid) return a.bid > b.bid;
    return mempool.txs[a.index].id < mempool.txs[b.index].id;
  });
  return ranked;
}

Block take_ranked(const BlockContext& ctx, const Mempool& mempool,
                  const std::vector<Ranked>& ranked, Gas limit, Price min_bid) {
  std::vector<Transaction> txs;
  Gas used = 0;
  for (const auto& r : ranked) {
    if (r.bid < min_bid) break;
    const auto& tx = mempool.txs[r.index];
    if (used + tx.gas_limit > limit) continue;
    used += tx.gas_limit;
    txs.push_back(tx);
  }
  std::sort(txs.begin(), txs.end(),
            [](const Transaction& a, const Transaction& b) { return a.id < b.id; });
  return make_block(ctx.height, ctx.base_fee, std::move(txs));
}

Block quantity_block(const MechanismSpec& spec, const BlockContext& ctx, const Mempool& mempool,
                     Gas q) {
  if (q > ctx.env.max_block_size || q < 0) {
    throw Error(ErrorCode::infeasible_strategy,
                "quantity " + std::to_string(q) + " outside [0, G]");
  }
  return take_ranked(ctx, mempool, rank_eligible(spec, ctx, mempool), q, 0.0);
}

}  // namespace

MinerAction miner_act(const MinerStrategy& strategy, const MechanismSpec& spec,
                      const ChainState& chain, const Mempool& mempool, AllocMode mode) {
  const BlockContext ctx = next_block_context(chain);
  switch (strategy.index()) {
    case 0: return {{}, allocate(spec, chain, mempool, mode)};
    case 1: return {{}, quantity_block(spec, ctx, mempool, std::get<QuantitySetting>(strategy).q)};
    case 2: {
      const Price p = std::get<PriceSetting>(strategy).p;
      if (!(p >= 0)) throw Error(ErrorCode::infeasible_strategy, "negative price");
      return {{}, take_ranked(ctx, mempool, rank_eligible(spec, ctx, mempool),
                              ctx.env.max_block_size, p)};
    }
    case 3: {
      const auto& crash = std::get<BaseFeeCrashThenMonopoly>(strategy);
      if (ctx.base_fee > chain.rule.min_base_fee) {
        return {{}, make_block(ctx.height, ctx.base_fee, {})};
      }
      if (!crash.monopoly_quantity) {
        throw Error(ErrorCode::infeasible_strategy, "monopoly quantity not set");
      }
      return {{}, quantity_block(spec, ctx, mempool, *crash.monopoly_quantity)};
    }
    case 4: {
      const auto& pad = std::get<FakePadding>(strategy);
      if (pad.pad_to > ctx.env.max_block_size) {
        throw Error(ErrorCode::infeasible_strategy, "pad_to exceeds G");
      }
      Block honest = allocate(spec, chain, mempool, mode);
      MinerAction action;
      if (pad.pad_to > honest.gas_used) {
        Price level = pad.pad_bid;
        if (has_base_fee(spec)) level = std::max(ctx.base_fee, pad.pad_bid);
        BidParams bid = bid_for_level(spec, level, ctx.base_fee);
        if (auto* fct = std::get_if<FeeCapTipBid>(&bid)) fct->tip = 0.0;
        action.fakes.push_back(
            Transaction{"~fake-0", pad.pad_to - honest.gas_used, 0.0, bid, true});
      }
      auto txs = honest.txs;
      txs.insert(txs.end(), action.fakes.begin(), action.fakes.end());
      action.block = make_block(ctx.height, ctx.base_fee, std::move(txs));
      return action;
    }
  }
  return {};
}

}  // namespace feemech
