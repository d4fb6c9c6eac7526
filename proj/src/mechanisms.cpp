// Copyright 2026 The feemech Authors.
// SPDX-License-Identifier: Apache-2.0

#include "feemech/mechanisms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "feemech/basefee.hpp"

namespace feemech {
namespace {

enum class Family { first_price, base_fee, tipless, beos };

Family family_of(const MechanismSpec& spec) {
  switch (spec.index()) {
    case 0:  // FirstPrice
    case 1:  // Vickrey
    case 2:  // FeeBurningFpa
      return Family::first_price;
    case 5: return Family::tipless;
    case 8: return Family::beos;
    default: return Family::base_fee;
  }
}

[[noreturn]] void mismatch(const MechanismSpec& spec, const BidParams& bid) {
  throw Error(ErrorCode::bid_variant_mismatch, std::string("mechanism ") + mechanism_name(spec) +
                                                   " cannot interpret a " + bid_kind(bid) + " bid");
}

Price beos_min_fee(const Beos& beos, const EnvParams& env) {
  return beos.min_fee.value_or(env.marginal_cost);
}

// Fraction of the base fee that burns; the rest is paid forward.
double burn_fraction(const MechanismSpec& spec) {
  if (std::holds_alternative<Smoothed>(spec)) return 0.0;
  if (const auto* b = std::get_if<Blended>(&spec)) return b->burn_fraction;
  return 1.0;
}

int forward_window(const MechanismSpec& spec) {
  if (const auto* s = std::get_if<Smoothed>(&spec)) return s->window;
  if (const auto* b = std::get_if<Blended>(&spec)) return b->window;
  if (const auto* b = std::get_if<Beos>(&spec)) return b->window;
  return 1;
}

// Common BEOS price for a block: lowest included bid when the block is (almost)
// full, the minimum fee otherwise.
Price beos_price(const Beos& beos, const EnvParams& env, const Block& block) {
  const Price floor_fee = beos_min_fee(beos, env);
  if (block.txs.empty()) return floor_fee;
  const double full_at = beos.full_threshold_fraction * static_cast<double>(env.max_block_size);
  if (static_cast<double>(block.gas_used) < full_at) return floor_fee;
  Price lowest = std::numeric_limits<Price>::infinity();
  for (const auto& tx : block.txs) {
    lowest = std::min(lowest, std::get<CapOnlyBid>(tx.bid).fee_cap);
  }
  return lowest;
}

}  // namespace

std::string mechanism_name(const MechanismSpec& spec) {
  static constexpr const char* kNames[] = {"fpa",      "vickrey", "fpa_burn", "m1559",  "m1559r",
                                           "tipless",  "smoothed", "blended", "beos"};
  return kNames[spec.index()];
}

void validate_mechanism(const MechanismSpec& spec) {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::config_error, what); };
  if (const auto* t = std::get_if<Tipless>(&spec); t && !(t->hardcoded_tip >= 0)) {
    fail("tipless hardcoded tip must be >= 0");
  }
  if (const auto* s = std::get_if<Smoothed>(&spec); s && s->window < 1) {
    fail("smoothed window must be >= 1");
  }
  if (const auto* b = std::get_if<Blended>(&spec)) {
    if (!(b->burn_fraction >= 0.0 && b->burn_fraction <= 1.0)) fail("blended lambda must be in [0,1]");
    if (b->window < 1) fail("blended window must be >= 1");
  }
  if (const auto* b = std::get_if<Beos>(&spec)) {
    if (b->window < 1) fail("beos window must be >= 1");
    if (b->min_fee && !(*b->min_fee >= 0)) fail("beos min_fee must be >= 0");
    if (!(b->full_threshold_fraction > 0.0 && b->full_threshold_fraction <= 1.0)) {
      fail("beos full_threshold_fraction must be in (0,1]");
    }
  }
}

bool has_base_fee(const MechanismSpec& spec) {
  const Family f = family_of(spec);
  return f == Family::base_fee || f == Family::tipless;
}

std::optional<Price> induced_bid(const MechanismSpec& spec, const TxView& tx, Price base_fee,
                                 std::int64_t height) {
  const BidParams& bid = tx.bid();
  switch (family_of(spec)) {
    case Family::first_price:
      if (const auto* b = std::get_if<FpaBid>(&bid)) return b->gas_price;
      if (const auto* e = std::get_if<EscalatorBid>(&bid)) {
        if (height < e->start_height || height > e->end_height) return std::nullopt;
        if (e->end_height == e->start_height) return e->start_bid;
        const double frac = static_cast<double>(height - e->start_height) /
                            static_cast<double>(e->end_height - e->start_height);
        return e->start_bid + (e->end_bid - e->start_bid) * frac;
      }
      break;
    case Family::base_fee:
      if (const auto* b = std::get_if<FeeCapTipBid>(&bid)) {
        return std::min(base_fee + b->tip, b->fee_cap);
      }
      break;
    case Family::tipless:
      if (const auto* b = std::get_if<CapOnlyBid>(&bid)) {
        return std::min(base_fee + std::get<Tipless>(spec).hardcoded_tip, b->fee_cap);
      }
      break;
    case Family::beos:
      if (const auto* b = std::get_if<CapOnlyBid>(&bid)) return b->fee_cap;
      break;
  }
  mismatch(spec, bid);
}

std::optional<Price> induced_bid(const MechanismSpec& spec, const Transaction& tx, Price base_fee,
                                 std::int64_t height) {
  return induced_bid(spec, TxView(tx), base_fee, height);
}

BidParams bid_for_level(const MechanismSpec& spec, Price level, Price base_fee) {
  switch (family_of(spec)) {
    case Family::first_price: return FpaBid{level};
    case Family::base_fee: return FeeCapTipBid{level, std::max(0.0, level - base_fee)};
    case Family::tipless:
    case Family::beos: return CapOnlyBid{level};
  }
  return FpaBid{level};
}

bool bid_is_valid(const MechanismSpec& spec, const TxView& tx, Price base_fee,
                  std::int64_t height) {
  const auto b = induced_bid(spec, tx, base_fee, height);
  if (!b) return false;
  switch (family_of(spec)) {
    case Family::first_price: return true;
    case Family::base_fee:
      return std::get<FeeCapTipBid>(tx.bid()).fee_cap >= base_fee && *b >= base_fee;
    case Family::tipless: return std::get<CapOnlyBid>(tx.bid()).fee_cap >= base_fee;
    case Family::beos: return true;
  }
  return false;
}

bool bid_is_valid(const MechanismSpec& spec, const BlockContext& ctx, const TxView& tx) {
  if (!bid_is_valid(spec, tx, ctx.base_fee, ctx.height)) return false;
  if (const auto* beos = std::get_if<Beos>(&spec)) {
    return *induced_bid(spec, tx, ctx.base_fee, ctx.height) >= beos_min_fee(*beos, ctx.env);
  }
  return true;
}

std::optional<Price> eligible_bid(const MechanismSpec& spec, const BlockContext& ctx,
                                  const TxView& tx) {
  if (!bid_is_valid(spec, tx, ctx.base_fee, ctx.height)) return std::nullopt;
  const Price b = *induced_bid(spec, tx, ctx.base_fee, ctx.height);
  const Price r = ctx.base_fee;
  const Price mu = ctx.env.marginal_cost;
  bool ok = false;
  switch (family_of(spec)) {
    case Family::first_price: ok = b > 0.0 && b - mu >= 0.0; break;
    case Family::base_fee: ok = b - r - mu >= 0.0; break;
    case Family::tipless: ok = b >= r + std::get<Tipless>(spec).hardcoded_tip; break;
    case Family::beos: ok = b >= beos_min_fee(std::get<Beos>(spec), ctx.env); break;
  }
  return ok ? std::optional<Price>(b) : std::nullopt;
}

BlockContext next_block_context(const ChainState& chain) {
  return BlockContext{chain.next_height(), current_base_fee(chain), chain.env};
}

std::vector<std::size_t> allocate_views(const MechanismSpec& spec, const BlockContext& ctx,
                                        std::span<const TxView> txs, AllocMode mode,
                                        Gas dp_bound) {
  const Price r = ctx.base_fee;
  const Price mu = ctx.env.marginal_cost;
  const Family family = family_of(spec);

  std::vector<std::size_t> order(txs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return txs[a].id() < txs[b].id(); });

  struct Candidate {
    std::size_t index;
    Price bid;
  };
  std::vector<Candidate> candidates;
  for (std::size_t i : order) {
    if (const auto b = eligible_bid(spec, ctx, txs[i])) candidates.push_back({i, *b});
  }

  std::vector<std::size_t> chosen;
  if (family == Family::beos) {
    // Best prefix of the bid-sorted candidates under (lowest bid − μ) × gas.
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Candidate& a, const Candidate& b) { return a.bid > b.bid; });
    double best_value = 0.0;
    std::size_t best_len = 0;
    Gas gas = 0;
    for (std::size_t k = 0; k < candidates.size(); ++k) {
      gas += txs[candidates[k].index].gas_limit();
      if (gas > ctx.env.max_block_size) break;
      const double value = (candidates[k].bid - mu) * static_cast<double>(gas);
      if (value >= best_value - kValueTieEps) {
        best_value = std::max(best_value, value);
        best_len = k + 1;
      }
    }
    for (std::size_t k = 0; k < best_len; ++k) chosen.push_back(candidates[k].index);
  } else {
    std::vector<KnapsackItem> items;
    std::vector<std::size_t> item_tx;
    for (const auto& c : candidates) {
      double per_gas = 1.0;  // tipless packs gas
      if (family == Family::first_price) per_gas = c.bid - mu;
      if (family == Family::base_fee) per_gas = c.bid - r - mu;
      const Gas g = txs[c.index].gas_limit();
      items.push_back({g, per_gas * static_cast<double>(g)});
      item_tx.push_back(c.index);
    }
    const auto picked = mode == AllocMode::exact
                            ? knapsack_exact(items, ctx.env.max_block_size, dp_bound)
                            : knapsack_greedy(items, ctx.env.max_block_size);
    for (std::size_t k : picked) chosen.push_back(item_tx[k]);
  }

  std::sort(chosen.begin(), chosen.end(),
            [&](std::size_t a, std::size_t b) { return txs[a].id() < txs[b].id(); });
  return chosen;
}

Block allocate(const MechanismSpec& spec, const ChainState& chain, const Mempool& mempool,
               AllocMode mode, Gas dp_bound) {
  const BlockContext ctx = next_block_context(chain);
  const auto views = redact(mempool.txs);
  const auto chosen = allocate_views(spec, ctx, views, mode, dp_bound);
  std::vector<Transaction> txs;
  txs.reserve(chosen.size());
  for (std::size_t i : chosen) txs.push_back(mempool.txs[i]);
  return make_block(ctx.height, ctx.base_fee, std::move(txs));
}

SettlementReport settle_unchecked(const MechanismSpec& spec, const ChainState& chain,
                                  const Block& block) {
  const Price r = block.base_fee;
  const Family family = family_of(spec);
  SettlementReport report;
  report.charges.reserve(block.txs.size());

  Price lowest = std::numeric_limits<Price>::infinity();
  std::vector<Price> bids;
  bids.reserve(block.txs.size());
  for (const auto& tx : block.txs) {
    const Price b = induced_bid(spec, tx, r, block.height).value_or(0.0);
    bids.push_back(b);
    lowest = std::min(lowest, b);
  }

  const Price beos_common =
      family == Family::beos ? beos_price(std::get<Beos>(spec), chain.env, block) : 0.0;
  const double lambda = burn_fraction(spec);
  const int window = forward_window(spec);

  for (std::size_t i = 0; i < block.txs.size(); ++i) {
    const auto& tx = block.txs[i];
    const Price b = bids[i];
    TxCharge c{tx.id, b, 0.0, 0.0, 0.0};
    switch (spec.index()) {
      case 0: c.payment = b; break;                    // FirstPrice
      case 1: c.payment = lowest; break;               // Vickrey
      case 2: c.burn = b; break;                       // FeeBurningFpa
      case 3: c.payment = b - r; c.burn = r; break;    // M1559
      case 4: c.payment = b; break;                    // M1559R
      case 5: c.payment = b - r; c.burn = r; break;    // Tipless
      case 6:                                          // Smoothed
      case 7:                                          // Blended
        c.payment = b - r;
        c.burn = lambda * r;
        c.forward = (1.0 - lambda) * r;
        break;
      case 8:  // Beos
        c.payment = beos_common / window;
        c.forward = beos_common * (window - 1) / window;
        break;
    }
    const auto g = static_cast<double>(tx.gas_limit);
    if (!tx.is_fake) report.miner_revenue += c.payment * g;
    report.burned_total += c.burn * g;
    report.forwarded_total += c.forward * g;
    report.charges.push_back(std::move(c));
  }

  // Paid-forward revenue collected by this block's miner.
  if (family == Family::base_fee && lambda < 1.0) {
    const auto& blocks = chain.blocks;
    const std::size_t first = blocks.size() > static_cast<std::size_t>(window)
                                  ? blocks.size() - static_cast<std::size_t>(window)
                                  : 0;
    Gwei sum = 0.0;
    for (std::size_t i = first; i < blocks.size(); ++i) {
      sum += (1.0 - lambda) * blocks[i].base_fee * static_cast<double>(blocks[i].gas_used);
    }
    report.paid_forward_received = sum / window;
  } else if (family == Family::beos && window > 1) {
    const auto& beos = std::get<Beos>(spec);
    const auto& blocks = chain.blocks;
    const std::size_t earlier = static_cast<std::size_t>(window - 1);
    const std::size_t first = blocks.size() > earlier ? blocks.size() - earlier : 0;
    Gwei sum = 0.0;
    for (std::size_t i = first; i < blocks.size(); ++i) {
      sum += beos_price(beos, chain.env, blocks[i]) * static_cast<double>(blocks[i].gas_used);
    }
    report.paid_forward_received = sum / window;
  }
  return report;
}

SettlementReport settle(const MechanismSpec& spec, const ChainState& chain, const Block& block) {
  const auto violations = validate_block(spec, chain, block);
  if (!violations.empty()) {
    std::string what = "invalid block:";
    for (const auto& v : violations) {
      what += std::string(" ") + to_string(v.kind) + (v.tx_id.empty() ? "" : "(" + v.tx_id + ")");
    }
    throw Error(ErrorCode::invalid_block, what);
  }
  return settle_unchecked(spec, chain, block);
}

const char* to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::oversize: return "OversizeBlock";
    case ViolationKind::gas_used_mismatch: return "GasUsedMismatch";
    case ViolationKind::height_mismatch: return "HeightMismatch";
    case ViolationKind::base_fee_mismatch: return "BaseFeeMismatch";
    case ViolationKind::fee_cap_below_base: return "FeeCapBelowBase";
    case ViolationKind::bid_below_base: return "BidBelowBase";
    case ViolationKind::bid_not_valid: return "BidNotValid";
    case ViolationKind::bid_variant_mismatch: return "BidVariantMismatch";
    case ViolationKind::duplicate_id: return "DuplicateId";
  }
  return "Unknown";
}

std::vector<Violation> validate_block(const MechanismSpec& spec, const ChainState& chain,
                                      const Block& block) {
  std::vector<Violation> out;
  const Gas recomputed = block_gas(block);
  if (recomputed != block.gas_used) {
    out.push_back({ViolationKind::gas_used_mismatch, "",
                   "gas_used " + std::to_string(block.gas_used) + " != " + std::to_string(recomputed)});
  }
  if (recomputed > chain.env.max_block_size) {
    out.push_back({ViolationKind::oversize, "", std::to_string(recomputed) + " gas"});
  }
  if (block.height != chain.next_height()) {
    out.push_back({ViolationKind::height_mismatch, "", "expected " + std::to_string(chain.next_height())});
  }
  const Price expected = current_base_fee(chain);
  if (std::abs(block.base_fee - expected) > 1e-9 * std::max(1.0, std::abs(expected))) {
    out.push_back({ViolationKind::base_fee_mismatch, "", "expected " + std::to_string(expected)});
  }

  std::unordered_set<std::string> seen;
  const Family family = family_of(spec);
  for (const auto& tx : block.txs) {
    if (!seen.insert(tx.id).second) {
      out.push_back({ViolationKind::duplicate_id, tx.id, ""});
    }
    std::optional<Price> b;
    try {
      b = induced_bid(spec, tx, block.base_fee, block.height);
    } catch (const Error&) {
      out.push_back({ViolationKind::bid_variant_mismatch, tx.id, bid_kind(tx.bid)});
      continue;
    }
    if (!b) {
      out.push_back({ViolationKind::bid_not_valid, tx.id, "escalator outside its window"});
      continue;
    }
    if (family == Family::base_fee || family == Family::tipless) {
      const Price cap = family == Family::tipless ? std::get<CapOnlyBid>(tx.bid).fee_cap
                                                  : std::get<FeeCapTipBid>(tx.bid).fee_cap;
      if (std::holds_alternative<M1559R>(spec)) {
        if (*b < block.base_fee) out.push_back({ViolationKind::bid_below_base, tx.id, ""});
      } else if (cap < block.base_fee) {
        out.push_back({ViolationKind::fee_cap_below_base, tx.id, ""});
      }
    }
    if (family == Family::beos && *b < beos_min_fee(std::get<Beos>(spec), chain.env)) {
      out.push_back({ViolationKind::bid_not_valid, tx.id, "bid below the minimum fee"});
    }
  }
  return out;
}

}  // namespace feemech
