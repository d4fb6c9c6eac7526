// Copyright 2026 The feemech Authors.
// SPDX-License-Identifier: Apache-2.0

#include "feemech/game_checks.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace feemech {
namespace {

std::int64_t quantize(double x) { return std::llround(x * 1e9); }

std::string fmt(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

void charge(std::uint64_t& used, std::uint64_t amount, std::uint64_t budget) {
  used += amount;
  if (used > budget) {
    throw Error(ErrorCode::budget_exceeded,
                "enumeration needs more than " + std::to_string(budget) + " evaluations");
  }
}

// Saturating product for enumeration-size estimates.
std::uint64_t pow_sat(std::uint64_t base, std::size_t exp) {
  std::uint64_t out = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (base != 0 && out > UINT64_MAX / base) return UINT64_MAX;
    out *= base;
  }
  return out;
}

std::uint64_t mul_sat(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > UINT64_MAX / a) return UINT64_MAX;
  return a * b;
}

// One representative bid per behaviour class: two bids with the same validity
// and induced bid are allocated and charged identically.
struct BidClass {
  BidParams bid;
  bool valid = false;
  Price induced = 0.0;
  Price level = 0.0;  // grid level the representative came from
};

std::vector<BidClass> classes_of(const MechanismSpec& spec, const BlockContext& ctx,
                                 const std::vector<BidParams>& bids,
                                 const std::vector<Price>& levels) {
  std::vector<BidClass> out;
  std::set<std::pair<bool, std::int64_t>> seen;
  Transaction probe{"probe", 1, 0.0, FpaBid{}, false};
  for (std::size_t i = 0; i < bids.size(); ++i) {
    probe.bid = bids[i];
    const TxView view(probe);
    const auto b = induced_bid(spec, view, ctx.base_fee, ctx.height);
    const bool valid = b && bid_is_valid(spec, ctx, view);
    const std::pair<bool, std::int64_t> key{valid, valid ? quantize(*b) : 0};
    if (seen.insert(key).second) out.push_back({bids[i], valid, b.value_or(0.0), levels[i]});
  }
  return out;
}

// Grid bids a user may submit: fee cap × tip for fee-cap mechanisms, one bid
// per level otherwise.
std::vector<BidClass> deviation_classes(const MechanismSpec& spec, const BlockContext& ctx,
                                        const std::vector<Price>& grid) {
  std::vector<BidParams> bids;
  std::vector<Price> levels;
  const bool fee_cap_tip = std::holds_alternative<FeeCapTipBid>(bid_for_level(spec, 0.0, 0.0));
  for (Price cap : grid) {
    if (fee_cap_tip) {
      for (Price tip : grid) {
        bids.push_back(FeeCapTipBid{cap, tip});
        levels.push_back(cap);
      }
    } else {
      bids.push_back(bid_for_level(spec, cap, ctx.base_fee));
      levels.push_back(cap);
    }
  }
  return classes_of(spec, ctx, bids, levels);
}

std::vector<BidClass> level_classes(const MechanismSpec& spec, const BlockContext& ctx,
                                    const std::vector<Price>& grid) {
  std::vector<BidParams> bids;
  for (Price level : grid) bids.push_back(bid_for_level(spec, level, ctx.base_fee));
  return classes_of(spec, ctx, bids, grid);
}

std::vector<Transaction> sorted_by_id(std::vector<Transaction> txs) {
  std::sort(txs.begin(), txs.end(),
            [](const Transaction& a, const Transaction& b) { return a.id < b.id; });
  return txs;
}

std::vector<Transaction> without(const std::vector<Transaction>& txs, std::size_t skip) {
  std::vector<Transaction> out;
  for (std::size_t i = 0; i < txs.size(); ++i) {
    if (i != skip) out.push_back(txs[i]);
  }
  return out;
}

// Fake-and-block enumeration shared by the MMIC and γ-costly checks.
// gamma unset: MMIC; set: costly.
Verdict miner_deviation_check(const MechanismSpec& spec, const Instance& inst,
                              std::optional<Price> gamma, std::uint64_t budget) {
  inst.validate();
  validate_mechanism(spec);
  const BlockContext ctx = next_block_context(inst.chain);
  const Gas cap = ctx.env.max_block_size;

  std::vector<Transaction> reals;
  for (const auto& tx : sorted_by_id(inst.mempool.txs)) {
    if (bid_is_valid(spec, ctx, TxView(tx))) reals.push_back(tx);
  }
  std::vector<Transaction> fake_types;
  for (Price level : inst.bid_grid) {
    for (Gas g : inst.gas_grid) {
      Transaction fake{"~fake", g, 0.0, bid_for_level(spec, level, ctx.base_fee), true};
      if (bid_is_valid(spec, ctx, TxView(fake))) fake_types.push_back(std::move(fake));
    }
  }

  // Multisets of fake types, as non-decreasing index sequences, smallest first.
  std::vector<std::vector<std::size_t>> multisets{{}};
  for (std::size_t size = 1; size <= static_cast<std::size_t>(inst.max_fakes); ++size) {
    std::vector<std::size_t> idx(size, 0);
    if (fake_types.empty()) break;
    while (true) {
      multisets.push_back(idx);
      std::size_t k = size;
      while (k > 0 && idx[k - 1] + 1 == fake_types.size()) --k;
      if (k == 0) break;
      const std::size_t next = idx[k - 1] + 1;
      for (std::size_t j = k - 1; j < size; ++j) idx[j] = next;
    }
  }

  const std::size_t masks = std::size_t{1} << reals.size();
  if (mul_sat(multisets.size(), masks) > budget) {
    throw Error(ErrorCode::budget_exceeded,
                std::to_string(multisets.size()) + " fake multisets x " + std::to_string(masks) +
                    " blocks exceeds the budget");
  }

  Verdict verdict;
  auto block_of = [&](std::size_t mask, const std::vector<Transaction>& fakes) {
    std::vector<Transaction> txs;
    for (std::size_t i = 0; i < reals.size(); ++i) {
      if (mask >> i & 1) txs.push_back(reals[i]);
    }
    txs.insert(txs.end(), fakes.begin(), fakes.end());
    return make_block(ctx.height, ctx.base_fee, sorted_by_id(std::move(txs)));
  };
  std::vector<Gas> mask_gas(masks, 0);
  for (std::size_t m = 1; m < masks; ++m) {
    const std::size_t low = static_cast<std::size_t>(__builtin_ctzll(m));
    mask_gas[m] = mask_gas[m & (m - 1)] + reals[low].gas_limit;
  }

  // Real-only utilities, indexed by mask (also the costly baseline).
  std::vector<double> real_utility(masks, 0.0);
  for (std::size_t m = 0; m < masks; ++m) {
    if (mask_gas[m] > cap) continue;
    real_utility[m] = myopic_miner_utility(spec, inst.chain, block_of(m, {}));
    ++verdict.evaluations;
  }

  const Block honest = allocate(spec, inst.chain, inst.mempool, AllocMode::exact);
  const double honest_u = myopic_miner_utility(spec, inst.chain, honest);

  bool have_best = false;
  double best_gap = 0.0;
  Gas best_gas = 0;
  Witness best;
  for (const auto& ms : multisets) {
    if (gamma && ms.empty()) continue;
    std::vector<Transaction> fakes;
    Gas fake_gas = 0;
    for (std::size_t k = 0; k < ms.size(); ++k) {
      Transaction f = fake_types[ms[k]];
      f.id = "~fake-" + std::to_string(k);
      fake_gas += f.gas_limit;
      fakes.push_back(std::move(f));
    }
    if (fake_gas > cap) continue;
    for (std::size_t m = 0; m < masks; ++m) {
      if (mask_gas[m] + fake_gas > cap) continue;
      double u = real_utility[m];
      if (!fakes.empty()) {
        u = myopic_miner_utility(spec, inst.chain, block_of(m, fakes));
        ++verdict.evaluations;
      }
      const double baseline =
          gamma ? real_utility[m] - *gamma * static_cast<double>(fake_gas) : honest_u;
      const double gap = u - baseline;
      const Gas gas = mask_gas[m] + fake_gas;
      // Largest gain; among equal gains the fullest block, then enumeration order.
      const bool better = !have_best || gap > best_gap + kUtilityTolerance ||
                          (gap > best_gap - kUtilityTolerance && gas > best_gas);
      if (better) {
        have_best = true;
        best_gap = gap;
        best_gas = gas;
        best.block = block_of(m, fakes);
        best.baseline = baseline;
        best.deviation = u;
      }
    }
  }

  if (have_best && best_gap > kUtilityTolerance) {
    verdict.holds = false;
    best.kind = gamma ? WitnessKind::costly_violation : WitnessKind::miner_deviation;
    best.gamma = gamma.value_or(0.0);
    best.delta = best_gap;
    std::ostringstream os;
    os << "block {";
    for (std::size_t i = 0; i < best.block.txs.size(); ++i) {
      const auto& tx = best.block.txs[i];
      os << (i ? ", " : "") << (tx.is_fake ? "fake" : tx.id) << " bid "
         << fmt(induced_bid(spec, tx, ctx.base_fee, ctx.height).value_or(0.0));
    }
    os << "} gives miner utility " << fmt(best.deviation);
    if (gamma) {
      os << " > " << fmt(best.baseline) << " (fake-free utility minus gamma " << fmt(*gamma)
         << " per fake gas)";
    } else {
      os << " > honest " << fmt(honest_u);
    }
    best.description = os.str();
    verdict.witness = std::move(best);
  }
  return verdict;
}

// Best unilateral deviation of profile.txs[i] against the rest of the profile.
struct UserGain {
  double baseline = 0.0;
  double best = 0.0;
  std::optional<BidParams> bid;
};

UserGain best_deviation(const MechanismSpec& spec, const ChainState& chain,
                        const std::vector<Transaction>& profile, std::size_t i,
                        const std::vector<BidClass>& deviations, std::uint64_t& evaluations) {
  Mempool others{without(profile, i)};
  const Transaction& tx = profile[i];
  UserGain gain;
  gain.baseline = user_utility(spec, chain, others, tx, tx.bid);
  gain.best = gain.baseline;
  ++evaluations;
  for (const auto& d : deviations) {
    const double u = user_utility(spec, chain, others, tx, d.bid);
    ++evaluations;
    if (u > gain.best + kUtilityTolerance) {
      gain.best = u;
      gain.bid = d.bid;
    }
  }
  return gain;
}

Witness user_witness(const MechanismSpec& spec, const BlockContext& ctx,
                     const std::vector<Transaction>& profile, std::size_t i, const UserGain& g) {
  Witness w;
  w.kind = WitnessKind::user_deviation;
  w.tx_id = profile[i].id;
  w.strategy_bid = profile[i].bid;
  w.deviating_bid = g.bid;
  w.others = without(profile, i);
  w.baseline = g.baseline;
  w.deviation = g.best;
  w.delta = g.best - g.baseline;
  std::ostringstream os;
  os << "tx " << w.tx_id << " (value " << fmt(profile[i].value) << ") bidding "
     << fmt(induced_bid(spec, profile[i], ctx.base_fee, ctx.height).value_or(0.0))
     << " gets utility " << fmt(g.baseline) << "; a " << bid_kind(*g.bid) << " bid inducing "
     << fmt(induced_bid(spec, Transaction{w.tx_id, 1, 0.0, *g.bid, false}, ctx.base_fee,
                        ctx.height)
                .value_or(0.0))
     << " gets " << fmt(g.best) << " against bids {";
  for (std::size_t k = 0; k < w.others.size(); ++k) {
    os << (k ? ", " : "") << w.others[k].id << ": "
       << fmt(induced_bid(spec, w.others[k], ctx.base_fee, ctx.height).value_or(0.0));
  }
  os << "}";
  w.description = os.str();
  return w;
}

}  // namespace

void Instance::validate() const {
  chain.env.validate();
  chain.rule.validate();
  check_unique_ids(mempool.txs);
  if (bid_grid.empty()) throw Error(ErrorCode::config_error, "instance bid_grid is empty");
  for (Price p : bid_grid) {
    if (!(p >= 0)) throw Error(ErrorCode::config_error, "bid_grid levels must be >= 0");
  }
  for (Gas g : gas_grid) {
    if (g <= 0) throw Error(ErrorCode::config_error, "gas_grid entries must be > 0");
  }
  if (max_fakes < 0) throw Error(ErrorCode::config_error, "max_fakes must be >= 0");
  for (const auto& tx : mempool.txs) {
    if (tx.gas_limit <= 0) throw Error(ErrorCode::config_error, "gas_limit must be > 0");
    if (!(tx.value >= 0)) throw Error(ErrorCode::config_error, "values must be >= 0");
    validate_bid(tx.bid);
  }
}

const char* to_string(WitnessKind kind) {
  switch (kind) {
    case WitnessKind::miner_deviation: return "miner_deviation";
    case WitnessKind::costly_violation: return "costly_violation";
    case WitnessKind::user_deviation: return "user_deviation";
    case WitnessKind::oca: return "oca";
    case WitnessKind::outcome_mismatch: return "outcome_mismatch";
  }
  return "unknown";
}

Verdict check_mmic(const MechanismSpec& spec, const Instance& inst, std::uint64_t budget) {
  return miner_deviation_check(spec, inst, std::nullopt, budget);
}

Verdict check_costly(const MechanismSpec& spec, const Instance& inst, Price gamma,
                     std::uint64_t budget) {
  if (!(gamma >= 0)) throw Error(ErrorCode::config_error, "gamma must be >= 0");
  return miner_deviation_check(spec, inst, gamma, budget);
}

Verdict check_uic_epne(const MechanismSpec& spec, const Instance& inst,
                       const UserStrategy& strategy, std::uint64_t budget) {
  inst.validate();
  validate_mechanism(spec);
  const BlockContext ctx = next_block_context(inst.chain);
  const auto profile = sorted_by_id(
      apply_user_strategy(strategy, inst.mempool, ctx.base_fee, ctx.env.marginal_cost).txs);
  const auto deviations = deviation_classes(spec, ctx, inst.bid_grid);
  if (mul_sat(profile.size(), deviations.size() + 1) > budget) {
    throw Error(ErrorCode::budget_exceeded, "deviation enumeration exceeds the budget");
  }

  Verdict verdict;
  std::optional<Witness> best;
  for (std::size_t i = 0; i < profile.size(); ++i) {
    const auto g = best_deviation(spec, inst.chain, profile, i, deviations, verdict.evaluations);
    if (g.bid && (!best || g.best - g.baseline > best->delta + kUtilityTolerance)) {
      best = user_witness(spec, ctx, profile, i, g);
    }
  }
  if (best) {
    verdict.holds = false;
    verdict.witness = std::move(best);
  }
  return verdict;
}

Verdict check_dominant(const MechanismSpec& spec, const Instance& inst,
                       const UserStrategy& strategy, std::uint64_t budget) {
  inst.validate();
  validate_mechanism(spec);
  const BlockContext ctx = next_block_context(inst.chain);
  const auto truthful = sorted_by_id(
      apply_user_strategy(strategy, inst.mempool, ctx.base_fee, ctx.env.marginal_cost).txs);
  const auto deviations = deviation_classes(spec, ctx, inst.bid_grid);
  const auto opponents = level_classes(spec, ctx, inst.bid_grid);
  const std::size_t n = truthful.size();
  if (n == 0) return {};

  const std::uint64_t profiles = pow_sat(opponents.size(), n - 1);
  std::uint64_t used = 0;
  charge(used, mul_sat(mul_sat(n, profiles), deviations.size() + 1), budget);

  Verdict verdict;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::size_t> odo(n - 1, 0);
    while (true) {
      std::vector<Transaction> profile = truthful;
      for (std::size_t k = 0, j = 0; k < n; ++k) {
        if (k == i) continue;
        profile[k].bid = opponents[odo[j++]].bid;
      }
      const auto g = best_deviation(spec, inst.chain, profile, i, deviations, verdict.evaluations);
      if (g.bid) {
        verdict.holds = false;
        verdict.witness = user_witness(spec, ctx, profile, i, g);
        return verdict;
      }
      std::size_t k = 0;
      while (k < odo.size() && ++odo[k] == opponents.size()) odo[k++] = 0;
      if (k == odo.size()) break;
    }
  }
  return verdict;
}

Verdict check_oca_proof(const MechanismSpec& spec, const Instance& inst, std::uint64_t budget) {
  inst.validate();
  validate_mechanism(spec);
  const BlockContext ctx = next_block_context(inst.chain);
  const auto txs = sorted_by_id(inst.mempool.txs);
  const std::size_t n = txs.size();
  const auto classes = level_classes(spec, ctx, inst.bid_grid);

  Verdict verdict;
  std::uint64_t used = 0;

  // Off-chain side: any feasible set, each member on the cheapest valid grid bid.
  const BidClass* cheapest = nullptr;
  for (const auto& c : classes) {
    if (c.valid && (!cheapest || c.induced < cheapest->induced)) cheapest = &c;
  }
  double oca_best = 0.0;
  Block oca_block = make_block(ctx.height, ctx.base_fee, {});
  charge(used, std::uint64_t{1} << n, budget);
  for (std::size_t m = 0; m < (std::size_t{1} << n); ++m) {
    std::vector<Transaction> members;
    Gas gas = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!(m >> i & 1)) continue;
      members.push_back(txs[i]);
      gas += txs[i].gas_limit;
    }
    if (gas > ctx.env.max_block_size) continue;
    if (!members.empty() && !cheapest) continue;
    for (auto& t : members) t.bid = cheapest->bid;
    Block b = make_block(ctx.height, ctx.base_fee, std::move(members));
    const double u = joint_utility(spec, inst.chain, b);
    ++verdict.evaluations;
    if (u > oca_best + kUtilityTolerance) {
      oca_best = u;
      oca_block = std::move(b);
    }
  }

  // On-chain side: every grid bid vector, nearest-to-value bids first. A
  // transaction whose value covers the base fee keeps a valid bid.
  std::vector<std::vector<const BidClass*>> options(n);
  for (std::size_t i = 0; i < n; ++i) {
    const bool must_be_valid = has_base_fee(spec) && txs[i].value >= ctx.base_fee;
    for (const auto& c : classes) {
      if (!must_be_valid || c.valid) options[i].push_back(&c);
    }
    std::stable_sort(options[i].begin(), options[i].end(),
                     [&](const BidClass* a, const BidClass* b) {
                       return std::abs(a->level - txs[i].value) < std::abs(b->level - txs[i].value);
                     });
    if (options[i].empty()) {
      throw Error(ErrorCode::config_error, "no valid grid bid for " + txs[i].id);
    }
  }
  double chain_best = -std::numeric_limits<double>::infinity();
  Block chain_block;
  std::vector<std::size_t> odo(n, 0);
  while (true) {
    charge(used, 1, budget);
    Mempool m{txs};
    for (std::size_t i = 0; i < n; ++i) m.txs[i].bid = options[i][odo[i]]->bid;
    Block b = allocate(spec, inst.chain, m, AllocMode::exact);
    const double u = joint_utility(spec, inst.chain, b);
    ++verdict.evaluations;
    if (u > chain_best + kUtilityTolerance) {
      chain_best = u;
      chain_block = std::move(b);
    }
    if (chain_best >= oca_best - kUtilityTolerance) return verdict;
    std::size_t k = 0;
    while (k < n && ++odo[k] == options[k].size()) odo[k++] = 0;
    if (k == n) break;
  }

  verdict.holds = false;
  Witness w;
  w.kind = WitnessKind::oca;
  w.block = oca_block;
  w.onchain_block = chain_block;
  w.baseline = chain_best;
  w.deviation = oca_best;
  w.delta = oca_best - chain_best;
  std::ostringstream os;
  os << "coalition mining {";
  for (std::size_t i = 0; i < oca_block.txs.size(); ++i) {
    os << (i ? ", " : "") << oca_block.txs[i].id;
  }
  os << "} at the cheapest valid bid reaches joint utility " << fmt(oca_best)
     << "; the best on-chain bid vector reaches " << fmt(chain_best);
  w.description = os.str();
  verdict.witness = std::move(w);
  return verdict;
}

Verdict check_1559r_fpa_equivalence(const Instance& inst, std::uint64_t budget) {
  inst.validate();
  const MechanismSpec fpa = FirstPrice{};
  const MechanismSpec r1559 = M1559R{};
  const BlockContext ctx = next_block_context(inst.chain);
  const auto txs = sorted_by_id(inst.mempool.txs);
  const std::size_t n = txs.size();
  const auto& grid = inst.bid_grid;
  const std::size_t masks = std::size_t{1} << n;

  std::vector<Gas> mask_gas(masks, 0);
  for (std::size_t m = 1; m < masks; ++m) {
    mask_gas[m] = mask_gas[m & (m - 1)] + txs[static_cast<std::size_t>(__builtin_ctzll(m))].gas_limit;
  }

  using Outcome = std::pair<std::size_t, std::vector<std::int64_t>>;  // (set, net payments)
  std::set<Outcome> fpa_set;
  std::set<Outcome> oca_set;
  std::uint64_t used = 0;
  Verdict verdict;

  // First price: every bid vector, every allocation maximizing Σ b·g.
  charge(used, mul_sat(pow_sat(grid.size(), n), masks), budget);
  std::vector<std::size_t> odo(n, 0);
  while (true) {
    double best = -1.0;
    std::vector<double> score(masks, -1.0);
    for (std::size_t m = 0; m < masks; ++m) {
      if (mask_gas[m] > ctx.env.max_block_size) continue;
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (m >> i & 1) {
          const Transaction probe{txs[i].id, txs[i].gas_limit, 0.0,
                                  bid_for_level(fpa, grid[odo[i]], ctx.base_fee), false};
          s += *induced_bid(fpa, probe, ctx.base_fee, ctx.height) *
               static_cast<double>(txs[i].gas_limit);
        }
      }
      score[m] = s;
      best = std::max(best, s);
      ++verdict.evaluations;
    }
    for (std::size_t m = 0; m < masks; ++m) {
      if (score[m] < 0 || score[m] < best - kUtilityTolerance) continue;
      Outcome o{m, std::vector<std::int64_t>(n, 0)};
      for (std::size_t i = 0; i < n; ++i) {
        if (m >> i & 1) o.second[i] = quantize(grid[odo[i]]);
      }
      fpa_set.insert(std::move(o));
    }
    std::size_t k = 0;
    while (k < n && ++odo[k] == grid.size()) odo[k++] = 0;
    if (k == n) break;
  }

  // 1559-R with transfers: each member bids a valid grid level on-chain and
  // tops it up with a transfer so that its net payment is a grid level.
  std::vector<std::set<std::int64_t>> nets(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (Price level : grid) {
      const Transaction probe{txs[i].id, txs[i].gas_limit, 0.0,
                              bid_for_level(r1559, level, ctx.base_fee), false};
      if (!bid_is_valid(r1559, ctx, TxView(probe))) continue;
      const Price on_chain = *induced_bid(r1559, probe, ctx.base_fee, ctx.height);
      for (Price target : grid) {
        const Price transfer = target - on_chain;
        nets[i].insert(quantize(on_chain + transfer));
        ++verdict.evaluations;
      }
    }
  }
  for (std::size_t m = 0; m < masks; ++m) {
    if (mask_gas[m] > ctx.env.max_block_size) continue;
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < n; ++i) {
      if (m >> i & 1) members.push_back(i);
    }
    std::vector<std::vector<std::int64_t>> choices;
    bool possible = true;
    for (std::size_t i : members) {
      choices.emplace_back(nets[i].begin(), nets[i].end());
      possible = possible && !nets[i].empty();
    }
    if (!possible) continue;
    charge(used, pow_sat(grid.size(), members.size()), budget);
    std::vector<std::size_t> pick(members.size(), 0);
    while (true) {
      Outcome o{m, std::vector<std::int64_t>(n, 0)};
      for (std::size_t k = 0; k < members.size(); ++k) o.second[members[k]] = choices[k][pick[k]];
      oca_set.insert(std::move(o));
      std::size_t k = 0;
      while (k < pick.size() && ++pick[k] == choices[k].size()) pick[k++] = 0;
      if (k == pick.size()) break;
    }
  }

  if (fpa_set == oca_set) return verdict;

  verdict.holds = false;
  Witness w;
  w.kind = WitnessKind::outcome_mismatch;
  std::vector<Outcome> only_fpa;
  std::vector<Outcome> only_oca;
  std::set_difference(fpa_set.begin(), fpa_set.end(), oca_set.begin(), oca_set.end(),
                      std::back_inserter(only_fpa));
  std::set_difference(oca_set.begin(), oca_set.end(), fpa_set.begin(), fpa_set.end(),
                      std::back_inserter(only_oca));
  const bool from_fpa = !only_fpa.empty();
  const Outcome& o = from_fpa ? only_fpa.front() : only_oca.front();
  std::vector<Transaction> members;
  std::ostringstream os;
  os << "outcome {";
  bool first = true;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(o.first >> i & 1)) continue;
    const Price net = static_cast<double>(o.second[i]) * 1e-9;
    Transaction t = txs[i];
    t.bid = FpaBid{net};
    members.push_back(t);
    os << (first ? "" : ", ") << t.id << " pays " << fmt(net);
    first = false;
  }
  os << "} arises only under " << (from_fpa ? "first price" : "1559-R with transfers");
  w.block = make_block(ctx.height, ctx.base_fee, std::move(members));
  w.description = os.str();
  w.deviation = 1.0;
  w.delta = 1.0;
  verdict.witness = std::move(w);
  return verdict;
}

double replay_witness(const MechanismSpec& spec, const Instance& inst, const Witness& witness) {
  const ChainState& chain = inst.chain;
  switch (witness.kind) {
    case WitnessKind::miner_deviation: {
      const Block honest = allocate(spec, chain, inst.mempool, AllocMode::exact);
      return myopic_miner_utility(spec, chain, inst.mempool, witness.block) -
             myopic_miner_utility(spec, chain, honest);
    }
    case WitnessKind::costly_violation: {
      std::vector<Transaction> reals;
      Gas fake_gas = 0;
      for (const auto& tx : witness.block.txs) {
        if (tx.is_fake) {
          fake_gas += tx.gas_limit;
        } else {
          reals.push_back(tx);
        }
      }
      const Block real_block =
          make_block(witness.block.height, witness.block.base_fee, std::move(reals));
      return myopic_miner_utility(spec, chain, inst.mempool, witness.block) -
             (myopic_miner_utility(spec, chain, real_block) -
              witness.gamma * static_cast<double>(fake_gas));
    }
    case WitnessKind::user_deviation: {
      const auto it = std::find_if(inst.mempool.txs.begin(), inst.mempool.txs.end(),
                                   [&](const Transaction& t) { return t.id == witness.tx_id; });
      if (it == inst.mempool.txs.end() || !witness.strategy_bid || !witness.deviating_bid) {
        throw Error(ErrorCode::config_error, "witness does not match the instance");
      }
      const Mempool others{witness.others};
      return user_utility(spec, chain, others, *it, *witness.deviating_bid) -
             user_utility(spec, chain, others, *it, *witness.strategy_bid);
    }
    case WitnessKind::oca: {
      if (!witness.onchain_block) throw Error(ErrorCode::config_error, "oca witness lacks a block");
      return joint_utility(spec, chain, witness.block) -
             joint_utility(spec, chain, *witness.onchain_block);
    }
    case WitnessKind::outcome_mismatch: {
      const Verdict again = check_1559r_fpa_equivalence(inst);
      return again.holds ? 0.0 : 1.0;
    }
  }
  return 0.0;
}

}  // namespace feemech
