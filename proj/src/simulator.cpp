// Copyright 2026 The feemech Authors.
// SPDX-License-Identifier: Apache-2.0

#include "feemech/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "feemech/basefee.hpp"

namespace feemech {
namespace {

enum class Family { first_price, base_fee, tipless, beos };

Family family_of(const MechanismSpec& spec) {
  switch (spec.index()) {
    case 0:
    case 1:
    case 2: return Family::first_price;
    case 5: return Family::tipless;
    case 8: return Family::beos;
    default: return Family::base_fee;
  }
}

Gas round_gas(double gas) { return static_cast<Gas>(std::llround(gas)); }

double burn_fraction(const MechanismSpec& spec) {
  if (std::holds_alternative<M1559R>(spec) || std::holds_alternative<Smoothed>(spec)) return 0.0;
  if (const auto* b = std::get_if<Blended>(&spec)) return b->burn_fraction;
  return 1.0;
}

// Base fee for the next block, folded exactly as base_fee_from_history does.
class BaseFeeTracker {
 public:
  BaseFeeTracker(const UpdateRule& rule, Gas target) : rule_(rule), target_(target), r_(rule.r0) {}

  Price current(const std::vector<Block>& blocks) const {
    if (rule_.window) return base_fee_from_history(rule_, blocks, target_);
    return r_;
  }

  void advance(const Block& block) {
    if (!rule_.window) r_ = std::max(rule_.min_base_fee, r_ * adjustment(rule_, block.gas_used, target_));
  }

 private:
  UpdateRule rule_;
  Gas target_;
  Price r_;
};

// Paid-forward revenue the miner of the next block receives.
Gwei paid_forward(const MechanismSpec& spec, const std::vector<TrajectoryRow>& rows) {
  // Each earlier block forwarded its share spread evenly over `span` blocks.
  int span = 0;
  if (const auto* s = std::get_if<Smoothed>(&spec)) span = s->window;
  if (const auto* b = std::get_if<Blended>(&spec)) span = b->window;
  if (const auto* b = std::get_if<Beos>(&spec)) span = b->window - 1;
  if (span <= 0) return 0.0;
  Gwei sum = 0.0;
  const std::size_t first = rows.size() > static_cast<std::size_t>(span) ? rows.size() - span : 0;
  for (std::size_t i = first; i < rows.size(); ++i) sum += rows[i].forwarded / span;
  return sum;
}

struct FluidOutcome {
  Gas gas = 0;
  Gwei miner = 0.0;  // payments to this block's miner
  Gwei burned = 0.0;
  Gwei forwarded = 0.0;
};

// Payments for `gas` units sold at uniform per-gas `price` (base fee r).
FluidOutcome charge_fluid(const MechanismSpec& spec, Gas gas, Price price, Price r) {
  FluidOutcome out;
  out.gas = gas;
  const double g = static_cast<double>(gas);
  switch (family_of(spec)) {
    case Family::first_price:
      if (std::holds_alternative<FeeBurningFpa>(spec)) {
        out.burned = price * g;
      } else {
        out.miner = price * g;
      }
      break;
    case Family::base_fee:
    case Family::tipless: {
      if (std::holds_alternative<M1559R>(spec)) {
        out.miner = price * g;
        break;
      }
      const double lambda = burn_fraction(spec);
      out.miner = (price - r) * g;
      out.burned = lambda * r * g;
      out.forwarded = (1.0 - lambda) * r * g;
      break;
    }
    case Family::beos: {
      const int window = std::get<Beos>(spec).window;
      out.miner = price * g / window;
      out.forwarded = price * g * (window - 1) / window;
      break;
    }
  }
  return out;
}

Price user_tip(const Period& period, Price mu) {
  if (const auto* t = std::get_if<Truthful1559>(&period.user)) return t->assumed_mu.value_or(mu);
  return mu;
}

// Lowest per-gas price at which users buy under honest inclusion.
Price entry_price(const MechanismSpec& spec, const Period& period, Price r, const EnvParams& env) {
  switch (family_of(spec)) {
    case Family::first_price: return env.marginal_cost;
    case Family::base_fee: return r + user_tip(period, env.marginal_cost);
    case Family::tipless: return r + std::get<Tipless>(spec).hardcoded_tip;
    case Family::beos: return std::get<Beos>(spec).min_fee.value_or(env.marginal_cost);
  }
  return r;
}

FluidOutcome honest_fluid(const MechanismSpec& spec, const Period& period, Price r,
                          const EnvParams& env, Gas limit) {
  const double cap = static_cast<double>(limit);
  const Price entry = entry_price(spec, period, r, env);
  switch (family_of(spec)) {
    case Family::base_fee:
    case Family::tipless: {
      const Gas gas = round_gas(std::min(quantity(period.demand, entry), cap));
      return charge_fluid(spec, gas, entry, r);
    }
    case Family::first_price: {
      const Price price = std::max(entry, market_clearing_price(period.demand, cap));
      return charge_fluid(spec, round_gas(std::min(quantity(period.demand, price), cap)), price, r);
    }
    case Family::beos: {
      const auto& beos = std::get<Beos>(spec);
      const double at_floor = std::min(quantity(period.demand, entry), cap);
      if (at_floor < beos.full_threshold_fraction * static_cast<double>(env.max_block_size)) {
        return charge_fluid(spec, round_gas(at_floor), entry, r);
      }
      const Price price = std::max(entry, market_clearing_price(period.demand, cap));
      return charge_fluid(spec, round_gas(std::min(quantity(period.demand, price), cap)), price, r);
    }
  }
  return {};
}

// Quantity-setting monopolist: sells q gas at the price that clears it.
FluidOutcome quantity_fluid(const MechanismSpec& spec, const Period& period, Price r,
                            const EnvParams& env, Gas q) {
  if (q < 0 || q > env.max_block_size) {
    throw Error(ErrorCode::infeasible_strategy, "quantity " + std::to_string(q) + " outside [0, G]");
  }
  const Price entry = entry_price(spec, period, r, env);
  const Price price = std::max(entry, market_clearing_price(period.demand, static_cast<double>(q)));
  const Gas gas = round_gas(std::min(quantity(period.demand, price), static_cast<double>(q)));
  return charge_fluid(spec, gas, price, r);
}

FluidOutcome fluid_block(const MechanismSpec& spec, const Period& period, Price r,
                         const EnvParams& env, const UpdateRule& rule) {
  const Gas cap = env.max_block_size;
  switch (period.miner.index()) {
    case 0: return honest_fluid(spec, period, r, env, cap);
    case 1: return quantity_fluid(spec, period, r, env, std::get<QuantitySetting>(period.miner).q);
    case 2: {
      const Price p = std::get<PriceSetting>(period.miner).p;
      if (!(p >= 0)) throw Error(ErrorCode::infeasible_strategy, "negative price");
      const Price price = std::max(p, entry_price(spec, period, r, env));
      const Gas gas = round_gas(std::min(quantity(period.demand, price), static_cast<double>(cap)));
      return charge_fluid(spec, gas, price, r);
    }
    case 3: {
      const auto& crash = std::get<BaseFeeCrashThenMonopoly>(period.miner);
      if (has_base_fee(spec) && r > rule.min_base_fee) return {};
      const Gas q = crash.monopoly_quantity.value_or(
          round_gas(monopoly_point(period.demand, cap).q_star));
      return quantity_fluid(spec, period, r, env, q);
    }
    case 4: {
      const auto& pad = std::get<FakePadding>(period.miner);
      if (pad.pad_to > cap) throw Error(ErrorCode::infeasible_strategy, "pad_to exceeds G");
      FluidOutcome out = honest_fluid(spec, period, r, env, cap);
      if (pad.pad_to <= out.gas) return out;
      const Gas fake_gas = pad.pad_to - out.gas;
      const Price level = has_base_fee(spec) ? std::max(r, pad.pad_bid) : pad.pad_bid;
      // Fakes pay r into burn/forward (their tip returns to the miner).
      const FluidOutcome fake = charge_fluid(spec, fake_gas, has_base_fee(spec) ? r : level, r);
      out.gas += fake_gas;
      out.burned += fake.burned;
      out.forwarded += fake.forwarded;
      out.miner -= fake.burned + fake.forwarded;
      return out;
    }
  }
  return {};
}

TrajectoryRow discrete_block(const Scenario& s, const Period& period, const DiscreteMode& mode,
                             ChainState& chain) {
  const BlockContext ctx = next_block_context(chain);
  Mempool mempool = mempool_from_curve(period.demand, mode.tx_gas, mode.price_step,
                                       mode.seed + static_cast<std::uint64_t>(ctx.height));
  mempool = apply_user_strategy(period.user, std::move(mempool), ctx.base_fee, s.env.marginal_cost);

  MinerStrategy miner = period.miner;
  if (auto* crash = std::get_if<BaseFeeCrashThenMonopoly>(&miner); crash && !crash->monopoly_quantity) {
    crash->monopoly_quantity = round_gas(monopoly_point(period.demand, s.env.max_block_size).q_star);
  }
  const MinerAction action = miner_act(miner, s.mechanism, chain, mempool, AllocMode::greedy);
  const SettlementReport report = settle(s.mechanism, chain, action.block);

  TrajectoryRow row;
  row.height = ctx.height;
  row.base_fee = ctx.base_fee;
  row.block_gas = action.block.gas_used;
  row.burned = report.burned_total;
  row.forwarded = report.forwarded_total;
  row.miner_revenue = report.miner_revenue + report.paid_forward_received;
  for (std::size_t i = 0; i < action.block.txs.size(); ++i) {
    const auto& tx = action.block.txs[i];
    if (tx.is_fake) {
      row.miner_revenue -= (report.charges[i].burn + report.charges[i].forward) *
                           static_cast<double>(tx.gas_limit);
    }
  }
  row.excessively_low =
      is_excessively_low(mempool, ctx.base_fee, s.env.marginal_cost, s.env.max_block_size);
  chain.blocks.push_back(action.block);
  return row;
}

}  // namespace

void Scenario::validate() const {
  env.validate();
  update_rule.validate();
  validate_mechanism(mechanism);
  if (periods.empty()) throw Error(ErrorCode::config_error, "scenario needs at least one period");
  if (blocks_per_period < 1) throw Error(ErrorCode::config_error, "blocks_per_period must be >= 1");
  for (const auto& p : periods) validate_curve(p.demand);
  if (const auto* d = std::get_if<DiscreteMode>(&mode)) {
    if (d->tx_gas < 1 || !(d->price_step > 0)) {
      throw Error(ErrorCode::config_error, "discrete mode needs tx_gas >= 1 and price_step > 0");
    }
  }
}

TrajectoryReport run_trajectory(const Scenario& scenario) {
  scenario.validate();
  const EnvParams& env = scenario.env;
  TrajectoryReport report;
  BaseFeeTracker tracker(scenario.update_rule, env.target_block_size);
  ChainState chain{{}, env, scenario.update_rule};
  const auto* discrete = std::get_if<DiscreteMode>(&scenario.mode);

  std::int64_t height = 1;
  for (const auto& period : scenario.periods) {
    for (int k = 0; k < scenario.blocks_per_period; ++k, ++height) {
      TrajectoryRow row;
      if (discrete) {
        row = discrete_block(scenario, period, *discrete, chain);
        report.blocks.push_back(chain.blocks.back());
      } else {
        const Price r = tracker.current(report.blocks);
        const FluidOutcome out = fluid_block(scenario.mechanism, period, r, env, scenario.update_rule);
        row.height = height;
        row.base_fee = r;
        row.block_gas = out.gas;
        row.burned = out.burned;
        row.forwarded = out.forwarded;
        row.miner_revenue = out.miner + paid_forward(scenario.mechanism, report.rows);
        row.excessively_low = is_excessively_low(period.demand, r, env.marginal_cost, env.max_block_size);
        Block block;
        block.height = height;
        block.base_fee = r;
        block.gas_used = out.gas;
        report.blocks.push_back(block);
        tracker.advance(block);
      }
      row.mc_price = market_clearing_price(period.demand, static_cast<double>(env.target_block_size));
      report.rows.push_back(row);
    }
  }
  return report;
}

std::optional<Cycle> detect_oscillation(const TrajectoryReport& report, std::size_t min_cycle) {
  const auto& rows = report.rows;
  const std::size_t start = rows.size() / 2;
  const std::size_t len = rows.size() - start;
  auto same = [&](std::size_t a, std::size_t b) {
    const double x = rows[a].base_fee;
    const double y = rows[b].base_fee;
    return rows[a].block_gas == rows[b].block_gas &&
           std::abs(x - y) <= 1e-9 * std::max(std::abs(x), std::abs(y));
  };
  // Smallest period of the trailing half, requiring two full repetitions.
  for (std::size_t period = 1; 2 * period <= len; ++period) {
    bool ok = true;
    for (std::size_t i = start; ok && i + period < rows.size(); ++i) ok = same(i, i + period);
    if (!ok) continue;
    if (period == 1 || period < std::max<std::size_t>(2, min_cycle)) return std::nullopt;
    Cycle c;
    c.length = period;
    c.start_height = rows[start].height;
    for (std::size_t i = start; i < start + period; ++i) {
      c.base_fees.push_back(rows[i].base_fee);
      c.block_gas.push_back(rows[i].block_gas);
    }
    return c;
  }
  return std::nullopt;
}

double attack_cost(const UpdateRule& rule, Price r_start, Gas max_block_size, int n_blocks) {
  if (n_blocks < 1) throw Error(ErrorCode::config_error, "attack needs n_blocks >= 1");
  if (!(r_start > 0) || max_block_size < 2) {
    throw Error(ErrorCode::config_error, "attack needs r_start > 0 and G_max >= 2");
  }
  UpdateRule from_start = rule;
  from_start.r0 = r_start;
  const Gas target = max_block_size / 2;
  BaseFeeTracker tracker(from_start, target);
  std::vector<Block> blocks;
  Gwei total = 0.0;
  for (int i = 1; i <= n_blocks; ++i) {
    const Price r = tracker.current(blocks);
    total += r * static_cast<double>(max_block_size);
    Block full;
    full.height = i;
    full.base_fee = r;
    full.gas_used = max_block_size;
    tracker.advance(full);
    if (rule.window) blocks.push_back(full);
  }
  return total / kGweiPerEth;
}

std::vector<CartelRow> cartel_comparison(const Scenario& base, const std::vector<MinerStrategy>& strategies,
                                         int horizon) {
  if (horizon < 0) throw Error(ErrorCode::config_error, "horizon must be >= 0");
  if (base.periods.empty()) throw Error(ErrorCode::config_error, "scenario needs a period");
  std::vector<CartelRow> out;
  for (const auto& strategy : strategies) {
    CartelRow row;
    row.strategy = strategy_name(strategy);
    if (horizon > 0) {
      Scenario s = base;
      s.periods = {base.periods.front()};
      s.periods.front().miner = strategy;
      s.blocks_per_period = horizon;
      const auto report = run_trajectory(s);
      Price fee_sum = 0.0;
      for (const auto& r : report.rows) {
        row.total_miner_revenue += r.miner_revenue;
        row.total_burn += r.burned;
        fee_sum += r.base_fee;
      }
      row.avg_base_fee = fee_sum / static_cast<double>(report.rows.size());
    }
    out.push_back(row);
  }
  return out;
}

std::string to_csv(const TrajectoryReport& report) {
  std::string out =
      "height,base_fee_gwei,block_gas,burned_gwei,miner_revenue_gwei,forwarded_gwei,mc_price_gwei,"
      "excessively_low\n";
  char line[512];
  for (const auto& r : report.rows) {
    std::snprintf(line, sizeof line, "%lld,%.17g,%lld,%.17g,%.17g,%.17g,%.17g,%s\n",
                  static_cast<long long>(r.height), r.base_fee, static_cast<long long>(r.block_gas),
                  r.burned, r.miner_revenue, r.forwarded, r.mc_price,
                  r.excessively_low ? "true" : "false");
    out += line;
  }
  return out;
}

}  // namespace feemech
