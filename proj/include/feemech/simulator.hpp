// Copyright 2026 The feemech Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "feemech/agents.hpp"
#include "feemech/core.hpp"
#include "feemech/demand.hpp"
#include "feemech/mechanisms.hpp"

namespace feemech {

struct Period {
  DemandCurve demand;
  MinerStrategy miner = HonestMyopic{};
  UserStrategy user = Truthful1559{};
};

/// Demand is a continuum: each block includes min(D(price), G) gas.
struct FluidMode {};

/// Demand is sampled into a fresh mempool of tx_gas-sized transactions every
/// block and run through the full agent pipeline.
struct DiscreteMode {
  std::uint64_t seed = 1;
  Gas tx_gas = 100'000;
  Price price_step = 0.01;
};

using SimulationMode = std::variant<FluidMode, DiscreteMode>;

struct Scenario {
  EnvParams env;
  MechanismSpec mechanism = M1559{};
  UpdateRule update_rule;
  std::vector<Period> periods;
  int blocks_per_period = 1;
  SimulationMode mode = FluidMode{};

  void validate() const;
};

struct TrajectoryRow {
  std::int64_t height = 0;
  Price base_fee = 0.0;
  Gas block_gas = 0;
  Gwei burned = 0.0;
  /// Payments to this block's miner plus paid-forward revenue it receives,
  /// net of what its fake transactions cost.
  Gwei miner_revenue = 0.0;
  Gwei forwarded = 0.0;
  Price mc_price = 0.0;  // market-clearing price at supply G_target
  bool excessively_low = false;
};

struct TrajectoryReport {
  std::vector<TrajectoryRow> rows;
  /// The simulated chain; fluid blocks carry gas_used but no transactions.
  std::vector<Block> blocks;
};

TrajectoryReport run_trajectory(const Scenario& scenario);

struct Cycle {
  std::size_t length = 0;
  std::int64_t start_height = 0;
  std::vector<Price> base_fees;
  std::vector<Gas> block_gas;
};

/// Shortest repeating (base_fee, block_gas) cycle of length ≥ max(2, min_cycle)
/// over the trailing half of the report. Fixed points are not cycles.
std::optional<Cycle> detect_oscillation(const TrajectoryReport& report, std::size_t min_cycle);

/// ETH spent filling n consecutive blocks to G_max from base fee r_start
/// (target G_max / 2).
double attack_cost(const UpdateRule& rule, Price r_start, Gas max_block_size, int n_blocks);

struct CartelRow {
  std::string strategy;
  Gwei total_miner_revenue = 0.0;
  Gwei total_burn = 0.0;
  Price avg_base_fee = 0.0;
};

/// Runs the scenario's first period for `horizon` blocks once per strategy.
std::vector<CartelRow> cartel_comparison(const Scenario& base, const std::vector<MinerStrategy>& strategies,
                                         int horizon);

/// CSV with header height,base_fee_gwei,block_gas,burned_gwei,
/// miner_revenue_gwei,forwarded_gwei,mc_price_gwei,excessively_low.
std::string to_csv(const TrajectoryReport& report);

}  // namespace feemech
