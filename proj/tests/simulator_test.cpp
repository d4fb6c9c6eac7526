// Copyright 2026 The feemech Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>

#include "feemech/basefee.hpp"
#include "feemech/simulator.hpp"

namespace feemech {
namespace {

const LinearDemand kLow{15e6, 75e3};
const LinearDemand kHigh{30e6, 150e3};
const LinearDemand kHigher{35e6, 175e3};

Scenario table_scenario(const LinearDemand& high) {
  Scenario s;
  s.env.min_base_fee = 0.0;
  s.update_rule.r0 = 100.0 / 3.0;
  s.update_rule.min_base_fee = 0.0;
  s.periods.push_back({kLow});
  for (int i = 0; i < 6; ++i) s.periods.push_back({high});
  s.periods.push_back({kLow});
  return s;
}

// Plain fold of the linear update rule with fluid inclusion min(D(r), G).
std::vector<std::pair<double, double>> fluid_oracle(const std::vector<LinearDemand>& curves, double r) {
  std::vector<std::pair<double, double>> out;
  for (const auto& d : curves) {
    const double s = std::min(25e6, std::max(0.0, d.intercept_gas - d.slope_gas_per_gwei * r));
    out.emplace_back(r, s);
    r *= 1.0 + (s - 12.5e6) / (8.0 * 12.5e6);
  }
  return out;
}

TEST(Trajectory, TableOne) {
  const auto report = run_trajectory(table_scenario(kHigh));
  const double fees[] = {33.33, 33.33, 37.5, 41.95, 46.65, 51.55, 56.59, 61.69};
  const double sizes[] = {12.5, 25, 24.38, 23.71, 23, 22.27, 21.51, 10.37};
  ASSERT_EQ(report.rows.size(), 8u);
  std::vector<LinearDemand> curves{kLow, kHigh, kHigh, kHigh, kHigh, kHigh, kHigh, kLow};
  const auto oracle = fluid_oracle(curves, 100.0 / 3.0);
  for (std::size_t i = 0; i < 8; ++i) {
    EXPECT_NEAR(report.rows[i].base_fee, fees[i], 0.01) << "period " << i + 1;
    EXPECT_NEAR(report.rows[i].block_gas / 1e6, sizes[i], 0.01) << "period " << i + 1;
    EXPECT_NEAR(report.rows[i].base_fee, oracle[i].first, 1e-6);
    EXPECT_NEAR(static_cast<double>(report.rows[i].block_gas), oracle[i].second, 1.0);
    EXPECT_FALSE(report.rows[i].excessively_low);
    EXPECT_EQ(report.rows[i].height, static_cast<std::int64_t>(i + 1));
  }
  EXPECT_NEAR(report.rows[1].mc_price, 350.0 / 3.0, 1e-9);
  EXPECT_NEAR(report.rows[0].mc_price, 100.0 / 3.0, 1e-9);
}

TEST(Trajectory, TableTwo) {
  const auto report = run_trajectory(table_scenario(kHigher));
  const double fees[] = {33.33, 33.33, 37.5, 42.18, 47.46, 53.39, 60.06};
  const bool low[] = {false, true, true, true, true, true, false, false};
  for (std::size_t i = 0; i < 7; ++i) EXPECT_NEAR(report.rows[i].base_fee, fees[i], 0.01) << i + 1;
  for (std::size_t i = 0; i < 8; ++i) EXPECT_EQ(report.rows[i].excessively_low, low[i]) << i + 1;
  const double r7 = report.rows[6].base_fee;
  const double s7 = 35e6 - 175e3 * r7;
  EXPECT_NEAR(report.rows[7].base_fee, r7 * (1.0 + (s7 - 12.5e6) / 100e6), 1e-6);
  EXPECT_NEAR(report.rows[7].base_fee, 67.27, 0.01);
}

TEST(Trajectory, MarketClearingFixedPoint) {
  Scenario s;
  s.update_rule.r0 = 100.0 / 3.0;
  s.periods = {{kLow}};
  s.blocks_per_period = 50;
  const auto report = run_trajectory(s);
  for (const auto& row : report.rows) {
    EXPECT_EQ(row.base_fee, 100.0 / 3.0);
    EXPECT_EQ(row.block_gas, 12'500'000);
  }
  EXPECT_FALSE(detect_oscillation(report, 2).has_value());
}

TEST(Trajectory, ReplayReproducesBaseFees) {
  for (const auto& high : {kHigh, kHigher}) {
    Scenario s = table_scenario(high);
    s.blocks_per_period = 7;
    const auto report = run_trajectory(s);
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
      const std::span<const Block> prefix(report.blocks.data(), i);
      EXPECT_EQ(base_fee_from_history(s.update_rule, prefix, s.env.target_block_size), report.rows[i].base_fee);
    }
  }
}

TEST(Trajectory, FluidGasNeverExceedsMax) {
  Scenario s = table_scenario(LinearDemand{90e6, 100e3});
  s.blocks_per_period = 20;
  for (const auto& row : run_trajectory(s).rows) EXPECT_LE(row.block_gas, s.env.max_block_size);
}

TEST(Trajectory, WindowRuleReplays) {
  Scenario s = table_scenario(kHigh);
  s.update_rule.window = 3;
  s.blocks_per_period = 4;
  const auto report = run_trajectory(s);
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const std::span<const Block> prefix(report.blocks.data(), i);
    EXPECT_EQ(base_fee_from_history(s.update_rule, prefix, s.env.target_block_size), report.rows[i].base_fee);
  }
}

TEST(Trajectory, DiscreteTracksFluid) {
  Scenario fluid = table_scenario(kHigh);
  fluid.blocks_per_period = 3;
  Scenario discrete = fluid;
  discrete.mode = DiscreteMode{7, 50'000, 0.01};
  const auto f = run_trajectory(fluid);
  const auto d = run_trajectory(discrete);
  ASSERT_EQ(f.rows.size(), d.rows.size());
  const LinearDemand* curves[] = {&kLow, &kHigh, &kHigh, &kHigh, &kHigh, &kHigh, &kHigh, &kLow};
  for (std::size_t i = 0; i < d.rows.size(); ++i) {
    const LinearDemand& c = *curves[i / 3];
    const double fluid_gas =
        std::min(25e6, std::max(0.0, c.intercept_gas - c.slope_gas_per_gwei * d.rows[i].base_fee));
    EXPECT_LE(std::abs(static_cast<double>(d.rows[i].block_gas) - fluid_gas), 50'000.0) << "block " << i + 1;
    EXPECT_NEAR(d.rows[i].base_fee / f.rows[i].base_fee, 1.0, 0.01);
  }
}

TEST(Trajectory, DiscreteIsDeterministic) {
  Scenario s = table_scenario(kHigh);
  s.mode = DiscreteMode{3, 200'000, 0.01};
  EXPECT_EQ(to_csv(run_trajectory(s)), to_csv(run_trajectory(s)));
}

TEST(Trajectory, InvalidScenarioRejected) {
  Scenario s;
  EXPECT_THROW(run_trajectory(s), Error);
  s.periods = {{kLow}};
  s.blocks_per_period = 0;
  EXPECT_THROW(run_trajectory(s), Error);
}

Scenario oscillating() {
  Scenario s;
  s.update_rule.kind = AdjustmentKind::exponential;
  s.update_rule.learning_rate = std::log(1.5);
  s.update_rule.r0 = 10.0;
  s.update_rule.min_base_fee = 0.0;
  // Fee caps spread over [1.1r, 1.4r], enough to fill two blocks.
  EmpiricalDemand caps;
  for (int k = 0; k <= 30; ++k) caps.points.push_back({11.0 + 0.1 * k, 2e6});
  s.periods = {{caps}};
  s.blocks_per_period = 60;
  return s;
}

TEST(Oscillation, ThreeHalvesTwoThirdsRuleCycles) {
  EXPECT_DOUBLE_EQ(adjustment(oscillating().update_rule, 25'000'000, 12'500'000), 1.5);
  EXPECT_NEAR(adjustment(oscillating().update_rule, 0, 12'500'000), 2.0 / 3.0, 1e-15);
  const auto cycle = detect_oscillation(run_trajectory(oscillating()), 2);
  ASSERT_TRUE(cycle.has_value());
  EXPECT_EQ(cycle->length, 2u);
  const double lo = std::min(cycle->base_fees[0], cycle->base_fees[1]);
  const double hi = std::max(cycle->base_fees[0], cycle->base_fees[1]);
  EXPECT_NEAR(lo, 10.0, 1e-9);
  EXPECT_NEAR(hi, 15.0, 1e-9);
  EXPECT_EQ(std::max(cycle->block_gas[0], cycle->block_gas[1]), 25'000'000);
  EXPECT_EQ(std::min(cycle->block_gas[0], cycle->block_gas[1]), 0);
}

TEST(Oscillation, LongerMinimumCycleRejectsTwoCycle) {
  EXPECT_FALSE(detect_oscillation(run_trajectory(oscillating()), 3).has_value());
}

TEST(Oscillation, TableOneHasNone) {
  EXPECT_FALSE(detect_oscillation(run_trajectory(table_scenario(kHigh)), 2).has_value());
}

UpdateRule linear_rule() {
  UpdateRule r;
  r.min_base_fee = 0.0;
  return r;
}

TEST(AttackCost, Examples) {
  EXPECT_NEAR(attack_cost(linear_rule(), 1.0, 25'000'000, 20), 1.909, 0.01);
  EXPECT_NEAR(attack_cost(linear_rule(), 1.0, 25'000'000, 120), 275'000, 2'750);
  EXPECT_DOUBLE_EQ(attack_cost(linear_rule(), 1.0, 25'000'000, 1), 0.025);
}

TEST(AttackCost, MatchesGeometricSum) {
  for (int n = 1; n <= 150; ++n) {
    const double closed = 25e6 * 8.0 * (std::pow(9.0 / 8.0, n) - 1.0) / 1e9;
    EXPECT_NEAR(attack_cost(linear_rule(), 1.0, 25'000'000, n) / closed, 1.0, 1e-12) << n;
  }
}

TEST(AttackCost, IncreasingAndConvex) {
  std::vector<double> c;
  for (int n = 1; n <= 150; ++n) c.push_back(attack_cost(linear_rule(), 3.0, 30'000'000, n));
  for (std::size_t i = 1; i < c.size(); ++i) EXPECT_GT(c[i], c[i - 1]);
  for (std::size_t i = 2; i < c.size(); ++i) EXPECT_GE(c[i] - 2 * c[i - 1] + c[i - 2], 0.0);
  EXPECT_THROW(attack_cost(linear_rule(), 1.0, 25'000'000, 0), Error);
}

Scenario stationary(const LinearDemand& d, Price r0, Price mu) {
  Scenario s;
  s.env.marginal_cost = mu;
  s.env.min_base_fee = 0.0;
  s.update_rule.r0 = r0;
  s.update_rule.min_base_fee = 1e-9;
  s.periods = {{d}};
  return s;
}

TEST(Cartel, CrashThenMonopolyMatchesFirstPriceMonopoly) {
  const LinearDemand d{20e6, 150e3};
  const double monopoly_revenue = 2e9 / 3.0;

  Scenario crash = stationary(d, 100.0 / 3.0, 0.0);
  crash.periods.front().miner = BaseFeeCrashThenMonopoly{};
  crash.blocks_per_period = 400;
  const auto report = run_trajectory(crash);
  const auto& last = report.rows.back();
  EXPECT_EQ(last.block_gas, 10'000'000);
  EXPECT_NEAR(last.miner_revenue, monopoly_revenue, 1e-3 * monopoly_revenue);
  EXPECT_NEAR(last.miner_revenue + last.burned, monopoly_revenue, 1.0);

  Scenario fpa = stationary(d, 1.0, 0.0);
  fpa.mechanism = FirstPrice{};
  fpa.periods.front().miner = QuantitySetting{10'000'000};
  const auto row = run_trajectory(fpa).rows.front();
  EXPECT_NEAR(row.miner_revenue, monopoly_revenue, 1.0);
}

TEST(Cartel, HonestMinersEarnTipsOnly) {
  const double mu = 2.0;
  Scenario s = stationary(kLow, 100.0 / 3.0 - mu, mu);
  const auto rows = cartel_comparison(s, {HonestMyopic{}}, 30);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_NEAR(rows[0].total_miner_revenue / 30, mu * 12.5e6, 1.0);
  EXPECT_NEAR(rows[0].avg_base_fee, 100.0 / 3.0 - mu, 1e-6);
}

TEST(Cartel, ZeroHorizon) {
  Scenario s = stationary(kLow, 10.0, 0.0);
  for (const auto& row : cartel_comparison(s, {HonestMyopic{}, BaseFeeCrashThenMonopoly{}}, 0)) {
    EXPECT_EQ(row.total_miner_revenue, 0.0);
    EXPECT_EQ(row.total_burn, 0.0);
    EXPECT_EQ(row.avg_base_fee, 0.0);
  }
}

TEST(Cartel, StrategiesRankedByRevenue) {
  const LinearDemand d{20e6, 150e3};
  Scenario s = stationary(d, 100.0 / 3.0, 0.0);
  const auto rows = cartel_comparison(s, {HonestMyopic{}, BaseFeeCrashThenMonopoly{}}, 600);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].strategy, "honest_myopic");
  EXPECT_GT(rows[1].total_miner_revenue, rows[0].total_miner_revenue);
  EXPECT_LT(rows[1].total_burn, rows[0].total_burn);
}

TEST(Csv, HeaderAndRows) {
  const std::string csv = to_csv(run_trajectory(table_scenario(kHigh)));
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "height,base_fee_gwei,block_gas,burned_gwei,miner_revenue_gwei,forwarded_gwei,mc_price_gwei,"
            "excessively_low");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 9);
  EXPECT_NE(csv.find("\n3,37.5,"), std::string::npos);
}

}  // namespace
}  // namespace feemech
