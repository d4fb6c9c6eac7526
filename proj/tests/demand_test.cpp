// Copyright 2026 The feemech Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <random>

#include "feemech/demand.hpp"
#include "test_util.hpp"

namespace feemech {
namespace {

const LinearDemand kFig1{30e6, 150e3};
const LinearDemand kLow{15e6, 75e3};
const LinearDemand kMonopoly{20e6, 150e3};

TEST(Quantity, LinearCurveEndpoints) {
  EXPECT_DOUBLE_EQ(quantity(kFig1, 0.0), 30e6);
  EXPECT_DOUBLE_EQ(quantity(kFig1, 200.0), 0.0);
  EXPECT_DOUBLE_EQ(quantity(kFig1, 250.0), 0.0);
  EXPECT_NEAR(quantity(kFig1, 350.0 / 3.0), 12.5e6, 1.0);
}

TEST(Quantity, NonIncreasingInPrice) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 300.0);
  EmpiricalDemand emp{{{5.0, 3e6}, {40.0, 1e6}, {120.0, 2e6}}};
  for (int i = 0; i < 500; ++i) {
    double a = u(rng), b = u(rng);
    if (a > b) std::swap(a, b);
    EXPECT_GE(quantity(kFig1, a), quantity(kFig1, b));
    EXPECT_GE(quantity(DemandCurve{emp}, a), quantity(DemandCurve{emp}, b));
  }
}

TEST(Quantity, EmpiricalIsInclusive) {
  const DemandCurve emp = EmpiricalDemand{{{10.0, 5.0}, {3.0, 7.0}}};
  EXPECT_DOUBLE_EQ(quantity(emp, 10.0), 5.0);
  EXPECT_DOUBLE_EQ(quantity(emp, 3.0), 12.0);
  EXPECT_DOUBLE_EQ(quantity(emp, 10.5), 0.0);
}

TEST(MarketClearingPrice, Examples) {
  EXPECT_NEAR(market_clearing_price(kFig1, 12.5e6), 350.0 / 3.0, 1e-9);
  EXPECT_NEAR(market_clearing_price(kLow, 12.5e6), 100.0 / 3.0, 1e-9);
  EXPECT_DOUBLE_EQ(market_clearing_price(LinearDemand{10e6, 150e3}, 12.5e6), 0.0);
}

TEST(MarketClearingPrice, DemandAtPriceMeetsSupply) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> s(0.0, 40e6);
  for (int i = 0; i < 300; ++i) {
    const double supply = s(rng);
    const Price p = market_clearing_price(kFig1, supply);
    EXPECT_GE(p, 0.0);
    if (p > 0.0) {
      EXPECT_NEAR(quantity(kFig1, p), supply, 1e-3);
    } else {
      EXPECT_LE(quantity(kFig1, 0.0), supply + 1e-3);
    }
  }
}

TEST(Revenue, Examples) {
  EXPECT_DOUBLE_EQ(revenue(kFig1, 100.0), 1.5e9);
  EXPECT_DOUBLE_EQ(revenue(kFig1, 0.0), 0.0);
  EXPECT_NEAR(revenue(kMonopoly, 200.0 / 3.0), 2e9 / 3.0, 1.0);
}

TEST(Revenue, PbarMaximizesOverGrid) {
  const double best = revenue(kMonopoly, 200.0 / 3.0);
  for (int k = 0; k <= 10'000; ++k) {
    const Price p = (20e6 / 150e3) * k / 10'000.0;
    EXPECT_LE(revenue(kMonopoly, p), best + 1e-3);
  }
}

TEST(MonopolyPoint, ConstrainedBySupply) {
  const MonopolyPoint mp = monopoly_point(kFig1, 12'500'000);
  EXPECT_NEAR(mp.pbar, 100.0, 1e-9);
  EXPECT_NEAR(mp.p_star, 350.0 / 3.0, 1e-9);
  EXPECT_NEAR(mp.q_star, 12.5e6, 1e-3);
}

TEST(MonopolyPoint, UnconstrainedMaximizer) {
  const MonopolyPoint mp = monopoly_point(kMonopoly, 12'500'000);
  EXPECT_NEAR(mp.pbar, 200.0 / 3.0, 1e-9);
  EXPECT_NEAR(mp.p_star, 200.0 / 3.0, 1e-9);
  EXPECT_NEAR(mp.q_star, 10e6, 1e-3);
}

TEST(MonopolyPoint, BoundaryWhereDemandAtPbarEqualsSupply) {
  const MonopolyPoint mp = monopoly_point(kMonopoly, 10'000'000);
  EXPECT_NEAR(mp.p_star, 200.0 / 3.0, 1e-6);
  EXPECT_NEAR(mp.q_star, 10e6, 1e-3);
}

TEST(MonopolyPoint, AgreesWithGridOracle) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> b(1e6, 40e6), a(1e4, 4e5);
  std::uniform_int_distribution<Gas> g(1'000'000, 30'000'000);
  constexpr int kPoints = 10'000;
  for (int i = 0; i < 200; ++i) {
    const LinearDemand d{b(rng), a(rng)};
    const Gas max_block = g(rng);
    const MonopolyPoint mp = monopoly_point(d, max_block);
    const Price oracle = testing::grid_monopoly_price(d, static_cast<double>(max_block), kPoints);
    const double step = d.intercept_gas / d.slope_gas_per_gwei / kPoints;
    EXPECT_NEAR(mp.p_star, oracle, step) << "b=" << d.intercept_gas << " a=" << d.slope_gas_per_gwei;
    EXPECT_LE(mp.q_star, static_cast<double>(max_block) + 1e-3);
  }
}

TEST(MempoolDemand, ThresholdFilter) {
  EXPECT_EQ(mempool_demand(Mempool{}, 1.0), 0);
  Mempool m{{testing::tx("a", 5, 10.0, FpaBid{10.0}), testing::tx("b", 7, 3.0, FpaBid{3.0})}};
  EXPECT_EQ(mempool_demand(m, 5.0), 5);
  EXPECT_EQ(mempool_demand(m, 3.0), 12);
}

TEST(ExcessivelyLow, TableTwoFlags) {
  const LinearDemand high{35e6, 175e3};
  EXPECT_TRUE(is_excessively_low(DemandCurve{high}, 33.33, 0.0, 25'000'000));
  EXPECT_FALSE(is_excessively_low(DemandCurve{high}, 60.06, 0.0, 25'000'000));
}

TEST(ExcessivelyLow, ExactBoundaryIsNotStrict) {
  EXPECT_NEAR(quantity(kFig1, 100.0 / 3.0), 25e6, 1e-6);
  EXPECT_FALSE(is_excessively_low(DemandCurve{kFig1}, 100.0 / 3.0, 0.0, 25'000'000));
  EXPECT_TRUE(is_excessively_low(DemandCurve{kFig1}, 33.0, 0.0, 25'000'000));
}

TEST(ExcessivelyLow, MarginalCostShiftsThreshold) {
  Mempool m{{testing::tx("a", 2, 5.0, FpaBid{5.0}), testing::tx("b", 2, 5.0, FpaBid{5.0})}};
  EXPECT_TRUE(is_excessively_low(m, 3.0, 1.0, 3));
  EXPECT_FALSE(is_excessively_low(m, 3.0, 2.5, 3));
}

TEST(MempoolFromCurve, StepFunctionBracketsLinearDemand) {
  const Mempool m = mempool_from_curve(LinearDemand{100.0, 1.0}, 10, 10.0, 42);
  ASSERT_EQ(m.txs.size(), 10u);
  for (std::size_t j = 0; j < m.txs.size(); ++j) {
    EXPECT_EQ(m.txs[j].gas_limit, 10);
    EXPECT_LE(m.txs[j].value, 100.0 - 10.0 * static_cast<double>(j));
    EXPECT_GE(m.txs[j].value, 90.0 - 10.0 * static_cast<double>(j));
  }
  for (double p = 0.0; p <= 100.0; p += 2.5) {
    EXPECT_NEAR(static_cast<double>(mempool_demand(m, p)), quantity(LinearDemand{100.0, 1.0}, p), 10.0);
  }
}

TEST(MempoolFromCurve, ZeroCurveIsEmpty) {
  EXPECT_TRUE(mempool_from_curve(LinearDemand{0.0, 1.0}, 10, 1.0, 1).txs.empty());
}

TEST(MempoolFromCurve, DeterministicPerSeed) {
  const Mempool a = mempool_from_curve(kMonopoly, 100'000, 0.01, 9);
  const Mempool b = mempool_from_curve(kMonopoly, 100'000, 0.01, 9);
  ASSERT_EQ(a.txs.size(), b.txs.size());
  for (std::size_t i = 0; i < a.txs.size(); ++i) {
    EXPECT_EQ(a.txs[i].id, b.txs[i].id);
    EXPECT_EQ(a.txs[i].value, b.txs[i].value);
  }
  EXPECT_NO_THROW(check_unique_ids(a.txs));
}

TEST(Curve, InvalidParametersRejected) {
  EXPECT_THROW(validate_curve(LinearDemand{-1.0, 1.0}), Error);
  EXPECT_THROW(validate_curve(EmpiricalDemand{{{-1.0, 1.0}}}), Error);
  EXPECT_THROW(mempool_from_curve(kLow, 0, 1.0, 1), Error);
}

}  // namespace
}  // namespace feemech
