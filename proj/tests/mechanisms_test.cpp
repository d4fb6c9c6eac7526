// Copyright 2026 The feemech Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "feemech/agents.hpp"
#include "feemech/basefee.hpp"
#include "feemech/mechanisms.hpp"
#include "test_util.hpp"

namespace feemech {
namespace {

using testing::chain_at;
using testing::fpa_tx;
using testing::tx;

std::vector<std::string> ids(const Block& b) {
  std::vector<std::string> out;
  for (const auto& t : b.txs) out.push_back(t.id);
  return out;
}

TEST(InducedBid, FeeCapTip) {
  EXPECT_DOUBLE_EQ(*induced_bid(M1559{}, tx("a", 1, 200, FeeCapTipBid{200, 4}), 100, 1), 104);
  EXPECT_DOUBLE_EQ(*induced_bid(M1559{}, tx("a", 1, 200, FeeCapTipBid{105, 10}), 100, 1), 105);
}

TEST(InducedBid, EscalatorInterpolates) {
  const Transaction t = tx("e", 1, 200, EscalatorBid{10, 100, 20, 150});
  EXPECT_DOUBLE_EQ(*induced_bid(FirstPrice{}, t, 0, 13), 115);
  for (int h = 11; h <= 19; ++h) {
    EXPECT_DOUBLE_EQ(*induced_bid(FirstPrice{}, t, 0, h), 100 + 5.0 * (h - 10));
  }
  EXPECT_FALSE(induced_bid(FirstPrice{}, t, 0, 9).has_value());
  EXPECT_FALSE(induced_bid(FirstPrice{}, t, 0, 21).has_value());
}

TEST(InducedBid, VariantMismatchThrows) {
  try {
    induced_bid(M1559{}, fpa_tx("a", 5), 1, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::bid_variant_mismatch);
  }
}

TEST(Allocate, M1559SkipsNegativeMargin) {
  const ChainState chain = chain_at(100, 10);
  Mempool m{{tx("a", 1, 200, FeeCapTipBid{104, 10}), tx("b", 1, 200, FeeCapTipBid{105, 10}),
             tx("c", 1, 200, FeeCapTipBid{99, 10})}};
  EXPECT_EQ(ids(allocate(M1559{}, chain, m, AllocMode::greedy)), (std::vector<std::string>{"a", "b"}));
}

TEST(Allocate, FirstPriceIncludesAllWhenRoom) {
  const ChainState chain = chain_at(0, 3);
  Mempool m{{fpa_tx("a", 10), fpa_tx("b", 8), fpa_tx("c", 3)}};
  const Block b = allocate(FirstPrice{}, chain, m, AllocMode::greedy);
  EXPECT_EQ(b.txs.size(), 3u);
  EXPECT_DOUBLE_EQ(settle(FirstPrice{}, chain, b).miner_revenue, 21);
}

TEST(Allocate, BeosChoosesBestPrefix) {
  const ChainState chain = chain_at(0, 3);
  Mempool m{{tx("a", 1, 10, CapOnlyBid{10}), tx("b", 1, 8, CapOnlyBid{8}), tx("c", 1, 3, CapOnlyBid{3})}};
  const Block b = allocate(Beos{}, chain, m, AllocMode::greedy);
  EXPECT_EQ(ids(b), (std::vector<std::string>{"a", "b"}));

  // Two of three slots count as almost full: common price is the lowest bid.
  const Beos almost_full{1, std::nullopt, 2.0 / 3.0};
  const auto report = settle(almost_full, chain, b);
  EXPECT_DOUBLE_EQ(report.charges[0].payment, 8);
  EXPECT_DOUBLE_EQ(report.miner_revenue, 16);

  // Under a strict full-block threshold the underfull block pays the minimum fee.
  EXPECT_DOUBLE_EQ(settle(Beos{1, 0.5, 1.0}, chain, b).miner_revenue, 1.0);
}

TEST(Allocate, ExactBeatsGreedyOnMixedGas) {
  const ChainState chain = chain_at(0, 4);
  Mempool m{{fpa_tx("a", 5, 3), fpa_tx("b", 4, 2), fpa_tx("c", 4, 2)}};
  const Block exact = allocate(FirstPrice{}, chain, m, AllocMode::exact);
  EXPECT_EQ(ids(exact), (std::vector<std::string>{"b", "c"}));
  EXPECT_DOUBLE_EQ(settle(FirstPrice{}, chain, exact).miner_revenue, 16);
}

TEST(Settle, M1559SplitsTipAndBurn) {
  const ChainState chain = chain_at(100);
  const Block b = make_block(1, 100, {tx("a", 21000, 200, FeeCapTipBid{200, 4})});
  const auto report = settle(M1559{}, chain, b);
  EXPECT_DOUBLE_EQ(report.miner_revenue, 84000);
  EXPECT_DOUBLE_EQ(report.burned_total, 2.1e6);
  EXPECT_DOUBLE_EQ(report.forwarded_total, 0);
}

TEST(Settle, SmoothedCollectsWindowAverage) {
  ChainState chain = chain_at(100);
  chain = append_block(chain, make_block(1, 100, {fpa_tx("x", 100, 12'500'000)}));
  chain = append_block(chain, make_block(2, 100, {fpa_tx("y", 100, 25'000'000)}));
  const Price r = current_base_fee(chain);
  const Block b = make_block(3, r, {});
  EXPECT_DOUBLE_EQ(settle(Smoothed{2}, chain, b).paid_forward_received, 1.875e9);
}

TEST(Settle, VickreyChargesLowestIncludedBid) {
  const ChainState chain = chain_at(0, 3);
  const Block b = make_block(1, 0, {fpa_tx("a", 10), fpa_tx("b", 8), fpa_tx("c", 3)});
  const auto report = settle(Vickrey{}, chain, b);
  for (const auto& c : report.charges) EXPECT_DOUBLE_EQ(c.payment, 3);
  EXPECT_DOUBLE_EQ(report.miner_revenue, 9);
}

TEST(Settle, FeeBurningFpaBurnsEverything) {
  const ChainState chain = chain_at(0, 3);
  const auto report = settle(FeeBurningFpa{}, chain, make_block(1, 0, {fpa_tx("a", 10)}));
  EXPECT_DOUBLE_EQ(report.miner_revenue, 0);
  EXPECT_DOUBLE_EQ(report.burned_total, 10);
}

TEST(ValidateBlock, FeeCapBelowBase) {
  const ChainState chain = chain_at(100);
  const Block b = make_block(1, 100, {tx("a", 1, 99, FeeCapTipBid{99, 1})});
  const auto v = validate_block(M1559{}, chain, b);
  ASSERT_FALSE(v.empty());
  EXPECT_EQ(v.front().kind, ViolationKind::fee_cap_below_base);
  EXPECT_EQ(v.front().tx_id, "a");
  EXPECT_STREQ(to_string(v.front().kind), "FeeCapBelowBase");
  EXPECT_THROW(settle(M1559{}, chain, b), Error);
}

TEST(ValidateBlock, FullBlockHasNoSizeViolation) {
  const ChainState chain = chain_at(0, 5);
  EXPECT_TRUE(validate_block(FirstPrice{}, chain, make_block(1, 0, {fpa_tx("a", 1, 5)})).empty());
  const auto v = validate_block(FirstPrice{}, chain, make_block(1, 0, {fpa_tx("a", 1, 6)}));
  ASSERT_FALSE(v.empty());
  EXPECT_EQ(v.front().kind, ViolationKind::oversize);
}

TEST(ValidateBlock, WrongBaseFeeAndHeight) {
  const ChainState chain = chain_at(10, 5);
  const auto v = validate_block(M1559{}, chain, make_block(2, 11, {}));
  std::vector<ViolationKind> kinds;
  for (const auto& x : v) kinds.push_back(x.kind);
  EXPECT_NE(std::find(kinds.begin(), kinds.end(), ViolationKind::height_mismatch), kinds.end());
  EXPECT_NE(std::find(kinds.begin(), kinds.end(), ViolationKind::base_fee_mismatch), kinds.end());
}

TEST(ValidateBlock, DuplicateIds) {
  const ChainState chain = chain_at(0, 5);
  const auto v = validate_block(FirstPrice{}, chain, make_block(1, 0, {fpa_tx("a", 1), fpa_tx("a", 2)}));
  ASSERT_FALSE(v.empty());
  EXPECT_EQ(v.front().kind, ViolationKind::duplicate_id);
}

// Random truthful mempools for property tests.
struct RandomMarket {
  ChainState chain;
  Mempool mempool;
};

RandomMarket random_market(std::mt19937_64& rng, const MechanismSpec& spec) {
  std::uniform_int_distribution<int> n(0, 12), gas(1, 4), value(0, 40), base(0, 20), mu(0, 3);
  RandomMarket out{chain_at(base(rng), 20, mu(rng)), {}};
  const int count = n(rng);
  for (int i = 0; i < count; ++i) {
    const Price v = value(rng);
    out.mempool.txs.push_back(
        tx("t" + std::to_string(i), gas(rng), v, truthful_bid(spec, v, out.chain.env.marginal_cost)));
  }
  return out;
}

const std::vector<MechanismSpec>& all_specs() {
  static const std::vector<MechanismSpec> specs{
      FirstPrice{}, Vickrey{}, FeeBurningFpa{}, M1559{},     M1559R{},
      Tipless{1.0}, Smoothed{3}, Blended{0.4, 2}, Beos{2, 1.0, 1.0}};
  return specs;
}

TEST(SettleProperty, IndividuallyRationalAndConserving) {
  std::mt19937_64 rng(101);
  for (const auto& spec : all_specs()) {
    for (int trial = 0; trial < 150; ++trial) {
      const RandomMarket m = random_market(rng, spec);
      const Block b = allocate(spec, m.chain, m.mempool, AllocMode::exact);
      ASSERT_LE(b.gas_used, m.chain.env.max_block_size);
      const auto report = settle(spec, m.chain, b);
      double paid = 0.0, burned = 0.0, forwarded = 0.0;
      for (std::size_t i = 0; i < b.txs.size(); ++i) {
        const auto& c = report.charges[i];
        const double g = static_cast<double>(b.txs[i].gas_limit);
        EXPECT_GE(c.payment, -1e-12) << mechanism_name(spec);
        EXPECT_GE(c.burn, -1e-12);
        EXPECT_LE(c.payment + c.burn + c.forward, c.bid + 1e-9) << mechanism_name(spec);
        EXPECT_LE(c.bid, b.txs[i].value + 1e-9) << mechanism_name(spec);
        paid += c.payment * g;
        burned += c.burn * g;
        forwarded += c.forward * g;
      }
      EXPECT_NEAR(paid, report.miner_revenue, 1e-6);
      EXPECT_NEAR(burned, report.burned_total, 1e-6);
      EXPECT_NEAR(forwarded, report.forwarded_total, 1e-6);
    }
  }
}

TEST(SettleProperty, BlendedEndpointsMatchM1559AndSmoothed) {
  std::mt19937_64 rng(202);
  for (int trial = 0; trial < 100; ++trial) {
    RandomMarket m = random_market(rng, M1559{});
    std::uniform_int_distribution<Gas> prior(0, 20);
    for (int h = 1; h <= 3; ++h) {
      m.chain = append_block(m.chain, make_block(h, current_base_fee(m.chain),
                                                 {fpa_tx("p" + std::to_string(h), 1, prior(rng))}));
    }
    const Block b = allocate(M1559{}, m.chain, m.mempool, AllocMode::greedy);
    const auto ref = settle(M1559{}, m.chain, b);
    const auto one = settle(Blended{1.0, 2}, m.chain, b);
    const auto smooth = settle(Smoothed{2}, m.chain, b);
    const auto zero = settle(Blended{0.0, 2}, m.chain, b);
    EXPECT_EQ(one.miner_revenue, ref.miner_revenue);
    EXPECT_EQ(one.burned_total, ref.burned_total);
    EXPECT_EQ(one.forwarded_total, ref.forwarded_total);
    EXPECT_EQ(one.paid_forward_received, ref.paid_forward_received);
    EXPECT_EQ(zero.miner_revenue, smooth.miner_revenue);
    EXPECT_EQ(zero.burned_total, smooth.burned_total);
    EXPECT_EQ(zero.forwarded_total, smooth.forwarded_total);
    EXPECT_EQ(zero.paid_forward_received, smooth.paid_forward_received);
  }
}

TEST(Mechanism, NamesAndValidation) {
  EXPECT_EQ(mechanism_name(M1559{}), "m1559");
  EXPECT_TRUE(has_base_fee(Tipless{}));
  EXPECT_FALSE(has_base_fee(FirstPrice{}));
  EXPECT_THROW(validate_mechanism(Smoothed{0}), Error);
  EXPECT_THROW(validate_mechanism(Blended{1.5, 1}), Error);
}

}  // namespace
}  // namespace feemech
