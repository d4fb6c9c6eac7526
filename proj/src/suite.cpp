// Copyright 2026 The feemech Authors.
// SPDX-License-Identifier: Apache-2.0

#include "feemech/suite.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <random>
#include <thread>

#include "feemech/basefee.hpp"
#include "feemech/demand.hpp"

namespace feemech {
namespace {

Instance make_instance(std::string name, Gas max_block, Price r, Price mu,
                       std::vector<std::pair<Price, Gas>> txs) {
  Instance inst;
  inst.name = std::move(name);
  EnvParams env;
  env.max_block_size = max_block;
  env.target_block_size = std::max<Gas>(1, max_block / 2);
  env.marginal_cost = mu;
  env.min_base_fee = 0.0;
  UpdateRule rule;
  rule.r0 = r;
  rule.min_base_fee = 0.0;
  inst.chain = ChainState{{}, env, rule};
  char id[16];
  for (std::size_t i = 0; i < txs.size(); ++i) {
    std::snprintf(id, sizeof id, "t%zu", i + 1);
    inst.mempool.txs.push_back(Transaction{id, txs[i].second, txs[i].first, FpaBid{txs[i].first}, false});
  }
  for (int level = 0; level <= 10; ++level) inst.bid_grid.push_back(level);
  inst.gas_grid = {1, 2};
  inst.max_fakes = 1;
  return inst;
}

Instance with_truthful_bids(const MechanismSpec& spec, Instance inst) {
  for (auto& tx : inst.mempool.txs) tx.bid = truthful_bid(spec, tx.value, inst.chain.env.marginal_cost);
  return inst;
}

// Per-instance outcome of one claim: not applicable, as expected, or not.
enum class Outcome { skipped, ok, bad };

struct Claim {
  std::string name;
  std::function<Outcome(const Instance&)> eval;
};

Outcome expect(bool holds, bool want) { return holds == want ? Outcome::ok : Outcome::bad; }

bool has_profitable_tx(const Instance& inst) {
  return std::any_of(inst.mempool.txs.begin(), inst.mempool.txs.end(), [&](const Transaction& t) {
    return t.value > inst.chain.env.marginal_cost;
  });
}

std::vector<Claim> battery_claims() {
  const MechanismSpec fpa = FirstPrice{};
  const MechanismSpec m1559 = M1559{};
  const MechanismSpec burn = FeeBurningFpa{};
  const MechanismSpec smoothed = Smoothed{2};
  auto tipless = [](const Instance& inst) {
    return MechanismSpec{Tipless{inst.chain.env.marginal_cost}};
  };
  auto rmu = [](const Instance& inst) {
    return current_base_fee(inst.chain) + inst.chain.env.marginal_cost;
  };

  std::vector<Claim> claims;
  claims.push_back({"mmic holds for fpa", [=](const Instance& i) {
                      return expect(check_mmic(fpa, with_truthful_bids(fpa, i)).holds, true);
                    }});
  claims.push_back({"mmic holds for m1559", [=](const Instance& i) {
                      return expect(check_mmic(m1559, with_truthful_bids(m1559, i)).holds, true);
                    }});
  claims.push_back({"mmic holds for tipless", [=](const Instance& i) {
                      const auto spec = tipless(i);
                      return expect(check_mmic(spec, with_truthful_bids(spec, i)).holds, true);
                    }});
  claims.push_back({"costly holds for m1559 at gamma = r+mu", [=](const Instance& i) {
                      return expect(
                          check_costly(m1559, with_truthful_bids(m1559, i), rmu(i)).holds, true);
                    }});
  claims.push_back({"costly fails for m1559 at gamma = r+mu+0.5", [=](const Instance& i) {
                      return expect(
                          check_costly(m1559, with_truthful_bids(m1559, i), rmu(i) + 0.5).holds,
                          false);
                    }});
  claims.push_back({"uic holds for m1559 when the base fee is not excessively low",
                    [=](const Instance& i) {
                      if (is_excessively_low(i)) return Outcome::skipped;
                      return expect(check_uic_epne(m1559, i, Truthful1559{}).holds, true);
                    }});
  claims.push_back({"uic fails for m1559 when the base fee is excessively low",
                    [=](const Instance& i) {
                      if (!is_excessively_low(i)) return Outcome::skipped;
                      return expect(check_uic_epne(m1559, i, Truthful1559{}).holds, false);
                    }});
  claims.push_back({"truthful bidding is dominant for tipless", [=](const Instance& i) {
                      return expect(check_dominant(tipless(i), i, TruthfulTipless{}).holds, true);
                    }});
  claims.push_back({"oca-proof holds for fpa", [=](const Instance& i) {
                      return expect(check_oca_proof(fpa, i).holds, true);
                    }});
  claims.push_back({"oca-proof holds for m1559", [=](const Instance& i) {
                      return expect(check_oca_proof(m1559, i).holds, true);
                    }});
  claims.push_back({"oca-proof holds for smoothed (window 2)", [=](const Instance& i) {
                      return expect(check_oca_proof(smoothed, i).holds, true);
                    }});
  claims.push_back({"oca-proof fails for fee-burning fpa", [=](const Instance& i) {
                      if (!has_profitable_tx(i)) return Outcome::skipped;
                      return expect(check_oca_proof(burn, i).holds, false);
                    }});
  claims.push_back({"oca-proof holds for tipless when the base fee is not excessively low",
                    [=](const Instance& i) {
                      if (is_excessively_low(i)) return Outcome::skipped;
                      return expect(check_oca_proof(tipless(i), i).holds, true);
                    }});
  claims.push_back({"1559-r outcomes equal first-price outcomes", [=](const Instance& i) {
                      if (i.mempool.txs.size() < 2 || i.mempool.txs.size() > 3) {
                        return Outcome::skipped;
                      }
                      return expect(check_1559r_fpa_equivalence(i).holds, true);
                    }});
  return claims;
}

}  // namespace

bool is_excessively_low(const Instance& inst) {
  return is_excessively_low(inst.mempool, current_base_fee(inst.chain), inst.chain.env.marginal_cost,
                            inst.chain.env.max_block_size);
}

std::vector<Instance> default_battery(std::uint64_t seed, std::size_t count) {
  std::mt19937_64 rng(seed);
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  std::vector<Instance> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const int n = pick(1, 5);
    const Gas max_block = pick(2, 4);
    const int r = pick(1, 4);
    const int mu = pick(0, 1);
    std::vector<std::pair<Price, Gas>> txs;
    for (int t = 0; t < n; ++t) {
      int v = pick(0, 10);
      while (v == r + mu || v == r + mu + 1) v = pick(0, 10);
      txs.emplace_back(v, pick(1, 2));
    }
    out.push_back(make_instance("battery-" + std::to_string(k), max_block, r, mu, std::move(txs)));
  }
  return out;
}

Instance tipless_two_slot_instance() {
  Instance inst = make_instance("tipless-two-slot", 2, 1.0, 0.0, {{2.0, 1}, {1.0, 2}});
  for (auto& tx : inst.mempool.txs) tx.bid = CapOnlyBid{tx.value};
  return inst;
}

Instance vickrey_example_instance() {
  Instance inst = make_instance("vickrey-10-8-3", 3, 0.0, 0.0, {{10.0, 1}, {8.0, 1}, {3.0, 1}});
  inst.gas_grid = {1};
  return inst;
}

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& f) {
  const auto workers = static_cast<std::size_t>(std::max(1, jobs));
  if (workers == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::min(workers, n); ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          f(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::vector<ClaimResult> run_theorem_battery(const std::vector<Instance>& battery, int jobs) {
  const auto claims = battery_claims();
  std::vector<std::vector<Outcome>> outcomes(battery.size(), std::vector<Outcome>(claims.size()));
  parallel_for(battery.size(), jobs, [&](std::size_t i) {
    for (std::size_t c = 0; c < claims.size(); ++c) outcomes[i][c] = claims[c].eval(battery[i]);
  });

  std::vector<ClaimResult> results;
  for (std::size_t c = 0; c < claims.size(); ++c) {
    ClaimResult r;
    r.name = claims[c].name;
    for (std::size_t i = 0; i < battery.size(); ++i) {
      if (outcomes[i][c] == Outcome::skipped) continue;
      ++r.instances;
      if (outcomes[i][c] == Outcome::bad && r.passed) {
        r.passed = false;
        r.detail = battery[i].name;
      }
    }
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace feemech
