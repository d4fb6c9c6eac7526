// Copyright 2026 The feemech Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Brute-force verifiers for the incentive properties of a fee mechanism.
//
// Every universal quantifier is discharged over the finite grids carried by an
// Instance, so a verdict that holds means "holds on this grid". A verdict that
// fails carries a witness that replay_witness() re-evaluates through the
// utility functions in agents.hpp.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "feemech/agents.hpp"
#include "feemech/core.hpp"
#include "feemech/mechanisms.hpp"

namespace feemech {

struct Instance {
  std::string name;
  ChainState chain;  // fixes the current base fee through its rule and blocks
  Mempool mempool;   // values visible; bids may be overwritten by strategies
  std::vector<Price> bid_grid;
  std::vector<Gas> gas_grid{1};
  int max_fakes = 1;

  void validate() const;
};

inline constexpr double kUtilityTolerance = 1e-9;
inline constexpr std::uint64_t kDefaultBudget = 20'000'000;

enum class WitnessKind { miner_deviation, costly_violation, user_deviation, oca, outcome_mismatch };

const char* to_string(WitnessKind kind);

struct Witness {
  WitnessKind kind = WitnessKind::miner_deviation;
  std::string description;

  // miner_deviation / costly_violation: the deviating block (fakes flagged);
  // oca: the block the coalition mines, with its on-chain bids.
  Block block;
  double gamma = 0.0;

  // user_deviation: the deviating transaction, the bid it should have used and
  // the bid that beats it, against the other transactions' bids in `others`.
  std::string tx_id;
  std::optional<BidParams> strategy_bid;
  std::optional<BidParams> deviating_bid;
  std::vector<Transaction> others;

  // oca: best on-chain block found over the bid grid.
  std::optional<Block> onchain_block;

  double baseline = 0.0;
  double deviation = 0.0;
  double delta = 0.0;  // deviation − baseline, > tolerance
};

struct Verdict {
  bool holds = true;
  std::optional<Witness> witness;
  std::uint64_t evaluations = 0;
};

/// Honest allocation without fakes maximizes myopic miner utility over every
/// fake multiset (≤ max_fakes, from bid_grid × gas_grid) and every valid block
/// drawn from the mempool and those fakes.
Verdict check_mmic(const MechanismSpec& spec, const Instance& inst,
                   std::uint64_t budget = kDefaultBudget);

/// u(F, B) ≤ u(∅, B ∩ M) − γ·Σ_{F} g for every enumerated (F, B).
Verdict check_costly(const MechanismSpec& spec, const Instance& inst, Price gamma,
                     std::uint64_t budget = kDefaultBudget);

/// With every transaction bidding per `strategy`, no transaction gains from a
/// unilateral deviation to any grid bid.
Verdict check_uic_epne(const MechanismSpec& spec, const Instance& inst,
                       const UserStrategy& strategy, std::uint64_t budget = kDefaultBudget);

/// The strategy's bid is optimal for every transaction against every grid
/// profile of the other transactions' bids.
Verdict check_dominant(const MechanismSpec& spec, const Instance& inst,
                       const UserStrategy& strategy, std::uint64_t budget = kDefaultBudget);

/// Some on-chain grid bid vector reaches the best joint utility any
/// off-chain agreement (feasible set T with on-chain grid bids) can reach.
/// A transaction whose value covers the base fee keeps a valid bid on-chain.
Verdict check_oca_proof(const MechanismSpec& spec, const Instance& inst,
                        std::uint64_t budget = kDefaultBudget);

/// First-price outcomes (allocation, per-tx net payment) over grid bids equal
/// 1559-R outcomes with off-chain transfers over grid bids and transfers.
Verdict check_1559r_fpa_equivalence(const Instance& inst, std::uint64_t budget = kDefaultBudget);

/// Recomputes a failed verdict's utility gap through agents.hpp. Returns the
/// gap (positive for a genuine counterexample); outcome mismatches return 1
/// when the outcome is reproduced on exactly one side.
double replay_witness(const MechanismSpec& spec, const Instance& inst, const Witness& witness);

}  // namespace feemech
