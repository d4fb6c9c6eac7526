// Copyright 2026 The feemech Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "feemech/game_checks.hpp"

namespace feemech {

/// Small random instances: 1–5 unit or two-unit transactions, G ∈ {2,3,4},
/// integer base fee 1–4, μ ∈ {0,1}, integer values in [0,10] that stay off
/// r+μ and r+μ+1, integer bid grid 0–10, one fake at most.
std::vector<Instance> default_battery(std::uint64_t seed = 20260101, std::size_t count = 240);

bool is_excessively_low(const Instance& inst);

/// Instance with G=2, r=1, μ=0 and transactions (v=2, g=1), (v=1, g=2).
Instance tipless_two_slot_instance();

/// Three unit transactions bidding 10, 8, 3 in a block of three units.
Instance vickrey_example_instance();

struct ClaimResult {
  std::string name;
  bool passed = true;
  std::size_t instances = 0;  // instances the claim was evaluated on
  std::string detail;         // first offending instance, if any
};

/// Runs every battery claim over `battery`, fanning instances out over `jobs`
/// worker threads.
std::vector<ClaimResult> run_theorem_battery(const std::vector<Instance>& battery, int jobs);

/// Maps f over [0, n) on `jobs` threads; results keep index order.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& f);

}  // namespace feemech
