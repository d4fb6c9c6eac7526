// Copyright 2026 The feemech Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "feemech/core.hpp"

namespace feemech {

struct KnapsackItem {
  Gas weight = 1;
  double value = 0.0;  // total value of the item, not per gas
};

inline constexpr Gas kDefaultDpBound = 1'000'000;
inline constexpr double kValueTieEps = 1e-9;

/// Exact 0/1 knapsack by dynamic programming over gas units (weights and
/// capacity are first divided by the gcd of the weights). Among optimal sets
/// prefers more total weight, then sets that include earlier items. Items
/// must be ordered by the caller's tie-break key and have value ≥ 0.
/// Returns chosen indices in ascending order.
std::vector<std::size_t> knapsack_exact(std::span<const KnapsackItem> items, Gas capacity,
                                        Gas dp_bound = kDefaultDpBound);

/// Sorts by value density (descending, stable on item order) and adds every
/// item that still fits.
std::vector<std::size_t> knapsack_greedy(std::span<const KnapsackItem> items, Gas capacity);

double knapsack_value(std::span<const KnapsackItem> items, std::span<const std::size_t> chosen);

}  // namespace feemech
