// Copyright 2026 The feemech Authors.
// SPDX-License-Identifier: Apache-2.0

#include "feemech/knapsack.hpp"

#include <algorithm>
#include <numeric>

namespace feemech {
namespace {

struct Cell {
  double value = 0.0;
  Gas weight = 0;
};

// True when `take` should win over `skip`; ties go to taking the item.
bool prefer_take(const Cell& take, const Cell& skip) {
  if (take.value > skip.value + kValueTieEps) return true;
  if (take.value < skip.value - kValueTieEps) return false;
  return take.weight >= skip.weight;
}

}  // namespace

std::vector<std::size_t> knapsack_exact(std::span<const KnapsackItem> items, Gas capacity,
                                        Gas dp_bound) {
  const std::size_t n = items.size();
  if (n == 0 || capacity <= 0) return {};

  Gas divisor = 0;
  Gas total = 0;
  for (const auto& item : items) {
    divisor = std::gcd(divisor, item.weight);
    total += item.weight;
  }
  const Gas cap = std::min(capacity, total) / divisor;
  if (cap > dp_bound) {
    throw Error(ErrorCode::exact_mode_too_large,
                "exact allocation needs " + std::to_string(cap) + " capacity units, bound " +
                    std::to_string(dp_bound));
  }

  const auto width = static_cast<std::size_t>(cap) + 1;
  std::vector<Cell> table((n + 1) * width);
  auto at = [&](std::size_t i, Gas c) -> Cell& {
    return table[i * width + static_cast<std::size_t>(c)];
  };

  for (std::size_t i = n; i-- > 0;) {
    const Gas w = items[i].weight / divisor;
    for (Gas c = 0; c <= cap; ++c) {
      const Cell skip = at(i + 1, c);
      if (w > c) {
        at(i, c) = skip;
        continue;
      }
      const Cell& rest = at(i + 1, c - w);
      const Cell take{rest.value + items[i].value, rest.weight + w};
      at(i, c) = prefer_take(take, skip) ? take : skip;
    }
  }

  std::vector<std::size_t> chosen;
  Gas c = cap;
  for (std::size_t i = 0; i < n; ++i) {
    const Gas w = items[i].weight / divisor;
    if (w > c) continue;
    const Cell& rest = at(i + 1, c - w);
    const Cell take{rest.value + items[i].value, rest.weight + w};
    if (prefer_take(take, at(i + 1, c))) {
      chosen.push_back(i);
      c -= w;
    }
  }
  return chosen;
}

std::vector<std::size_t> knapsack_greedy(std::span<const KnapsackItem> items, Gas capacity) {
  std::vector<std::size_t> order(items.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double da = items[a].value / static_cast<double>(items[a].weight);
    const double db = items[b].value / static_cast<double>(items[b].weight);
    return da > db;
  });
  std::vector<std::size_t> chosen;
  Gas used = 0;
  for (std::size_t i : order) {
    if (used + items[i].weight <= capacity) {
      chosen.push_back(i);
      used += items[i].weight;
    }
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

double knapsack_value(std::span<const KnapsackItem> items, std::span<const std::size_t> chosen) {
  double v = 0.0;
  for (std::size_t i : chosen) v += items[i].value;
  return v;
}

}  // namespace feemech
