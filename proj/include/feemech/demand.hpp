// Copyright 2026 The feemech Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <utility>
#include <variant>
#include <vector>

#include "feemech/core.hpp"

namespace feemech {

/// D(p) = max{0, intercept − slope·p}.
struct LinearDemand {
  double intercept_gas = 0.0;
  double slope_gas_per_gwei = 0.0;
};

/// Step demand: D(p) is the total gas of all points priced at p or more.
struct EmpiricalDemand {
  struct Point {
    Price price;
    double gas;
  };
  std::vector<Point> points;
};

using DemandCurve = std::variant<LinearDemand, EmpiricalDemand>;

struct MonopolyPoint {
  Price pbar = 0.0;    // unconstrained revenue maximizer
  Price p_star = 0.0;  // max(pbar, market-clearing price at G)
  double q_star = 0.0;
};

void validate_curve(const DemandCurve& curve);

double quantity(const DemandCurve& curve, Price p);

/// Smallest price whose demand fits in `supply` (0 when D(0) ≤ supply). For
/// step curves this is the infimum of that set, i.e. the highest excluded
/// price point.
Price market_clearing_price(const DemandCurve& curve, double supply);

/// R(p) = p·D(p), in gwei.
Gwei revenue(const DemandCurve& curve, Price p);

/// Closed form for linear curves; throws non_concave_revenue otherwise.
MonopolyPoint monopoly_point(const DemandCurve& curve, Gas max_block_size);

/// Σ g_t over transactions with v_t ≥ p.
Gas mempool_demand(const Mempool& mempool, Price p);

/// Slack used for the strict comparison demand(r+μ) > G.
inline constexpr double kExcessSlackGas = 1e-6;

bool is_excessively_low(const Mempool& mempool, Price r, Price mu, Gas max_block_size);
bool is_excessively_low(const DemandCurve& curve, Price r, Price mu, Gas max_block_size);

/// Discretizes a curve into transactions of `tx_gas` each. Transaction j sits
/// at the inverse demand of a seeded point inside its slot
/// [j·tx_gas, (j+1)·tx_gas), so the mempool's demand is within one tx_gas of
/// D(p) at every price. Step curves are inverted on a price grid of
/// `price_grid_step`. Bids are left as FpaBid{value}.
Mempool mempool_from_curve(const DemandCurve& curve, Gas tx_gas, Price price_grid_step,
                           std::uint64_t seed);

}  // namespace feemech
