// Copyright 2026 The feemech Authors.
// SPDX-License-Identifier: Apache-2.0

#include "feemech/demand.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>

namespace feemech {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::vector<EmpiricalDemand::Point> sorted_desc(const EmpiricalDemand& curve) {
  auto points = curve.points;
  std::sort(points.begin(), points.end(),
            [](const auto& a, const auto& b) { return a.price > b.price; });
  return points;
}

double total_demand(const DemandCurve& curve) { return quantity(curve, 0.0); }

}  // namespace

void validate_curve(const DemandCurve& curve) {
  std::visit(Overloaded{
                 [](const LinearDemand& c) {
                   if (!(c.intercept_gas >= 0) || !(c.slope_gas_per_gwei >= 0)) {
                     throw Error(ErrorCode::config_error,
                                 "linear demand needs intercept, slope >= 0");
                   }
                 },
                 [](const EmpiricalDemand& c) {
                   for (const auto& pt : c.points) {
                     if (!(pt.price >= 0) || !(pt.gas >= 0)) {
                       throw Error(ErrorCode::config_error,
                                   "empirical demand points must be non-negative");
                     }
                   }
                 },
             },
             curve);
}

double quantity(const DemandCurve& curve, Price p) {
  return std::visit(Overloaded{
                        [p](const LinearDemand& c) {
                          return std::max(0.0, c.intercept_gas - c.slope_gas_per_gwei * p);
                        },
                        [p](const EmpiricalDemand& c) {
                          double q = 0.0;
                          for (const auto& pt : c.points) {
                            if (pt.price >= p) q += pt.gas;
                          }
                          return q;
                        },
                    },
                    curve);
}

Price market_clearing_price(const DemandCurve& curve, double supply) {
  if (total_demand(curve) <= supply) return 0.0;
  return std::visit(Overloaded{
                        [supply](const LinearDemand& c) -> Price {
                          if (c.slope_gas_per_gwei == 0.0) {
                            return std::numeric_limits<Price>::infinity();
                          }
                          return (c.intercept_gas - supply) / c.slope_gas_per_gwei;
                        },
                        [supply](const EmpiricalDemand& c) -> Price {
                          double cum = 0.0;
                          for (const auto& pt : sorted_desc(c)) {
                            cum += pt.gas;
                            if (cum > supply) return pt.price;
                          }
                          return 0.0;
                        },
                    },
                    curve);
}

Gwei revenue(const DemandCurve& curve, Price p) { return p * quantity(curve, p); }

MonopolyPoint monopoly_point(const DemandCurve& curve, Gas max_block_size) {
  const auto* linear = std::get_if<LinearDemand>(&curve);
  if (linear == nullptr || linear->slope_gas_per_gwei <= 0.0) {
    throw Error(ErrorCode::non_concave_revenue,
                "monopoly analysis needs a strictly concave revenue curve");
  }
  MonopolyPoint mp;
  mp.pbar = linear->intercept_gas / (2.0 * linear->slope_gas_per_gwei);
  const Price clearing = market_clearing_price(curve, static_cast<double>(max_block_size));
  mp.p_star = std::max(mp.pbar, clearing);
  mp.q_star = std::min(quantity(curve, mp.pbar), static_cast<double>(max_block_size));
  return mp;
}

Gas mempool_demand(const Mempool& mempool, Price p) {
  Gas q = 0;
  for (const auto& tx : mempool.txs) {
    if (tx.value >= p) q += tx.gas_limit;
  }
  return q;
}

bool is_excessively_low(const Mempool& mempool, Price r, Price mu, Gas max_block_size) {
  return mempool_demand(mempool, r + mu) > max_block_size;
}

bool is_excessively_low(const DemandCurve& curve, Price r, Price mu, Gas max_block_size) {
  return quantity(curve, r + mu) > static_cast<double>(max_block_size) + kExcessSlackGas;
}

Mempool mempool_from_curve(const DemandCurve& curve, Gas tx_gas, Price price_grid_step,
                           std::uint64_t seed) {
  if (tx_gas < 1 || !(price_grid_step > 0)) {
    throw Error(ErrorCode::config_error, "mempool_from_curve needs tx_gas >= 1 and step > 0");
  }
  validate_curve(curve);
  const double total = total_demand(curve);
  const auto count = static_cast<std::int64_t>(std::floor(total / static_cast<double>(tx_gas)));

  // Largest price whose demand still covers quantity q.
  auto inverse = [&](double q) -> Price {
    if (const auto* c = std::get_if<LinearDemand>(&curve)) {
      if (c->slope_gas_per_gwei == 0.0) return 0.0;
      return std::max(0.0, (c->intercept_gas - q) / c->slope_gas_per_gwei);
    }
    const auto& points = std::get<EmpiricalDemand>(curve).points;
    Price top = 0.0;
    for (const auto& pt : points) top = std::max(top, pt.price);
    Price lo = 0.0;
    for (auto k = static_cast<std::int64_t>(std::floor(top / price_grid_step)); k >= 0; --k) {
      const Price p = static_cast<double>(k) * price_grid_step;
      if (quantity(curve, p) >= q) {
        lo = p;
        break;
      }
    }
    return lo;
  };

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> offset(0.0, 1.0);

  Mempool mempool;
  mempool.txs.reserve(static_cast<std::size_t>(count));
  char id[32];
  for (std::int64_t j = 0; j < count; ++j) {
    const double q = (static_cast<double>(j) + offset(rng)) * static_cast<double>(tx_gas);
    const Price v = inverse(q);
    std::snprintf(id, sizeof id, "tx-%07lld", static_cast<long long>(j));
    mempool.txs.push_back(Transaction{id, tx_gas, v, FpaBid{v}, false});
  }
  return mempool;
}

}  // namespace feemech
