// Copyright 2026 The feemech Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

// JSON encodings of scenarios, instances, verdicts and reports. Top-level
// documents carry "schema_version"; unknown fields are rejected everywhere.

#include <optional>
#include <string>

#include <json.hpp>

#include "feemech/agents.hpp"
#include "feemech/core.hpp"
#include "feemech/demand.hpp"
#include "feemech/game_checks.hpp"
#include "feemech/mechanisms.hpp"
#include "feemech/simulator.hpp"

namespace feemech {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

Json to_json(const EnvParams& env);
EnvParams env_from_json(const Json& j);

Json to_json(const MechanismSpec& spec);
MechanismSpec mechanism_from_json(const Json& j);
/// Accepts a bare mechanism name ("m1559") or a JSON object.
MechanismSpec parse_mechanism(const std::string& text);

Json to_json(const UpdateRule& rule);
/// Missing min_base_fee falls back to `default_floor`.
UpdateRule rule_from_json(const Json& j, Price default_floor = 1.0);

Json to_json(const DemandCurve& curve);
DemandCurve curve_from_json(const Json& j);

Json to_json(const MinerStrategy& strategy);
MinerStrategy miner_from_json(const Json& j);
Json to_json(const UserStrategy& strategy);
UserStrategy user_from_json(const Json& j);

Json to_json(const BidParams& bid);
BidParams bid_from_json(const Json& j);
Json to_json(const Transaction& tx);
Transaction tx_from_json(const Json& j);
Json to_json(const Block& block);
Block block_from_json(const Json& j);

Json to_json(const Scenario& scenario);
Scenario scenario_from_json(const Json& j);

/// Transactions without a "bid" get the mechanism's truthful bid when
/// `spec` is given, an FPA bid of their value otherwise.
Json to_json(const Instance& inst);
Instance instance_from_json(const Json& j, const std::optional<MechanismSpec>& spec = std::nullopt);

Json to_json(const Witness& witness);
Witness witness_from_json(const Json& j);
Json to_json(const Verdict& verdict);

Json to_json(const TrajectoryReport& report);
TrajectoryReport report_from_json(const Json& j);

Json to_json(const Cycle& cycle);

/// Reads a file into a JSON document; throws config_error with the path.
Json load_json_file(const std::string& path);

}  // namespace feemech
