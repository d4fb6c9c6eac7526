// Copyright 2026 The feemech Authors.
// SPDX-License-Identifier: Apache-2.0

#include "feemech/cli.hpp"

#include <cstdio>
#include <fstream>
#include <optional>

#include <CLI11.hpp>

#include "feemech/basefee.hpp"
#include "feemech/io.hpp"
#include "feemech/simulator.hpp"
#include "feemech/suite.hpp"

namespace feemech {
namespace {

struct SimulateArgs {
  std::string scenario;
  std::string out;
  std::string format = "csv";
  std::size_t cycle = 0;
};

struct CheckArgs {
  std::string property;
  std::string instance;
  std::string mechanism;
  std::string strategy;
  std::string replay;
  double gamma = -1.0;
  bool expect_holds = true;
  std::uint64_t budget = kDefaultBudget;
};

struct AttackArgs {
  std::string rule = "linear1559";
  double learning_rate = 0.125;
  double r_start = 1.0;
  Gas max_block = 25'000'000;
  int n = 20;
};

struct DemandArgs {
  double intercept = 0.0;
  double slope = 0.0;
  std::string curve;
  std::optional<double> price;
  std::optional<double> supply;
  Gas max_block = 25'000'000;
  bool monopoly = false;
};

struct SuiteArgs {
  int jobs = 1;
  std::uint64_t seed = 20260101;
  std::size_t count = 240;
};

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorCode::config_error, "cannot write " + path);
  file << text;
}

std::string fixed(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

int do_simulate(const SimulateArgs& a, std::ostream& out) {
  const Scenario scenario = scenario_from_json(load_json_file(a.scenario));
  const TrajectoryReport report = run_trajectory(scenario);
  std::string text;
  if (a.format == "csv") {
    text = to_csv(report);
  } else {
    Json j = to_json(report);
    if (a.cycle > 0) {
      const auto cycle = detect_oscillation(report, a.cycle);
      j["cycle"] = cycle ? to_json(*cycle) : Json(nullptr);
    }
    text = j.dump(2) + "\n";
  }
  write_text(a.out, text, out);
  return kExitOk;
}

UserStrategy default_strategy(const MechanismSpec& spec) {
  if (std::holds_alternative<Tipless>(spec) || std::holds_alternative<Beos>(spec)) {
    return TruthfulTipless{};
  }
  if (has_base_fee(spec)) return Truthful1559{};
  return ShadedFpa{1.0};
}

int do_check(const CheckArgs& a, std::ostream& out) {
  const MechanismSpec spec =
      a.property == "equiv1559r" && a.mechanism.empty() ? MechanismSpec{M1559R{}} : parse_mechanism(a.mechanism);
  const Instance inst = instance_from_json(load_json_file(a.instance), spec);
  const UserStrategy strategy = a.strategy.empty() ? default_strategy(spec)
                                                   : user_from_json(a.strategy.front() == '{'
                                                                        ? Json::parse(a.strategy)
                                                                        : Json{{"user", a.strategy}});

  if (!a.replay.empty()) {
    const Json doc = load_json_file(a.replay);
    const Json& wj = doc.contains("witness") ? doc.at("witness") : doc;
    const Witness w = witness_from_json(wj);
    const double gap = replay_witness(spec, inst, w);
    out << Json{{"kind", to_string(w.kind)}, {"replayed_delta", gap}, {"confirmed", gap > kUtilityTolerance}}
               .dump(2)
        << "\n";
    return gap > kUtilityTolerance ? kExitCounterexample : kExitOk;
  }

  Verdict v;
  if (a.property == "mmic") {
    v = check_mmic(spec, inst, a.budget);
  } else if (a.property == "costly") {
    if (a.gamma < 0) throw Error(ErrorCode::config_error, "--gamma is required for costly");
    v = check_costly(spec, inst, a.gamma, a.budget);
  } else if (a.property == "uic") {
    v = check_uic_epne(spec, inst, strategy, a.budget);
  } else if (a.property == "dominant") {
    v = check_dominant(spec, inst, strategy, a.budget);
  } else if (a.property == "oca") {
    v = check_oca_proof(spec, inst, a.budget);
  } else {
    v = check_1559r_fpa_equivalence(inst, a.budget);
  }
  Json j = to_json(v);
  j["property"] = a.property;
  j["mechanism"] = to_json(spec);
  j["instance"] = inst.name;
  out << j.dump(2) << "\n";
  return !v.holds && a.expect_holds ? kExitCounterexample : kExitOk;
}

int do_attack(const AttackArgs& a, std::ostream& out) {
  UpdateRule rule = rule_from_json(Json{{"rule", a.rule}, {"learning_rate", a.learning_rate},
                                        {"r0", a.r_start}, {"min_base_fee", 0.0}});
  const double eth = attack_cost(rule, a.r_start, a.max_block, a.n);
  out << fixed(eth, 3) << " ETH\n";
  return kExitOk;
}

int do_demand(const DemandArgs& a, std::ostream& out) {
  const DemandCurve curve = a.curve.empty() ? DemandCurve{LinearDemand{a.intercept, a.slope}}
                                            : curve_from_json(Json::parse(a.curve));
  validate_curve(curve);
  Json j{{"demand", to_json(curve)}};
  if (a.price) {
    j["price"] = *a.price;
    j["quantity_gas"] = quantity(curve, *a.price);
    j["revenue_gwei"] = revenue(curve, *a.price);
  }
  if (a.supply) {
    j["supply_gas"] = *a.supply;
    j["market_clearing_price"] = market_clearing_price(curve, *a.supply);
  }
  if (a.monopoly) {
    const MonopolyPoint mp = monopoly_point(curve, a.max_block);
    j["monopoly"] = Json{{"pbar", mp.pbar}, {"p_star", mp.p_star}, {"q_star", mp.q_star},
                         {"revenue_gwei", revenue(curve, mp.p_star)}};
  }
  out << j.dump(2) << "\n";
  return kExitOk;
}

int do_suite(const SuiteArgs& a, std::ostream& out) {
  const auto battery = default_battery(a.seed, a.count);
  bool ok = true;
  for (const auto& r : run_theorem_battery(battery, a.jobs)) {
    ok = ok && r.passed;
    out << (r.passed ? "PASS " : "FAIL ") << r.name << " (" << r.instances << " instances)";
    if (!r.passed) out << " first failure: " << r.detail;
    out << "\n";
  }

  const Verdict vickrey = check_mmic(Vickrey{}, vickrey_example_instance());
  const bool vickrey_ok = !vickrey.holds && vickrey.witness &&
                          std::abs(vickrey.witness->deviation - 16.0) < 1e-9 &&
                          std::abs(vickrey.witness->baseline - 9.0) < 1e-9;
  ok = ok && vickrey_ok;
  out << (vickrey_ok ? "PASS " : "FAIL ") << "mmic fails for vickrey on bids 10, 8, 3";
  if (vickrey.witness) out << ": " << vickrey.witness->description;
  out << "\n";

  const Verdict two_slot = check_oca_proof(Tipless{0.0}, tipless_two_slot_instance());
  ok = ok && !two_slot.holds;
  out << (!two_slot.holds ? "PASS " : "FAIL ") << "oca-proof fails for tipless on the G=2 instance";
  if (two_slot.witness) out << ": " << two_slot.witness->description;
  out << "\n";
  return ok ? kExitOk : kExitCounterexample;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"feemech: transaction fee mechanism laboratory", "feemech"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run a trajectory scenario");
  simulate->add_option("--scenario", sim.scenario, "Scenario JSON file")->required();
  simulate->add_option("--out", sim.out, "Output file (default: stdout)");
  simulate->add_option("--format", sim.format)->check(CLI::IsMember({"csv", "json"}));
  simulate->add_option("--cycle", sim.cycle, "Report the oscillation cycle of at least this length (json)");

  CheckArgs chk;
  auto* check = app.add_subcommand("check", "Verify an incentive property on an instance");
  check->add_option("--property", chk.property)
      ->required()
      ->check(CLI::IsMember({"mmic", "costly", "uic", "dominant", "oca", "equiv1559r"}));
  check->add_option("--instance", chk.instance, "Instance JSON file")->required();
  check->add_option("--mechanism", chk.mechanism, "Mechanism name or JSON object");
  check->add_option("--strategy", chk.strategy, "User strategy name or JSON object");
  check->add_option("--gamma", chk.gamma, "Cost per fake gas for --property costly");
  check->add_option("--budget", chk.budget, "Maximum enumerated evaluations");
  check->add_option("--replay", chk.replay, "Re-evaluate the witness in this verdict file");
  check->add_flag("--expect-holds,!--no-expect-holds", chk.expect_holds,
                  "Exit 1 on a counterexample (default on)");

  AttackArgs atk;
  auto* attack = app.add_subcommand("attack-cost", "Cost of filling n consecutive blocks");
  attack->add_option("--rule", atk.rule)->check(CLI::IsMember({"linear1559", "exponential", "taylor2"}));
  attack->add_option("--learning-rate", atk.learning_rate);
  attack->add_option("--r-start", atk.r_start, "Starting base fee (gwei/gas)");
  attack->add_option("--max-block", atk.max_block, "Maximum block size (gas)");
  attack->add_option("--n", atk.n, "Number of full blocks")->required();

  DemandArgs dem;
  auto* demand = app.add_subcommand("demand", "Query a demand curve");
  demand->add_option("--intercept", dem.intercept, "Linear demand intercept (gas)");
  demand->add_option("--slope", dem.slope, "Linear demand slope (gas per gwei)");
  demand->add_option("--curve", dem.curve, "Demand curve JSON object");
  demand->add_option("--price", dem.price, "Quantity and revenue at this price");
  demand->add_option("--supply", dem.supply, "Market-clearing price for this supply");
  demand->add_option("--max-block", dem.max_block, "Maximum block size for --monopoly");
  demand->add_flag("--monopoly", dem.monopoly, "Monopoly price and quantity");

  SuiteArgs su;
  auto* suite = app.add_subcommand("suite", "Run the theorem battery");
  suite->add_option("--jobs", su.jobs, "Worker threads")->envname("FEEMECH_JOBS");
  suite->add_option("--seed", su.seed);
  suite->add_option("--count", su.count, "Battery size");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (*simulate) return do_simulate(sim, out);
    if (*check) return do_check(chk, out);
    if (*attack) return do_attack(atk, out);
    if (*demand) return do_demand(dem, out);
    if (*suite) return do_suite(su, out);
  } catch (const Error& e) {
    err << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
    return kExitConfig;
  } catch (const nlohmann::json::exception& e) {
    err << "error: ConfigError: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}

}  // namespace feemech
