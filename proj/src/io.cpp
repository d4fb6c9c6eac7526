// Copyright 2026 The feemech Authors.
// SPDX-License-Identifier: Apache-2.0

#include "feemech/io.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace feemech {
namespace {

[[noreturn]] void fail(const std::string& what) { throw Error(ErrorCode::config_error, what); }

// Reads the fields of one JSON object and rejects the ones nobody asked for.
class Fields {
 public:
  Fields(const Json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) fail(where_ + ": expected an object");
  }

  bool has(const char* key) const { return j_.contains(key); }

  const Json& raw(const char* key) {
    if (!j_.contains(key)) fail(where_ + ": missing field \"" + key + "\"");
    used_.insert(key);
    return j_.at(key);
  }

  template <class T>
  T req(const char* key) {
    const Json& v = raw(key);
    try {
      return v.get<T>();
    } catch (const nlohmann::json::exception&) {
      fail(where_ + ": field \"" + key + "\" has the wrong type");
    }
  }

  template <class T>
  T opt(const char* key, T fallback) {
    return has(key) ? req<T>(key) : fallback;
  }

  template <class T>
  std::optional<T> maybe(const char* key) {
    if (!has(key) || j_.at(key).is_null()) {
      if (has(key)) used_.insert(key);
      return std::nullopt;
    }
    return req<T>(key);
  }

  void done() const {
    for (const auto& [key, value] : j_.items()) {
      if (!used_.contains(key)) fail(where_ + ": unknown field \"" + key + "\"");
    }
  }

 private:
  const Json& j_;
  std::string where_;
  std::set<std::string> used_;
};

void check_version(Fields& f, const std::string& what) {
  const int v = f.req<int>("schema_version");
  if (v != kSchemaVersion) {
    fail(what + ": schema_version " + std::to_string(v) + " unsupported (expected " +
         std::to_string(kSchemaVersion) + ")");
  }
}

std::vector<Price> grid_from_json(const Json& j) {
  if (j.is_array()) {
    try {
      return j.get<std::vector<Price>>();
    } catch (const nlohmann::json::exception&) {
      fail("bid_grid: expected numbers");
    }
  }
  Fields f(j, "bid_grid");
  const auto from = f.req<Price>("from");
  const auto to = f.req<Price>("to");
  const auto step = f.req<Price>("step");
  f.done();
  if (!(step > 0) || !(to >= from)) fail("bid_grid: need step > 0 and to >= from");
  std::vector<Price> out;
  const auto n = static_cast<long long>(std::floor((to - from) / step + 1e-9));
  for (long long k = 0; k <= n; ++k) out.push_back(from + static_cast<double>(k) * step);
  return out;
}

}  // namespace

Json to_json(const EnvParams& env) {
  return Json{{"max_block_size", env.max_block_size},
              {"target_block_size", env.target_block_size},
              {"marginal_cost", env.marginal_cost},
              {"min_base_fee", env.min_base_fee}};
}

EnvParams env_from_json(const Json& j) {
  Fields f(j, "env");
  EnvParams env;
  env.max_block_size = f.opt<Gas>("max_block_size", env.max_block_size);
  env.target_block_size = f.opt<Gas>("target_block_size", env.max_block_size / 2);
  env.marginal_cost = f.opt<Price>("marginal_cost", env.marginal_cost);
  env.min_base_fee = f.opt<Price>("min_base_fee", env.min_base_fee);
  f.done();
  env.validate();
  return env;
}

Json to_json(const MechanismSpec& spec) {
  Json j{{"mechanism", mechanism_name(spec)}};
  if (const auto* t = std::get_if<Tipless>(&spec)) j["hardcoded_tip"] = t->hardcoded_tip;
  if (const auto* s = std::get_if<Smoothed>(&spec)) j["window"] = s->window;
  if (const auto* b = std::get_if<Blended>(&spec)) {
    j["lambda"] = b->burn_fraction;
    j["window"] = b->window;
  }
  if (const auto* b = std::get_if<Beos>(&spec)) {
    j["window"] = b->window;
    if (b->min_fee) j["min_fee"] = *b->min_fee;
    j["full_threshold_fraction"] = b->full_threshold_fraction;
  }
  return j;
}

MechanismSpec mechanism_from_json(const Json& j) {
  Fields f(j, "mechanism");
  const auto name = f.req<std::string>("mechanism");
  MechanismSpec spec;
  if (name == "fpa") {
    spec = FirstPrice{};
  } else if (name == "vickrey") {
    spec = Vickrey{};
  } else if (name == "fpa_burn") {
    spec = FeeBurningFpa{};
  } else if (name == "m1559") {
    spec = M1559{};
  } else if (name == "m1559r") {
    spec = M1559R{};
  } else if (name == "tipless") {
    spec = Tipless{f.opt<Price>("hardcoded_tip", 0.0)};
  } else if (name == "smoothed") {
    spec = Smoothed{f.opt<int>("window", 1)};
  } else if (name == "blended") {
    const double lambda = f.opt<double>("lambda", 1.0);
    spec = Blended{lambda, f.opt<int>("window", 1)};
  } else if (name == "beos") {
    Beos b;
    b.window = f.opt<int>("window", 1);
    b.min_fee = f.maybe<Price>("min_fee");
    b.full_threshold_fraction = f.opt<double>("full_threshold_fraction", 1.0);
    spec = b;
  } else {
    fail("unknown mechanism \"" + name + "\"");
  }
  f.done();
  validate_mechanism(spec);
  return spec;
}

MechanismSpec parse_mechanism(const std::string& text) {
  if (!text.empty() && text.front() == '{') {
    Json j;
    try {
      j = Json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      fail(std::string("mechanism: ") + e.what());
    }
    return mechanism_from_json(j);
  }
  return mechanism_from_json(Json{{"mechanism", text}});
}

Json to_json(const UpdateRule& rule) {
  static constexpr const char* kNames[] = {"linear1559", "exponential", "taylor2"};
  Json j{{"rule", kNames[static_cast<int>(rule.kind)]}, {"learning_rate", rule.learning_rate}};
  if (rule.window) j["window"] = *rule.window;
  j["r0"] = rule.r0;
  j["min_base_fee"] = rule.min_base_fee;
  return j;
}

UpdateRule rule_from_json(const Json& j, Price default_floor) {
  Fields f(j, "update_rule");
  UpdateRule rule;
  const auto name = f.req<std::string>("rule");
  if (name == "linear1559") {
    rule.kind = AdjustmentKind::linear;
  } else if (name == "exponential") {
    rule.kind = AdjustmentKind::exponential;
  } else if (name == "taylor2") {
    rule.kind = AdjustmentKind::taylor2;
  } else {
    fail("unknown update rule \"" + name + "\"");
  }
  rule.learning_rate = f.opt<double>("learning_rate", rule.learning_rate);
  rule.window = f.maybe<int>("window");
  rule.r0 = f.opt<Price>("r0", rule.r0);
  rule.min_base_fee = f.opt<Price>("min_base_fee", default_floor);
  f.done();
  rule.validate();
  return rule;
}

Json to_json(const DemandCurve& curve) {
  if (const auto* c = std::get_if<LinearDemand>(&curve)) {
    return Json{{"kind", "linear"},
                {"intercept_gas", c->intercept_gas},
                {"slope_gas_per_gwei", c->slope_gas_per_gwei}};
  }
  Json points = Json::array();
  for (const auto& p : std::get<EmpiricalDemand>(curve).points) points.push_back({p.price, p.gas});
  return Json{{"kind", "empirical"}, {"points", points}};
}

DemandCurve curve_from_json(const Json& j) {
  Fields f(j, "demand");
  const auto kind = f.req<std::string>("kind");
  DemandCurve curve;
  if (kind == "linear") {
    curve = LinearDemand{f.req<double>("intercept_gas"), f.req<double>("slope_gas_per_gwei")};
  } else if (kind == "empirical") {
    EmpiricalDemand e;
    for (const auto& p : f.raw("points")) {
      if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
        fail("demand points must be [price, gas] pairs");
      }
      e.points.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    curve = e;
  } else {
    fail("unknown demand kind \"" + kind + "\"");
  }
  f.done();
  validate_curve(curve);
  return curve;
}

Json to_json(const MinerStrategy& strategy) {
  Json j{{"miner", strategy_name(strategy)}};
  if (const auto* q = std::get_if<QuantitySetting>(&strategy)) j["q_gas"] = q->q;
  if (const auto* p = std::get_if<PriceSetting>(&strategy)) j["price"] = p->p;
  if (const auto* c = std::get_if<BaseFeeCrashThenMonopoly>(&strategy); c && c->monopoly_quantity) {
    j["q_gas"] = *c->monopoly_quantity;
  }
  if (const auto* p = std::get_if<FakePadding>(&strategy)) {
    j["pad_to"] = p->pad_to;
    j["pad_bid"] = p->pad_bid;
  }
  return j;
}

MinerStrategy miner_from_json(const Json& j) {
  Fields f(j, "miner");
  const auto name = f.req<std::string>("miner");
  MinerStrategy s;
  if (name == "honest_myopic") {
    s = HonestMyopic{};
  } else if (name == "quantity_setting") {
    s = QuantitySetting{f.req<Gas>("q_gas")};
  } else if (name == "price_setting") {
    s = PriceSetting{f.req<Price>("price")};
  } else if (name == "base_fee_crash_then_monopoly") {
    s = BaseFeeCrashThenMonopoly{f.maybe<Gas>("q_gas")};
  } else if (name == "fake_padding") {
    const Gas pad_to = f.req<Gas>("pad_to");
    s = FakePadding{pad_to, f.opt<Price>("pad_bid", 0.0)};
  } else {
    fail("unknown miner strategy \"" + name + "\"");
  }
  f.done();
  return s;
}

Json to_json(const UserStrategy& strategy) {
  Json j{{"user", strategy_name(strategy)}};
  if (const auto* t = std::get_if<Truthful1559>(&strategy); t && t->assumed_mu) {
    j["assumed_mu"] = *t->assumed_mu;
  }
  if (const auto* s = std::get_if<ShadedFpa>(&strategy)) j["factor"] = s->factor;
  if (const auto* e = std::get_if<EscalatorLinear>(&strategy)) {
    j["start_height"] = e->start_height;
    j["end_height"] = e->end_height;
    j["start_fraction"] = e->start_fraction;
    j["end_fraction"] = e->end_fraction;
  }
  if (const auto* u = std::get_if<UniformPriceFpa>(&strategy)) j["price"] = u->price;
  return j;
}

UserStrategy user_from_json(const Json& j) {
  Fields f(j, "user");
  const auto name = f.req<std::string>("user");
  UserStrategy s;
  if (name == "truthful_1559") {
    s = Truthful1559{f.maybe<Price>("assumed_mu")};
  } else if (name == "truthful_tipless") {
    s = TruthfulTipless{};
  } else if (name == "shaded_fpa") {
    const double factor = f.req<double>("factor");
    if (!(factor > 0.0 && factor <= 1.0)) fail("shaded_fpa factor must be in (0,1]");
    s = ShadedFpa{factor};
  } else if (name == "escalator_linear") {
    EscalatorLinear e;
    e.start_height = f.req<std::int64_t>("start_height");
    e.end_height = f.req<std::int64_t>("end_height");
    e.start_fraction = f.req<double>("start_fraction");
    e.end_fraction = f.req<double>("end_fraction");
    if (e.end_height < e.start_height) fail("escalator end_height before start_height");
    s = e;
  } else if (name == "uniform_price_fpa") {
    s = UniformPriceFpa{f.req<Price>("price")};
  } else {
    fail("unknown user strategy \"" + name + "\"");
  }
  f.done();
  return s;
}

Json to_json(const BidParams& bid) {
  Json j{{"kind", bid_kind(bid)}};
  if (const auto* b = std::get_if<FpaBid>(&bid)) j["gas_price"] = b->gas_price;
  if (const auto* b = std::get_if<FeeCapTipBid>(&bid)) {
    j["fee_cap"] = b->fee_cap;
    j["tip"] = b->tip;
  }
  if (const auto* b = std::get_if<CapOnlyBid>(&bid)) j["fee_cap"] = b->fee_cap;
  if (const auto* b = std::get_if<EscalatorBid>(&bid)) {
    j["start_height"] = b->start_height;
    j["start_bid"] = b->start_bid;
    j["end_height"] = b->end_height;
    j["end_bid"] = b->end_bid;
  }
  return j;
}

BidParams bid_from_json(const Json& j) {
  Fields f(j, "bid");
  const auto kind = f.req<std::string>("kind");
  BidParams bid;
  if (kind == "fpa") {
    bid = FpaBid{f.req<Price>("gas_price")};
  } else if (kind == "fee_cap_tip") {
    const Price cap = f.req<Price>("fee_cap");
    bid = FeeCapTipBid{cap, f.req<Price>("tip")};
  } else if (kind == "cap_only") {
    bid = CapOnlyBid{f.req<Price>("fee_cap")};
  } else if (kind == "escalator") {
    EscalatorBid e;
    e.start_height = f.req<std::int64_t>("start_height");
    e.start_bid = f.req<Price>("start_bid");
    e.end_height = f.req<std::int64_t>("end_height");
    e.end_bid = f.req<Price>("end_bid");
    bid = e;
  } else {
    fail("unknown bid kind \"" + kind + "\"");
  }
  f.done();
  validate_bid(bid);
  return bid;
}

Json to_json(const Transaction& tx) {
  Json j{{"id", tx.id}, {"gas_limit", tx.gas_limit}, {"value", tx.value}, {"bid", to_json(tx.bid)}};
  if (tx.is_fake) j["is_fake"] = true;
  return j;
}

Transaction tx_from_json(const Json& j) {
  Fields f(j, "transaction");
  Transaction tx;
  tx.id = f.req<std::string>("id");
  tx.gas_limit = f.opt<Gas>("gas_limit", 1);
  tx.value = f.opt<Price>("value", 0.0);
  if (f.has("bid")) tx.bid = bid_from_json(f.raw("bid"));
  tx.is_fake = f.opt<bool>("is_fake", false);
  f.done();
  if (tx.gas_limit <= 0) fail("transaction " + tx.id + ": gas_limit must be > 0");
  return tx;
}

Json to_json(const Block& block) {
  Json txs = Json::array();
  for (const auto& tx : block.txs) txs.push_back(to_json(tx));
  return Json{{"height", block.height},
              {"base_fee", block.base_fee},
              {"gas_used", block.gas_used},
              {"txs", txs}};
}

Block block_from_json(const Json& j) {
  Fields f(j, "block");
  Block b;
  b.height = f.req<std::int64_t>("height");
  b.base_fee = f.req<Price>("base_fee");
  for (const auto& tx : f.raw("txs")) b.txs.push_back(tx_from_json(tx));
  b.gas_used = f.opt<Gas>("gas_used", block_gas(b));
  f.done();
  return b;
}

Json to_json(const Scenario& s) {
  Json periods = Json::array();
  for (const auto& p : s.periods) {
    periods.push_back(Json{{"demand", to_json(p.demand)}, {"miner", to_json(p.miner)}, {"user", to_json(p.user)}});
  }
  Json mode{{"mode", "fluid"}};
  if (const auto* d = std::get_if<DiscreteMode>(&s.mode)) {
    mode = Json{{"mode", "discrete"}, {"seed", d->seed}, {"tx_gas", d->tx_gas}, {"price_step", d->price_step}};
  }
  return Json{{"schema_version", kSchemaVersion},
              {"env", to_json(s.env)},
              {"mechanism", to_json(s.mechanism)},
              {"update_rule", to_json(s.update_rule)},
              {"periods", periods},
              {"blocks_per_period", s.blocks_per_period},
              {"mode", mode}};
}

Scenario scenario_from_json(const Json& j) {
  Fields f(j, "scenario");
  check_version(f, "scenario");
  Scenario s;
  if (f.has("env")) s.env = env_from_json(f.raw("env"));
  s.mechanism = f.has("mechanism") ? mechanism_from_json(f.raw("mechanism")) : MechanismSpec{M1559{}};
  s.update_rule = rule_from_json(f.raw("update_rule"), s.env.min_base_fee);
  for (const auto& pj : f.raw("periods")) {
    Fields pf(pj, "period");
    Period p;
    p.demand = curve_from_json(pf.raw("demand"));
    if (pf.has("miner")) p.miner = miner_from_json(pf.raw("miner"));
    if (pf.has("user")) p.user = user_from_json(pf.raw("user"));
    const int repeat = pf.opt<int>("repeat", 1);
    pf.done();
    if (repeat < 1) fail("period repeat must be >= 1");
    for (int k = 0; k < repeat; ++k) s.periods.push_back(p);
  }
  s.blocks_per_period = f.opt<int>("blocks_per_period", 1);
  if (f.has("mode")) {
    Fields mf(f.raw("mode"), "mode");
    const auto name = mf.req<std::string>("mode");
    if (name == "fluid") {
      s.mode = FluidMode{};
    } else if (name == "discrete") {
      DiscreteMode d;
      d.seed = mf.opt<std::uint64_t>("seed", d.seed);
      d.tx_gas = mf.opt<Gas>("tx_gas", d.tx_gas);
      d.price_step = mf.opt<Price>("price_step", d.price_step);
      s.mode = d;
    } else {
      fail("unknown mode \"" + name + "\"");
    }
    mf.done();
  }
  f.done();
  s.validate();
  return s;
}

Json to_json(const Instance& inst) {
  Json txs = Json::array();
  for (const auto& tx : inst.mempool.txs) txs.push_back(to_json(tx));
  return Json{{"schema_version", kSchemaVersion},
              {"name", inst.name},
              {"env", to_json(inst.chain.env)},
              {"update_rule", to_json(inst.chain.rule)},
              {"txs", txs},
              {"bid_grid", inst.bid_grid},
              {"gas_grid", inst.gas_grid},
              {"max_fakes", inst.max_fakes}};
}

Instance instance_from_json(const Json& j, const std::optional<MechanismSpec>& spec) {
  Fields f(j, "instance");
  check_version(f, "instance");
  Instance inst;
  inst.name = f.opt<std::string>("name", "");
  EnvParams env;
  if (f.has("env")) env = env_from_json(f.raw("env"));
  UpdateRule rule;
  rule.min_base_fee = 0.0;
  if (f.has("update_rule")) rule = rule_from_json(f.raw("update_rule"), 0.0);
  if (f.has("base_fee")) rule.r0 = f.req<Price>("base_fee");
  inst.chain = ChainState{{}, env, rule};
  for (const auto& tj : f.raw("txs")) {
    Transaction tx = tx_from_json(tj);
    if (!tj.contains("bid")) tx.bid = spec ? truthful_bid(*spec, tx.value, env.marginal_cost) : BidParams{FpaBid{tx.value}};
    inst.mempool.txs.push_back(std::move(tx));
  }
  inst.bid_grid = grid_from_json(f.raw("bid_grid"));
  inst.gas_grid = f.opt<std::vector<Gas>>("gas_grid", {1});
  inst.max_fakes = f.opt<int>("max_fakes", 1);
  f.done();
  inst.validate();
  return inst;
}

Json to_json(const Witness& w) {
  Json j{{"kind", to_string(w.kind)}, {"description", w.description}};
  switch (w.kind) {
    case WitnessKind::miner_deviation:
    case WitnessKind::outcome_mismatch: j["block"] = to_json(w.block); break;
    case WitnessKind::costly_violation:
      j["block"] = to_json(w.block);
      j["gamma"] = w.gamma;
      break;
    case WitnessKind::user_deviation: {
      j["tx_id"] = w.tx_id;
      if (w.strategy_bid) j["strategy_bid"] = to_json(*w.strategy_bid);
      if (w.deviating_bid) j["deviating_bid"] = to_json(*w.deviating_bid);
      Json others = Json::array();
      for (const auto& tx : w.others) others.push_back(to_json(tx));
      j["others"] = others;
      break;
    }
    case WitnessKind::oca:
      j["block"] = to_json(w.block);
      if (w.onchain_block) j["onchain_block"] = to_json(*w.onchain_block);
      break;
  }
  j["baseline"] = w.baseline;
  j["deviation"] = w.deviation;
  j["delta"] = w.delta;
  return j;
}

Witness witness_from_json(const Json& j) {
  Fields f(j, "witness");
  Witness w;
  const auto kind = f.req<std::string>("kind");
  bool known = false;
  for (auto k : {WitnessKind::miner_deviation, WitnessKind::costly_violation,
                 WitnessKind::user_deviation, WitnessKind::oca, WitnessKind::outcome_mismatch}) {
    if (kind == to_string(k)) {
      w.kind = k;
      known = true;
    }
  }
  if (!known) fail("unknown witness kind \"" + kind + "\"");
  w.description = f.opt<std::string>("description", "");
  if (f.has("block")) w.block = block_from_json(f.raw("block"));
  w.gamma = f.opt<double>("gamma", 0.0);
  w.tx_id = f.opt<std::string>("tx_id", "");
  if (f.has("strategy_bid")) w.strategy_bid = bid_from_json(f.raw("strategy_bid"));
  if (f.has("deviating_bid")) w.deviating_bid = bid_from_json(f.raw("deviating_bid"));
  if (f.has("others")) {
    for (const auto& tx : f.raw("others")) w.others.push_back(tx_from_json(tx));
  }
  if (f.has("onchain_block")) w.onchain_block = block_from_json(f.raw("onchain_block"));
  w.baseline = f.opt<double>("baseline", 0.0);
  w.deviation = f.opt<double>("deviation", 0.0);
  w.delta = f.opt<double>("delta", 0.0);
  f.done();
  return w;
}

Json to_json(const Verdict& v) {
  Json j{{"schema_version", kSchemaVersion}, {"holds", v.holds}, {"evaluations", v.evaluations}};
  if (v.witness) j["witness"] = to_json(*v.witness);
  return j;
}

Json to_json(const TrajectoryReport& report) {
  Json rows = Json::array();
  for (const auto& r : report.rows) {
    rows.push_back(Json{{"height", r.height},
                        {"base_fee_gwei", r.base_fee},
                        {"block_gas", r.block_gas},
                        {"burned_gwei", r.burned},
                        {"miner_revenue_gwei", r.miner_revenue},
                        {"forwarded_gwei", r.forwarded},
                        {"mc_price_gwei", r.mc_price},
                        {"excessively_low", r.excessively_low}});
  }
  return Json{{"schema_version", kSchemaVersion}, {"rows", rows}};
}

TrajectoryReport report_from_json(const Json& j) {
  Fields f(j, "report");
  check_version(f, "report");
  TrajectoryReport report;
  for (const auto& rj : f.raw("rows")) {
    Fields rf(rj, "row");
    TrajectoryRow r;
    r.height = rf.req<std::int64_t>("height");
    r.base_fee = rf.req<Price>("base_fee_gwei");
    r.block_gas = rf.req<Gas>("block_gas");
    r.burned = rf.req<Gwei>("burned_gwei");
    r.miner_revenue = rf.req<Gwei>("miner_revenue_gwei");
    r.forwarded = rf.req<Gwei>("forwarded_gwei");
    r.mc_price = rf.req<Price>("mc_price_gwei");
    r.excessively_low = rf.req<bool>("excessively_low");
    rf.done();
    Block b;
    b.height = r.height;
    b.base_fee = r.base_fee;
    b.gas_used = r.block_gas;
    report.blocks.push_back(b);
    report.rows.push_back(r);
  }
  f.done();
  return report;
}

Json to_json(const Cycle& cycle) {
  return Json{{"length", cycle.length},
              {"start_height", cycle.start_height},
              {"base_fees", cycle.base_fees},
              {"block_gas", cycle.block_gas}};
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot read " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return Json::parse(buffer.str());
  } catch (const nlohmann::json::exception& e) {
    fail(path + ": " + e.what());
  }
}

}  // namespace feemech
