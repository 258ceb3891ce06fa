// Copyright 2026 The mmsched Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mmsched/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace mmsched {
namespace {

std::string where(const std::string& origin, const YAML::Mark& mark) {
  if (mark.is_null()) return origin;
  return origin + ":" + std::to_string(mark.line + 1) + ":" +
         std::to_string(mark.column + 1);
}

// Strict reader for one mapping: unknown keys are errors.
class Section {
 public:
  Section(YAML::Node node, std::string name, const std::string& origin)
      : node_(std::move(node)), name_(std::move(name)), origin_(origin) {
    if (node_ && !node_.IsNull() && !node_.IsMap()) {
      fail(node_, "expected a mapping");
    }
  }

  template <typename T>
  void read(const std::string& key, T& out) {
    seen_.insert(key);
    if (!node_ || node_.IsNull()) return;
    const YAML::Node v = node_[key];
    if (!v) return;
    try {
      out = v.as<T>();
    } catch (const YAML::Exception&) {
      fail(v, "invalid value for '" + key + "'");
    }
  }

  template <typename T>
  void read_optional(const std::string& key, std::optional<T>& out) {
    seen_.insert(key);
    if (!node_ || node_.IsNull()) return;
    const YAML::Node v = node_[key];
    if (!v || v.IsNull()) return;
    try {
      out = v.as<T>();
    } catch (const YAML::Exception&) {
      fail(v, "invalid value for '" + key + "'");
    }
  }

  YAML::Node child(const std::string& key) {
    seen_.insert(key);
    if (!node_ || node_.IsNull()) return YAML::Node();
    return node_[key];
  }

  void finish() const {
    if (!node_ || node_.IsNull()) return;
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!seen_.count(key)) {
        fail(kv.first, "unknown key '" + key + "'" +
                           (name_.empty() ? "" : " in '" + name_ + "'"));
      }
    }
  }

  [[noreturn]] void fail(const YAML::Node& at, const std::string& msg) const {
    throw ConfigError(where(origin_, at.Mark()) + ": " + msg);
  }

 private:
  YAML::Node node_;
  std::string name_;
  const std::string& origin_;
  std::set<std::string> seen_;
};

std::vector<TrafficType> read_traffic(const YAML::Node& node,
                                      const std::string& origin) {
  if (!node.IsSequence()) {
    throw ConfigError(where(origin, node.Mark()) +
                      ": traffic_types must be a list");
  }
  std::vector<TrafficType> out;
  for (const auto& item : node) {
    Section s(item, "traffic_types", origin);
    TrafficType t;
    std::optional<double> gbr_mbps;
    s.read("name", t.name);
    s.read("packet_bytes", t.packet_bytes);
    s.read("mean_arrival_ms", t.mean_arrival_ms);
    s.read("latency_ms", t.latency_ms);
    s.read_optional("gbr_mbps", gbr_mbps);
    s.read("error_rate", t.error_rate);
    s.finish();
    if (gbr_mbps) t.gbr_bps = *gbr_mbps * 1e6;
    try {
      t.validate();
    } catch (const ConfigError& e) {
      s.fail(item, e.what());
    }
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace

std::vector<double> scenario_ratios(const std::string& name) {
  if (name == "S1") return {1, 1, 1, 1, 1, 1};
  if (name == "S2") return {1, 1, 1, 2, 1, 1};
  if (name == "S3") return {1, 1, 1, 1, 1, 2};
  if (name == "S4") return {3, 3, 3, 1, 1, 1};
  if (name == "S5") return {1, 1, 2, 2, 1, 1};
  if (name == "S6") return {1, 1, 1, 2, 1, 2};
  throw ConfigError("unknown scenario '" + name + "' (expected S1..S6)");
}

std::vector<std::string> scenario_names() {
  return {"S1", "S2", "S3", "S4", "S5", "S6"};
}

std::string to_string(SweepAxis axis) {
  return axis == SweepAxis::kAntennas ? "antennas" : "ues";
}

std::string to_string(BlockMode mode) {
  return mode == BlockMode::kPerType ? "per_type" : "scenario";
}

void ScenarioConfig::validate() const {
  env.validate();
  ddpg.validate();
  if (training.plateau_epochs == 0) {
    throw ConfigError("plateau_epochs must be positive");
  }
  if (!(training.plateau_tolerance >= 0.0)) {
    throw ConfigError("plateau_tolerance must be non-negative");
  }
  if (training.blocks_per_type == 0) {
    throw ConfigError("blocks_per_type must be positive");
  }
  if (training.block_horizon_ttis < 0) {
    throw ConfigError("block_horizon_ttis must be non-negative");
  }
  if (evaluation.seeds.empty()) throw ConfigError("no evaluation seeds");
  for (const auto& s : evaluation.scenarios) scenario_ratios(s);
  if (sweep.values.empty()) throw ConfigError("sweep needs at least one value");
  for (std::size_t i = 0; i < sweep.values.size(); ++i) {
    if (!(sweep.values[i] >= 1.0)) throw ConfigError("sweep values must be >= 1");
    if (i > 0 && !(sweep.values[i] > sweep.values[i - 1])) {
      throw ConfigError("sweep values must be strictly ascending");
    }
  }
  if (workers == 0) throw ConfigError("workers must be positive");
}

ScenarioConfig default_config() {
  ScenarioConfig c;
  c.ddpg.actor_hidden = {64, 64};
  c.ddpg.critic_hidden = {64, 64};
  c.ddpg.batch_size = 128;
  c.ddpg.buffer_capacity = 50000;
  c.env.channel.extra_loss_db = 20.0;
  return c;
}

ScenarioConfig parse_config(const std::string& text, const std::string& origin) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(where(origin, e.mark) + ": " + e.msg);
  }
  ScenarioConfig c = default_config();
  Section top(root, "", origin);

  std::optional<std::vector<double>> ratios;
  top.read("scenario", c.scenario);
  top.read_optional("ratios", ratios);
  top.read("policy", c.policy);
  top.read("workers", c.workers);
  if (ratios) {
    c.env.type_ratios = *ratios;
    if (!root["scenario"]) c.scenario = "custom";
  } else {
    try {
      c.env.type_ratios = scenario_ratios(c.scenario);
    } catch (const ConfigError& e) {
      top.fail(root["scenario"], e.what());
    }
  }

  if (YAML::Node t = top.child("traffic_types"); t && !t.IsNull()) {
    c.env.traffic_types = read_traffic(t, origin);
  }

  {
    Section s(top.child("system"), "system", origin);
    auto& e = c.env;
    double tti_ms = e.tti_seconds * 1e3;
    double bandwidth_mhz = e.bandwidth_hz / 1e6;
    s.read("antennas", e.antennas);
    s.read("total_ues", e.total_ues);
    s.read("avg_concurrent_ues", e.avg_concurrent_ues);
    s.read("horizon_ttis", e.horizon_ttis);
    s.read("tti_ms", tti_ms);
    s.read("bandwidth_mhz", bandwidth_mhz);
    s.read("tx_power_dbm", e.tx_power_dbm);
    s.read_optional("tx_power_watts", e.tx_power_watts);
    s.read("cell_radius_m", e.cell_radius_m);
    s.read("short_term_window_ttis", e.short_term_window);
    s.finish();
    e.tti_seconds = tti_ms * 1e-3;
    e.bandwidth_hz = bandwidth_mhz * 1e6;
  }
  {
    Section s(top.child("channel"), "channel", origin);
    auto& ch = c.env.channel;
    double carrier_ghz = ch.carrier_hz / 1e9;
    s.read("carrier_ghz", carrier_ghz);
    s.read("pathloss_exponent", ch.pathloss_exponent);
    s.read("fading_correlation", ch.fading_correlation);
    s.read("noise_figure_db", ch.noise_figure_db);
    s.read("extra_loss_db", ch.extra_loss_db);
    s.read("min_distance_m", ch.min_distance_m);
    s.finish();
    ch.carrier_hz = carrier_ghz * 1e9;
  }
  {
    Section s(top.child("precoder"), "precoder", origin);
    auto& p = c.env.search;
    s.read("candidates", p.n_candidates);
    s.read("elites", p.n_elites);
    s.read("iterations", p.n_iterations);
    s.read("smoothing", p.smoothing);
    s.finish();
  }
  {
    Section s(top.child("scheduler"), "scheduler", origin);
    auto& p = c.env.scheduler;
    s.read("pf_beta", p.pf_beta);
    s.read("pf_history_floor_bps", p.pf_history_floor_bps);
    s.read("lwdf_top_fraction", p.lwdf_top_fraction);
    s.finish();
  }
  {
    Section s(top.child("reward"), "reward", origin);
    s.read("alpha", c.env.reward.alpha);
    s.read("clamp", c.env.reward.clamp_pace);
    s.finish();
  }
  {
    Section s(top.child("state"), "state", origin);
    auto& p = c.env.state;
    s.read("slots", p.slots);
    s.read("deadline_clip_ttis", p.deadline_clip_ttis);
    s.read("backlog_scale_bytes", p.backlog_scale_bytes);
    s.read("antenna_scale", p.antenna_scale);
    s.finish();
  }
  {
    Section s(top.child("ddpg"), "ddpg", origin);
    auto& d = c.ddpg;
    s.read("actor_hidden", d.actor_hidden);
    s.read("critic_hidden", d.critic_hidden);
    s.read("actor_lr", d.actor_lr);
    s.read("critic_lr", d.critic_lr);
    s.read("gamma", d.gamma);
    s.read("tau", d.tau);
    s.read("dropout", d.dropout);
    s.read("explore_sigma", d.explore_sigma);
    s.read("ou_noise", d.ou_noise);
    s.read("ou_theta", d.ou_theta);
    s.read("buffer_capacity", d.buffer_capacity);
    s.read("batch_size", d.batch_size);
    s.read("updates_per_step", d.updates_per_step);
    s.read("random_steps", d.random_steps);
    s.read("discrete_replay", d.discrete_replay);
    s.read("divergence_threshold", d.divergence_threshold);
    s.finish();
  }
  {
    Section s(top.child("training"), "training", origin);
    auto& t = c.training;
    std::string blocks = to_string(t.blocks);
    s.read("seed", t.seed);
    s.read("max_epochs", t.max_epochs);
    s.read("blocks_per_type", t.blocks_per_type);
    s.read("plateau_epochs", t.plateau_epochs);
    s.read("plateau_tolerance", t.plateau_tolerance);
    s.read("block_horizon_ttis", t.block_horizon_ttis);
    s.read("blocks", blocks);
    s.finish();
    if (blocks == "per_type") {
      t.blocks = BlockMode::kPerType;
    } else if (blocks == "scenario") {
      t.blocks = BlockMode::kScenario;
    } else {
      s.fail(root["training"]["blocks"],
             "blocks must be 'per_type' or 'scenario'");
    }
  }
  {
    Section s(top.child("evaluation"), "evaluation", origin);
    auto& e = c.evaluation;
    std::optional<std::size_t> seed_count;
    s.read("seeds", e.seeds);
    s.read_optional("seed_count", seed_count);
    s.read("policies", e.policies);
    s.read("scenarios", e.scenarios);
    s.finish();
    if (seed_count) {
      e.seeds.resize(*seed_count);
      for (std::size_t i = 0; i < *seed_count; ++i) e.seeds[i] = i;
    }
  }
  {
    Section s(top.child("sweep"), "sweep", origin);
    auto& w = c.sweep;
    std::string axis = to_string(w.axis);
    s.read("axis", axis);
    s.read("values", w.values);
    s.read("policies", w.policies);
    s.finish();
    if (axis == "antennas") {
      w.axis = SweepAxis::kAntennas;
    } else if (axis == "ues") {
      w.axis = SweepAxis::kUes;
    } else {
      s.fail(root["sweep"]["axis"], "axis must be 'antennas' or 'ues'");
    }
  }
  top.finish();

  try {
    c.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  ScenarioConfig c = parse_config(ss.str(), path.string());
  c.base_dir = path.parent_path();
  return c;
}

nlohmann::json to_json(const ScenarioConfig& c) {
  using nlohmann::json;
  const auto& e = c.env;
  json types = json::array();
  for (const auto& t : e.traffic_types) {
    types.push_back({{"name", t.name},
                     {"packet_bytes", t.packet_bytes},
                     {"mean_arrival_ms", t.mean_arrival_ms},
                     {"latency_ms", t.latency_ms},
                     {"gbr_bps", t.gbr_bps ? json(*t.gbr_bps) : json(nullptr)},
                     {"error_rate", t.error_rate}});
  }
  json j;
  j["scenario"] = c.scenario;
  j["ratios"] = e.type_ratios;
  j["traffic_types"] = std::move(types);
  j["system"] = {{"antennas", e.antennas},
                 {"total_ues", e.total_ues},
                 {"avg_concurrent_ues", e.avg_concurrent_ues},
                 {"horizon_ttis", e.horizon_ttis},
                 {"tti_seconds", e.tti_seconds},
                 {"bandwidth_hz", e.bandwidth_hz},
                 {"tx_power_watts", e.rho_watts()},
                 {"cell_radius_m", e.cell_radius_m},
                 {"short_term_window_ttis", e.short_term_window}};
  j["channel"] = {{"carrier_hz", e.channel.carrier_hz},
                  {"pathloss_exponent", e.channel.pathloss_exponent},
                  {"fading_correlation", e.channel.fading_correlation},
                  {"noise_figure_db", e.channel.noise_figure_db},
                  {"extra_loss_db", e.channel.extra_loss_db},
                  {"min_distance_m", e.channel.min_distance_m}};
  j["precoder"] = {{"candidates", e.search.n_candidates},
                   {"elites", e.search.n_elites},
                   {"iterations", e.search.n_iterations},
                   {"smoothing", e.search.smoothing}};
  j["scheduler"] = {{"pf_beta", e.scheduler.pf_beta},
                    {"pf_history_floor_bps", e.scheduler.pf_history_floor_bps},
                    {"lwdf_top_fraction", e.scheduler.lwdf_top_fraction}};
  j["reward"] = {{"alpha", e.reward.alpha}, {"clamp", e.reward.clamp_pace}};
  j["state"] = {{"slots", e.state.slots},
                {"deadline_clip_ttis", e.state.deadline_clip_ttis},
                {"backlog_scale_bytes", e.state.backlog_scale_bytes},
                {"antenna_scale", e.state.antenna_scale}};
  const auto& d = c.ddpg;
  j["ddpg"] = {{"actor_hidden", d.actor_hidden},
               {"critic_hidden", d.critic_hidden},
               {"actor_lr", d.actor_lr},
               {"critic_lr", d.critic_lr},
               {"gamma", d.gamma},
               {"tau", d.tau},
               {"dropout", d.dropout},
               {"explore_sigma", d.explore_sigma},
               {"ou_noise", d.ou_noise},
               {"ou_theta", d.ou_theta},
               {"buffer_capacity", d.buffer_capacity},
               {"batch_size", d.batch_size},
               {"updates_per_step", d.updates_per_step},
               {"random_steps", d.random_steps},
               {"discrete_replay", d.discrete_replay},
               {"divergence_threshold", d.divergence_threshold}};
  const auto& t = c.training;
  j["training"] = {{"seed", t.seed},
                   {"max_epochs", t.max_epochs},
                   {"blocks_per_type", t.blocks_per_type},
                   {"plateau_epochs", t.plateau_epochs},
                   {"plateau_tolerance", t.plateau_tolerance},
                   {"block_horizon_ttis", t.block_horizon_ttis},
                   {"blocks", to_string(t.blocks)}};
  j["evaluation"] = {{"seeds", c.evaluation.seeds},
                     {"policies", c.evaluation.policies},
                     {"scenarios", c.evaluation.scenarios}};
  j["sweep"] = {{"axis", to_string(c.sweep.axis)},
                {"values", c.sweep.values},
                {"policies", c.sweep.policies}};
  j["policy"] = c.policy;
  return j;
}

std::string config_hash(const ScenarioConfig& config) {
  const std::string text = to_json(config).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace mmsched
