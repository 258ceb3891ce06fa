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

#include "mmsched/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "mmsched/svg.hpp"

namespace mmsched {
namespace fs = std::filesystem;
namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string seed_list(const std::vector<std::uint64_t>& seeds) {
  std::string s;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    if (i) s += ' ';
    s += std::to_string(seeds[i]);
  }
  return s;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string provenance(const std::string& hash,
                       const std::vector<std::uint64_t>& seeds) {
  return "# config_hash: " + hash + "\n# seeds: " + seed_list(seeds) + "\n";
}

void write_figure(const fs::path& dir, const std::string& stem,
                  const Figure& figure, const std::string& hash,
                  const std::vector<std::uint64_t>& seeds) {
  write_text(dir / (stem + ".csv"),
             figure_csv(figure, {"config_hash: " + hash,
                                 "seeds: " + seed_list(seeds)}));
  write_text(dir / (stem + ".svg"), render_svg(figure));
}

std::string unknown_policy_message(const std::string& spec) {
  std::string msg = "unknown policy '" + spec +
                    "'; expected a checkpoint path, a baseline (";
  const auto bases = baseline_names();
  for (std::size_t i = 0; i < bases.size(); ++i) {
    msg += (i ? ", " : "") + bases[i];
  }
  msg += ") or one of the triples: ";
  const auto names = all_action_names();
  for (std::size_t i = 0; i < names.size(); ++i) {
    msg += (i ? ", " : "") + names[i];
  }
  return msg;
}

std::vector<std::uint64_t> training_seeds(const ScenarioConfig& c) {
  return {c.training.seed};
}

}  // namespace

const std::vector<std::string>& benchmark_triples() {
  static const std::vector<std::string> names = {
      "CQI-MinG75-AS", "Delay-MinG75-ACE", "Remain-MinG50-ACE", "CQI-PF50-ACE",
      "FIFO-MinG75-AS"};
  return names;
}

std::string file_stem(const std::string& name) {
  std::string s;
  for (char c : name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '-' || c == '_' || c == '.';
    s += ok ? c : '_';
  }
  return s;
}

std::unique_ptr<Policy> ResolvedPolicy::make() const {
  if (triple) return std::make_unique<StaticPolicy>(*triple);
  if (baseline) return std::make_unique<BaselinePolicy>(*baseline);
  if (agent) return std::make_unique<AgentPolicy>(*agent, name);
  throw std::logic_error("empty policy");
}

ResolvedPolicy learned_policy(std::shared_ptr<const DdpgAgent> agent,
                              std::string name) {
  ResolvedPolicy p;
  p.name = std::move(name);
  p.agent = std::move(agent);
  return p;
}

ResolvedPolicy resolve_policy(const std::string& spec,
                              const ScenarioConfig& config) {
  ResolvedPolicy p;
  if (auto t = parse_action(spec)) {
    p.name = action_name(*t);
    p.triple = t;
    return p;
  }
  if (auto b = parse_baseline(spec)) {
    p.name = spec;
    p.baseline = b;
    return p;
  }
  std::vector<fs::path> candidates = {fs::path(spec)};
  if (!config.base_dir.empty() && fs::path(spec).is_relative()) {
    candidates.push_back(config.base_dir / spec);
  }
  for (const auto& c : candidates) {
    if (fs::is_regular_file(c)) {
      return learned_policy(load_checkpoint(c, config),
                            "learned:" + c.stem().string());
    }
  }
  throw ConfigError(unknown_policy_message(spec));
}

nlohmann::json checkpoint_json(const DdpgAgent& agent,
                               const ScenarioConfig& config,
                               const BufferStats& buffer) {
  nlohmann::json j;
  j["version"] = kCheckpointVersion;
  j["config_hash"] = config_hash(config);
  j["seeds"] = training_seeds(config);
  j["layer_sizes"] = {{"actor", agent.actor().sizes()},
                      {"critic", agent.critic().sizes()}};
  j["agent"] = agent.to_json();
  j["buffer"] = {{"size", buffer.size},
                 {"capacity", buffer.capacity},
                 {"pushed", buffer.pushed},
                 {"reward_mean", buffer.reward_mean},
                 {"reward_std", buffer.reward_std}};
  return j;
}

std::shared_ptr<DdpgAgent> load_checkpoint(const fs::path& path,
                                           const ScenarioConfig& config) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text(path));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("checkpoint '" + path.string() + "': " + e.what());
  }
  try {
    if (j.at("version").get<int>() != kCheckpointVersion) {
      throw ConfigError("checkpoint '" + path.string() +
                        "' has an unsupported version");
    }
    TrainConfig tc = config.ddpg;
    auto hidden = [](std::vector<int> sizes) {
      return std::vector<int>(sizes.begin() + 1, sizes.end() - 1);
    };
    tc.actor_hidden = hidden(j.at("layer_sizes").at("actor"));
    tc.critic_hidden = hidden(j.at("layer_sizes").at("critic"));
    auto agent = std::make_shared<DdpgAgent>(
        DdpgAgent::from_json(j.at("agent"), tc));
    const std::size_t want = Environment(config.env, 0, {}).state_dim();
    if (agent->state_dim() != want) {
      throw ConfigError("checkpoint '" + path.string() + "' expects state size " +
                        std::to_string(agent->state_dim()) + ", config gives " +
                        std::to_string(want));
    }
    return agent;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("checkpoint '" + path.string() + "': " + e.what());
  }
}

void parallel_for(std::size_t n, std::size_t workers,
                  const std::function<void(std::size_t)>& f) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          f(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

EnvConfig scenario_env(const ScenarioConfig& config,
                       const std::vector<double>& ratios) {
  EnvConfig env = config.env;
  env.type_ratios = ratios;
  return env;
}

RunReport evaluate(const ScenarioConfig& config, const ResolvedPolicy& policy,
                   const std::string& scenario, const EnvConfig& env,
                   const EvalOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const auto& seeds = config.evaluation.seeds;
  std::vector<EpisodeMetrics> results(seeds.size());
  parallel_for(seeds.size(), options.workers, [&](std::size_t i) {
    Environment world(env, seeds[i]);
    std::ofstream trace;
    if (!options.trace_dir.empty()) {
      fs::create_directories(options.trace_dir);
      trace.open(options.trace_dir /
                 ("trace_" + file_stem(policy.name) + "_" +
                  file_stem(scenario) + "_seed" + std::to_string(seeds[i]) +
                  ".jsonl"),
                 std::ios::binary | std::ios::trunc);
      world.set_trace(&trace);
    }
    auto p = policy.make();
    results[i] = run_episode(world, *p);
  });

  RunReport r;
  r.policy = policy.name;
  r.scenario = scenario;
  r.config_hash = config_hash(config);
  r.seeds = seeds;
  std::uint64_t total = 0;
  for (const auto& m : results) {
    r.utilities.push_back(m.normalized_utility);
    r.throughputs.push_back(m.throughput_bps);
    for (const auto& [name, count] : m.action_counts) {
      r.action_frequencies[name] += static_cast<double>(count);
      total += count;
    }
    r.short_term_utilities.insert(r.short_term_utilities.end(),
                                  m.short_term_utilities.begin(),
                                  m.short_term_utilities.end());
  }
  for (auto& [_, f] : r.action_frequencies) f /= static_cast<double>(total);
  r.utility = mean(r.utilities);
  r.throughput = mean(r.throughputs);
  r.wall_clock_s = std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - start)
                       .count();
  return r;
}

EnvConfig shorten_horizon(const EnvConfig& base, Tti horizon) {
  EnvConfig e = base;
  const double scale = static_cast<double>(horizon) /
                       static_cast<double>(base.horizon_ttis);
  e.horizon_ttis = horizon;
  e.total_ues = std::max<std::size_t>(
      1, static_cast<std::size_t>(
             std::lround(static_cast<double>(base.total_ues) * scale)));
  return e;
}

TrainResult train(const ScenarioConfig& config, const fs::path& diagnostic_dir,
                  std::ostream* log) {
  config.validate();
  const auto& ts = config.training;
  struct Block {
    std::string label;
    EnvConfig env;
    std::uint64_t seed;
  };
  std::vector<Block> blocks;
  const std::size_t types = config.env.traffic_types.size();
  const std::size_t count = types * ts.blocks_per_type;
  std::vector<std::pair<std::string, std::vector<double>>> mixes;
  if (ts.blocks == BlockMode::kScenario) {
    if (config.evaluation.scenarios.empty()) {
      mixes.emplace_back(config.scenario, config.env.type_ratios);
    } else {
      for (const auto& s : config.evaluation.scenarios) {
        mixes.emplace_back(s, scenario_ratios(s));
      }
    }
  }
  for (std::size_t i = 0; i < count; ++i) {
    Block b;
    b.env = config.env;
    if (ts.block_horizon_ttis > 0) {
      b.env = shorten_horizon(b.env, ts.block_horizon_ttis);
    }
    if (ts.blocks == BlockMode::kPerType) {
      const std::size_t t = i / ts.blocks_per_type;
      b.env.type_ratios.assign(types, 0.0);
      b.env.type_ratios[t] = 1.0;
      b.label = config.env.traffic_types[t].name + "#" +
                std::to_string(i % ts.blocks_per_type);
    } else {
      const auto& mix = mixes[i % mixes.size()];
      b.env.type_ratios = mix.second;
      b.label = mix.first + "#" + std::to_string(i / mixes.size());
    }
    b.seed = mix_seed({ts.seed, static_cast<std::uint64_t>(Stream::kTraining),
                       0xB10C, i});
    blocks.push_back(std::move(b));
  }

  std::vector<Environment> envs;
  envs.reserve(blocks.size());
  for (const auto& b : blocks) envs.emplace_back(b.env, b.seed);

  Trainer trainer(envs.front().state_dim(), config.ddpg, ts.seed);
  TrainResult result;
  Rng order_rng =
      make_rng({ts.seed, static_cast<std::uint64_t>(Stream::kTraining), 0x0DE5});
  try {
    for (std::size_t epoch = 0; epoch < ts.max_epochs; ++epoch) {
      std::vector<std::size_t> order(blocks.size());
      std::iota(order.begin(), order.end(), 0);
      std::shuffle(order.begin(), order.end(), order_rng);
      double sum = 0.0;
      for (std::size_t i : order) {
        const EpisodeLog e = trainer.run_episode(envs[i]);
        sum += e.episode_return;
        result.curve.push_back(CurveRow{e, epoch, blocks[i].label});
        if (log != nullptr) {
          *log << "epoch " << epoch << " block " << blocks[i].label
               << " return " << e.episode_return << " critic_loss "
               << e.critic_loss << "\n";
        }
      }
      result.epoch_returns.push_back(sum / static_cast<double>(blocks.size()));
      result.epochs = epoch + 1;
      const auto& er = result.epoch_returns;
      if (er.size() >= ts.plateau_epochs) {
        const auto first = er.end() - static_cast<std::ptrdiff_t>(ts.plateau_epochs);
        const auto [lo, hi] = std::minmax_element(first, er.end());
        const double m =
            std::accumulate(first, er.end(), 0.0) /
            static_cast<double>(ts.plateau_epochs);
        if (*hi - *lo <= ts.plateau_tolerance * std::abs(m)) {
          result.converged = true;
          break;
        }
      }
    }
  } catch (const DivergenceError& e) {
    if (!diagnostic_dir.empty()) {
      nlohmann::json j = checkpoint_json(trainer.agent(), config,
                                         trainer.buffer().stats());
      j["diagnostic"] = {{"error", e.what()},
                         {"episodes_completed", result.curve.size()},
                         {"epochs_completed", result.epochs}};
      write_text(diagnostic_dir / "checkpoint_diverged.json", j.dump(1) + "\n");
    }
    throw;
  }
  result.agent = std::make_shared<DdpgAgent>(trainer.agent());
  result.buffer = trainer.buffer().stats();
  return result;
}

Comparison compare(const ScenarioConfig& config,
                   const std::vector<ResolvedPolicy>& policies,
                   const std::vector<std::string>& scenarios,
                   const EvalOptions& options) {
  std::vector<ResolvedPolicy> all = policies;
  std::vector<bool> is_benchmark(all.size(), false);
  for (const auto& name : benchmark_triples()) {
    auto it = std::find_if(all.begin(), all.end(), [&](const ResolvedPolicy& p) {
      return p.name == name;
    });
    if (it == all.end()) {
      all.push_back(resolve_policy(name, config));
      is_benchmark.push_back(true);
    } else {
      is_benchmark[static_cast<std::size_t>(it - all.begin())] = true;
    }
  }
  Comparison c;
  for (const auto& scenario : scenarios) {
    const EnvConfig env = scenario_env(config, scenario_ratios(scenario));
    const std::size_t first = c.rows.size();
    for (std::size_t i = 0; i < all.size(); ++i) {
      ComparisonRow row;
      row.scenario = scenario;
      row.policy = all[i].name;
      row.benchmark = is_benchmark[i];
      row.report = evaluate(config, all[i], scenario, env, options);
      c.rows.push_back(std::move(row));
    }
    std::size_t best = c.rows.size();
    for (std::size_t i = first; i < c.rows.size(); ++i) {
      if (!c.rows[i].benchmark) continue;
      if (best == c.rows.size() ||
          c.rows[i].report.utility > c.rows[best].report.utility) {
        best = i;
      }
    }
    c.rows[best].best_static = true;
    c.best_static[scenario] = c.rows[best].policy;
    for (std::size_t i = first; i < c.rows.size(); ++i) {
      if (all[i - first].is_static() || c.rows[i].report.seeds.size() < 2) {
        continue;
      }
      c.tests.push_back(ComparisonTest{
          scenario, c.rows[i].policy, c.rows[best].policy,
          paired_t_test(c.rows[i].report.utilities,
                        c.rows[best].report.utilities)});
    }
  }
  return c;
}

EnvConfig sweep_env(const EnvConfig& base, SweepAxis axis, double value) {
  EnvConfig env = base;
  if (axis == SweepAxis::kAntennas) {
    env.antennas = static_cast<std::size_t>(std::llround(value));
  } else {
    const auto k = static_cast<std::size_t>(std::llround(value));
    env.avg_concurrent_ues = base.avg_concurrent_ues * static_cast<double>(k) /
                             static_cast<double>(base.total_ues);
    env.total_ues = k;
  }
  return env;
}

SweepResult sweep(const ScenarioConfig& config,
                  const std::vector<ResolvedPolicy>& policies,
                  const EvalOptions& options) {
  SweepResult r;
  r.axis = config.sweep.axis;
  r.values = config.sweep.values;
  for (double v : r.values) {
    const EnvConfig env = sweep_env(config.env, r.axis, v);
    for (const auto& p : policies) {
      r.reports.push_back(evaluate(
          config, p, config.scenario + "@" + to_string(r.axis) + "=" + num(v),
          env, options));
    }
  }
  const double expected = r.axis == SweepAxis::kAntennas ? 1.0 : -1.0;
  const std::size_t np = policies.size();
  const std::size_t ns = config.evaluation.seeds.size();
  for (std::size_t p = 0; p < np; ++p) {
    SweepTrend t;
    t.policy = policies[p].name;
    for (std::size_t v = 0; v < r.values.size(); ++v) {
      t.means.push_back(r.reports[v * np + p].utility);
    }
    if (r.values.size() >= 2) {
      for (std::size_t s = 0; s < ns; ++s) {
        std::vector<double> y;
        for (std::size_t v = 0; v < r.values.size(); ++v) {
          y.push_back(r.reports[v * np + p].utilities[s]);
        }
        const double rho = spearman(r.values, y);
        t.per_seed_spearman.push_back(rho);
        if (std::isnan(rho) || rho == 0.0) continue;
        ++t.informative;
        if (rho * expected > 0.0) ++t.agreeing;
      }
    }
    t.sign_p = sign_test_p(t.agreeing, t.informative);
    r.trends.push_back(std::move(t));
  }
  return r;
}

void write_report(const fs::path& dir, const RunReport& r) {
  const std::string base =
      "report_" + file_stem(r.policy) + "_" + file_stem(r.scenario);
  nlohmann::json j;
  j["policy"] = r.policy;
  j["scenario"] = r.scenario;
  j["config_hash"] = r.config_hash;
  j["seeds"] = r.seeds;
  nlohmann::json per = nlohmann::json::array();
  for (std::size_t i = 0; i < r.seeds.size(); ++i) {
    per.push_back({{"seed", r.seeds[i]},
                   {"normalized_utility", r.utilities[i]},
                   {"throughput_bps", r.throughputs[i]}});
  }
  j["per_seed"] = std::move(per);
  j["aggregate"] = {{"normalized_utility", r.utility},
                    {"throughput_bps", r.throughput}};
  j["action_frequencies"] = r.action_frequencies;
  j["short_term_utilities"] = r.short_term_utilities;
  write_text(dir / (base + ".json"), j.dump(1) + "\n");

  std::string csv = provenance(r.config_hash, r.seeds);
  csv += "# policy: " + r.policy + "\n# scenario: " + r.scenario + "\n";
  csv += "seed,normalized_utility,throughput_bps\n";
  for (std::size_t i = 0; i < r.seeds.size(); ++i) {
    csv += std::to_string(r.seeds[i]) + "," + num(r.utilities[i]) + "," +
           num(r.throughputs[i]) + "\n";
  }
  csv += "mean," + num(r.utility) + "," + num(r.throughput) + "\n";
  write_text(dir / (base + ".csv"), csv);

  nlohmann::json timing = {{"policy", r.policy},
                           {"scenario", r.scenario},
                           {"config_hash", r.config_hash},
                           {"seeds", r.seeds},
                           {"wall_clock_s", r.wall_clock_s}};
  write_text(dir / (base + ".timing.json"), timing.dump(1) + "\n");
}

void write_training(const fs::path& dir, const ScenarioConfig& config,
                    const TrainResult& result) {
  const std::string hash = config_hash(config);
  const auto seeds = training_seeds(config);
  write_text(dir / "checkpoint.json",
             checkpoint_json(*result.agent, config, result.buffer).dump(1) +
                 "\n");
  std::string csv = provenance(hash, seeds);
  csv +=
      "episode,epoch,block,return,critic_loss,actor_grad_norm,steps,updates\n";
  for (const auto& row : result.curve) {
    const auto& e = row.log;
    csv += std::to_string(e.episode) + "," + std::to_string(row.epoch) + "," +
           row.block + "," + num(e.episode_return) + "," + num(e.critic_loss) +
           "," + num(e.actor_grad_norm) + "," + std::to_string(e.steps) + "," +
           std::to_string(e.updates) + "\n";
  }
  write_text(dir / "training_curve.csv", csv);
  nlohmann::json summary = {{"config_hash", hash},
                            {"seeds", seeds},
                            {"epochs", result.epochs},
                            {"converged", result.converged},
                            {"episodes", result.curve.size()},
                            {"epoch_returns", result.epoch_returns}};
  write_text(dir / "training_summary.json", summary.dump(1) + "\n");

  Figure f{FigureKind::kLine, "Training return", "episode", "return", {}};
  for (const auto& row : result.curve) {
    f.points.push_back(FigurePoint{"return", std::to_string(row.log.episode),
                                   row.log.episode_return});
  }
  write_figure(dir, "training_return", f, hash, seeds);
}

void write_comparison(const fs::path& dir, const ScenarioConfig& config,
                      const Comparison& c) {
  const std::string hash = config_hash(config);
  const auto& seeds = config.evaluation.seeds;
  std::string csv = provenance(hash, seeds);
  csv +=
      "scenario,policy,benchmark,best_static,normalized_utility,utility_std,"
      "throughput_bps\n";
  nlohmann::json rows = nlohmann::json::array();
  Figure util{FigureKind::kBar, "Normalized system utility", "scenario",
              "normalized utility", {}};
  Figure thr{FigureKind::kBar, "Throughput", "scenario", "throughput (Mbit/s)",
             {}};
  std::map<std::string, Figure> cdfs;
  for (const auto& row : c.rows) {
    const auto& r = row.report;
    csv += row.scenario + "," + row.policy + "," + (row.benchmark ? "1" : "0") +
           "," + (row.best_static ? "1" : "0") + "," + num(r.utility) + "," +
           num(sample_stddev(r.utilities)) + "," + num(r.throughput) + "\n";
    rows.push_back({{"scenario", row.scenario},
                    {"policy", row.policy},
                    {"benchmark", row.benchmark},
                    {"best_static", row.best_static},
                    {"normalized_utility", r.utility},
                    {"per_seed_utility", r.utilities},
                    {"throughput_bps", r.throughput},
                    {"action_frequencies", r.action_frequencies}});
    util.points.push_back(FigurePoint{row.policy, row.scenario, r.utility});
    thr.points.push_back(FigurePoint{row.policy, row.scenario, r.throughput / 1e6});
    auto& cdf = cdfs[row.scenario];
    cdf.kind = FigureKind::kCdf;
    cdf.title = "Short-term average utility, " + row.scenario;
    cdf.x_label = "short-term utility";
    cdf.y_label = "CDF";
    std::vector<double> v = r.short_term_utilities;
    std::sort(v.begin(), v.end());
    for (std::size_t i = 0; i < v.size(); ++i) {
      cdf.points.push_back(FigurePoint{
          row.policy, num(v[i]),
          static_cast<double>(i + 1) / static_cast<double>(v.size())});
    }
    write_report(dir, r);
  }
  write_text(dir / "comparison.csv", csv);
  nlohmann::json tests = nlohmann::json::array();
  for (const auto& t : c.tests) {
    tests.push_back({{"scenario", t.scenario},
                     {"policy", t.policy},
                     {"against", t.against},
                     {"mean_difference", t.test.mean_difference},
                     {"t_statistic", t.test.t_statistic},
                     {"p_greater", t.test.p_greater}});
  }
  nlohmann::json j = {{"config_hash", hash},
                      {"seeds", seeds},
                      {"rows", rows},
                      {"best_static", c.best_static},
                      {"tests", tests}};
  write_text(dir / "comparison.json", j.dump(1) + "\n");
  write_figure(dir, "utility", util, hash, seeds);
  write_figure(dir, "throughput", thr, hash, seeds);
  for (const auto& [scenario, fig] : cdfs) {
    write_figure(dir, "cdf_" + file_stem(scenario), fig, hash, seeds);
  }
}

void write_sweep(const fs::path& dir, const ScenarioConfig& config,
                 const SweepResult& r) {
  const std::string hash = config_hash(config);
  const auto& seeds = config.evaluation.seeds;
  const std::string axis = to_string(r.axis);
  const std::size_t np = r.trends.size();
  std::string csv = provenance(hash, seeds);
  csv += axis + ",policy,seed,normalized_utility,throughput_bps\n";
  for (std::size_t v = 0; v < r.values.size(); ++v) {
    for (std::size_t p = 0; p < np; ++p) {
      const auto& rep = r.reports[v * np + p];
      for (std::size_t s = 0; s < rep.seeds.size(); ++s) {
        csv += num(r.values[v]) + "," + rep.policy + "," +
               std::to_string(rep.seeds[s]) + "," + num(rep.utilities[s]) +
               "," + num(rep.throughputs[s]) + "\n";
      }
    }
  }
  write_text(dir / "sweep.csv", csv);

  Figure f{FigureKind::kLine, "Utility trend", axis, "normalized utility", {}};
  nlohmann::json trends = nlohmann::json::array();
  for (const auto& t : r.trends) {
    for (std::size_t v = 0; v < r.values.size(); ++v) {
      f.points.push_back(FigurePoint{t.policy, num(r.values[v]), t.means[v]});
    }
    nlohmann::json rho = nlohmann::json::array();
    for (double x : t.per_seed_spearman) {
      rho.push_back(std::isnan(x) ? nlohmann::json(nullptr) : nlohmann::json(x));
    }
    trends.push_back({{"policy", t.policy},
                      {"means", t.means},
                      {"per_seed_spearman", rho},
                      {"agreeing", t.agreeing},
                      {"informative", t.informative},
                      {"sign_test_p", t.sign_p}});
  }
  nlohmann::json j = {{"config_hash", hash}, {"seeds", seeds},
                      {"axis", axis},        {"values", r.values},
                      {"trends", trends}};
  write_text(dir / "sweep_trend.json", j.dump(1) + "\n");
  write_figure(dir, "sweep_utility", f, hash, seeds);
}

void render_figure_file(const fs::path& csv, const fs::path& svg) {
  write_text(svg, render_svg(parse_figure_csv(read_text(csv))));
}

}  // namespace mmsched
