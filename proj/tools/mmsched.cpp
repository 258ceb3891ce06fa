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

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mmsched/config.hpp"
#include "mmsched/harness.hpp"

namespace fs = std::filesystem;
using namespace mmsched;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitDivergence = 3;

struct Common {
  std::string config;
  std::vector<std::uint64_t> seeds;
  std::string output = "out";
  int verbosity = 0;
  std::size_t workers = 0;
};

void add_common(CLI::App* app, Common& c, bool needs_config = true) {
  auto* opt = app->add_option("-c,--config", c.config, "YAML config file");
  if (needs_config) opt->required();
  app->add_option("-s,--seeds", c.seeds, "seed list, e.g. 0,1,2")
      ->delimiter(',');
  app->add_option("-o,--output-dir", c.output, "output directory");
  app->add_flag("-v,--verbose", c.verbosity,
                "-v logs progress, -vv also writes per-TTI traces");
  app->add_option("-j,--workers", c.workers, "worker threads for evaluation");
}

ScenarioConfig load(const Common& c) {
  ScenarioConfig cfg = load_config(c.config);
  if (!c.seeds.empty()) cfg.evaluation.seeds = c.seeds;
  if (c.workers > 0) cfg.workers = c.workers;
  cfg.validate();
  return cfg;
}

EvalOptions eval_options(const Common& c, const ScenarioConfig& cfg) {
  EvalOptions o;
  o.workers = cfg.workers;
  if (c.verbosity >= 2) o.trace_dir = fs::path(c.output) / "traces";
  return o;
}

std::vector<std::string> scenarios_of(const ScenarioConfig& cfg,
                                      const std::vector<std::string>& flag) {
  if (!flag.empty()) {
    for (const auto& s : flag) scenario_ratios(s);
    return flag;
  }
  if (!cfg.evaluation.scenarios.empty()) return cfg.evaluation.scenarios;
  return {};
}

void print_report(const RunReport& r) {
  std::cout << r.scenario << "  " << r.policy << "  utility " << r.utility
            << "  throughput " << r.throughput / 1e6 << " Mbit/s\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Massive MIMO downlink scheduling lab"};
  app.require_subcommand(1);

  Common train_opts;
  auto* train_cmd = app.add_subcommand("train", "train a DDPG scheduler");
  add_common(train_cmd, train_opts);

  Common eval_opts;
  std::string policy;
  std::vector<std::string> eval_scenarios;
  auto* eval_cmd = app.add_subcommand("eval", "evaluate one policy");
  add_common(eval_cmd, eval_opts);
  eval_cmd->add_option("-p,--policy", policy,
                       "triple (CQI-MinG75-AS), baseline or checkpoint path");
  eval_cmd->add_option("--scenarios", eval_scenarios, "S1..S6")->delimiter(',');

  Common cmp_opts;
  std::vector<std::string> cmp_policies;
  std::vector<std::string> cmp_scenarios;
  auto* cmp_cmd = app.add_subcommand("compare", "compare policies");
  add_common(cmp_cmd, cmp_opts);
  cmp_cmd->add_option("-p,--policies", cmp_policies, "policy list")
      ->delimiter(',');
  cmp_cmd->add_option("--scenarios", cmp_scenarios, "S1..S6")->delimiter(',');

  Common sweep_opts;
  std::string axis;
  std::vector<double> values;
  std::vector<std::string> sweep_policies;
  auto* sweep_cmd = app.add_subcommand("sweep", "utility trend over M or K");
  add_common(sweep_cmd, sweep_opts);
  sweep_cmd->add_option("--axis", axis, "antennas or ues");
  sweep_cmd->add_option("--values", values, "ascending values")->delimiter(',');
  sweep_cmd->add_option("-p,--policies", sweep_policies, "policy list")
      ->delimiter(',');

  Common plot_opts;
  std::vector<std::string> inputs;
  auto* plot_cmd =
      app.add_subcommand("plot", "render SVG plots from figure CSV files");
  add_common(plot_cmd, plot_opts, false);
  plot_cmd->add_option("inputs", inputs, "figure CSV files or directories")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*train_cmd) {
      ScenarioConfig cfg = load_config(train_opts.config);
      if (!train_opts.seeds.empty()) cfg.training.seed = train_opts.seeds.front();
      cfg.validate();
      const fs::path out = train_opts.output;
      fs::create_directories(out);
      const TrainResult r =
          train(cfg, out, train_opts.verbosity >= 1 ? &std::cerr : nullptr);
      write_training(out, cfg, r);
      std::cout << "trained " << r.epochs << " epochs, "
                << r.curve.size() << " episodes"
                << (r.converged ? ", converged" : "") << "; checkpoint "
                << (out / "checkpoint.json").string() << "\n";
    } else if (*eval_cmd) {
      const ScenarioConfig cfg = load(eval_opts);
      const ResolvedPolicy p =
          resolve_policy(policy.empty() ? cfg.policy : policy, cfg);
      auto scenarios = scenarios_of(cfg, eval_scenarios);
      const fs::path out = eval_opts.output;
      if (scenarios.empty()) {
        const RunReport r =
            evaluate(cfg, p, cfg.scenario, cfg.env, eval_options(eval_opts, cfg));
        write_report(out, r);
        print_report(r);
      }
      for (const auto& s : scenarios) {
        const RunReport r = evaluate(cfg, p, s, scenario_env(cfg, scenario_ratios(s)),
                                     eval_options(eval_opts, cfg));
        write_report(out, r);
        print_report(r);
      }
    } else if (*cmp_cmd) {
      const ScenarioConfig cfg = load(cmp_opts);
      std::vector<std::string> names =
          cmp_policies.empty() ? cfg.evaluation.policies : cmp_policies;
      std::vector<ResolvedPolicy> policies;
      for (const auto& n : names) policies.push_back(resolve_policy(n, cfg));
      auto scenarios = scenarios_of(cfg, cmp_scenarios);
      if (scenarios.empty()) scenarios = {cfg.scenario};
      const Comparison c =
          compare(cfg, policies, scenarios, eval_options(cmp_opts, cfg));
      write_comparison(cmp_opts.output, cfg, c);
      for (const auto& row : c.rows) {
        print_report(row.report);
      }
      for (const auto& t : c.tests) {
        std::cout << t.scenario << "  " << t.policy << " vs " << t.against
                  << "  diff " << t.test.mean_difference << "  p "
                  << t.test.p_greater << "\n";
      }
    } else if (*sweep_cmd) {
      ScenarioConfig cfg = load(sweep_opts);
      if (!axis.empty()) {
        if (axis == "antennas") {
          cfg.sweep.axis = SweepAxis::kAntennas;
        } else if (axis == "ues") {
          cfg.sweep.axis = SweepAxis::kUes;
        } else {
          throw ConfigError("axis must be 'antennas' or 'ues'");
        }
      }
      if (!values.empty()) cfg.sweep.values = values;
      if (!sweep_policies.empty()) cfg.sweep.policies = sweep_policies;
      cfg.validate();
      std::vector<ResolvedPolicy> policies;
      for (const auto& n : cfg.sweep.policies) {
        policies.push_back(resolve_policy(n, cfg));
      }
      const SweepResult r = sweep(cfg, policies, eval_options(sweep_opts, cfg));
      write_sweep(sweep_opts.output, cfg, r);
      for (const auto& t : r.trends) {
        std::cout << t.policy << ":";
        for (std::size_t i = 0; i < r.values.size(); ++i) {
          std::cout << "  " << r.values[i] << "->" << t.means[i];
        }
        std::cout << "  sign test p " << t.sign_p << "\n";
      }
    } else if (*plot_cmd) {
      std::vector<fs::path> files;
      for (const auto& in : inputs) {
        if (fs::is_directory(in)) {
          for (const auto& e : fs::directory_iterator(in)) {
            if (e.path().extension() != ".csv") continue;
            std::ifstream f(e.path());
            std::string first;
            std::getline(f, first);
            if (first.rfind("# figure:", 0) == 0) files.push_back(e.path());
          }
        } else {
          files.emplace_back(in);
        }
      }
      std::sort(files.begin(), files.end());
      for (const auto& f : files) {
        fs::path svg = f;
        svg.replace_extension(".svg");
        render_figure_file(f, svg);
        if (plot_opts.verbosity >= 1) std::cerr << "wrote " << svg << "\n";
      }
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DivergenceError& e) {
    std::cerr << "training diverged: " << e.what() << "\n";
    return kExitDivergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
