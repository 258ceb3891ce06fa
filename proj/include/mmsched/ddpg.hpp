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

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "mmsched/action.hpp"
#include "mmsched/env.hpp"
#include "mmsched/mlp.hpp"
#include "mmsched/rng.hpp"

namespace mmsched {

struct TrainConfig {
  std::vector<int> actor_hidden = {512, 512, 512};
  std::vector<int> critic_hidden = {512, 512, 512};
  double actor_lr = 2e-3;
  double critic_lr = 1e-3;
  double gamma = 0.9;
  double tau = 1e-2;
  double dropout = 0.5;
  double explore_sigma = 0.1;
  bool ou_noise = false;
  double ou_theta = 0.15;
  std::size_t buffer_capacity = 600000;
  std::size_t batch_size = 60000;
  std::size_t updates_per_step = 1;
  // Interaction steps at the start of training that draw actions uniformly
  // from [-1, 1]^3 instead of the noisy actor.
  std::size_t random_steps = 0;
  // Store the embedded action's bin centre instead of the raw actor output.
  bool discrete_replay = false;
  double divergence_threshold = 1e6;

  void validate() const;
};

struct Transition {
  Eigen::VectorXd state;
  ContinuousAction action{};
  double reward = 0.0;
  Eigen::VectorXd next_state;
  bool done = false;
};

// Column-stacked mini-batch.
struct Batch {
  Eigen::MatrixXd states;
  Eigen::MatrixXd actions;
  Eigen::VectorXd rewards;
  Eigen::MatrixXd next_states;
  Eigen::VectorXd not_done;

  Eigen::Index size() const { return states.cols(); }
};

Batch make_batch(const std::vector<const Transition*>& items);

struct BufferStats {
  std::size_t size = 0;
  std::size_t capacity = 0;
  std::uint64_t pushed = 0;
  double reward_mean = 0.0;
  double reward_std = 0.0;
};

// FIFO ring of transitions with uniform sampling (with replacement).
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(Transition t);
  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  Batch sample(std::size_t n, Rng& rng) const;
  const Transition& at(std::size_t i) const { return items_[i]; }
  BufferStats stats() const;

 private:
  std::size_t capacity_;
  std::vector<Transition> items_;
  std::size_t head_ = 0;
  std::uint64_t pushed_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

// dQ/da for each column of (states, actions); 3 x N.
using ActionGradient = std::function<Eigen::MatrixXd(const Eigen::MatrixXd&,
                                                     const Eigen::MatrixXd&)>;

struct UpdateStats {
  double critic_loss = 0.0;
  double actor_grad_norm = 0.0;
};

// Actor mu(s) in [-1, 1]^3 (tanh head) and critic Q(s, a) on [s; a], each
// with a target copy.
class DdpgAgent {
 public:
  DdpgAgent(std::size_t state_dim, TrainConfig config, std::uint64_t seed);

  ContinuousAction act(const Eigen::VectorXd& state) const;
  double q(const Eigen::VectorXd& state, const ContinuousAction& action) const;

  // Targets y = r + gamma (1 - done) Q'(s', center(embed(mu'(s')))).
  Eigen::VectorXd targets(const Batch& batch) const;
  // Mean squared TD error against fixed targets, no dropout.
  double critic_loss(const Batch& batch, const Eigen::VectorXd& y) const;
  Gradients critic_gradients(const Batch& batch, const Eigen::VectorXd& y,
                             Rng* dropout_rng, double* loss) const;
  // -mean Q(s, mu(s)) with the critic frozen, no dropout.
  double actor_objective(const Eigen::MatrixXd& states) const;
  Gradients actor_gradients(const Eigen::MatrixXd& states, Rng* dropout_rng,
                            const ActionGradient* action_grad = nullptr) const;
  Eigen::MatrixXd critic_action_gradient(const Eigen::MatrixXd& states,
                                         const Eigen::MatrixXd& actions) const;

  double critic_update(const Batch& batch, Rng& rng);
  double actor_update(const Eigen::MatrixXd& states, Rng& rng,
                      const ActionGradient* action_grad = nullptr);
  void soft_update();
  UpdateStats update(const Batch& batch, Rng& rng);

  std::size_t state_dim() const { return state_dim_; }
  const TrainConfig& config() const { return config_; }
  Mlp& actor() { return actor_; }
  Mlp& critic() { return critic_; }
  const Mlp& actor() const { return actor_; }
  const Mlp& critic() const { return critic_; }
  const Mlp& actor_target() const { return actor_target_; }
  const Mlp& critic_target() const { return critic_target_; }

  nlohmann::json to_json() const;
  static DdpgAgent from_json(const nlohmann::json& j, TrainConfig config);

 private:
  Eigen::MatrixXd stack(const Eigen::MatrixXd& states,
                        const Eigen::MatrixXd& actions) const;
  void check_loss(double loss) const;

  std::size_t state_dim_;
  TrainConfig config_;
  Mlp actor_;
  Mlp critic_;
  Mlp actor_target_;
  Mlp critic_target_;
  Adam actor_opt_;
  Adam critic_opt_;
};

struct EpisodeLog {
  std::size_t episode = 0;
  double episode_return = 0.0;
  double critic_loss = 0.0;      // mean over updates, 0 before warm-up ends
  double actor_grad_norm = 0.0;  // mean over updates
  std::size_t steps = 0;
  std::size_t updates = 0;
};

// Interaction loop: noisy actor, replay, and one update per step once the
// buffer holds a full batch.
class Trainer {
 public:
  Trainer(std::size_t state_dim, TrainConfig config, std::uint64_t seed);

  EpisodeLog run_episode(MdpEnvironment& env);

  DdpgAgent& agent() { return agent_; }
  const DdpgAgent& agent() const { return agent_; }
  const ReplayBuffer& buffer() const { return buffer_; }
  std::size_t episodes() const { return episodes_; }
  std::uint64_t steps() const { return steps_; }

 private:
  ContinuousAction noisy(const ContinuousAction& a);
  ContinuousAction uniform();

  DdpgAgent agent_;
  ReplayBuffer buffer_;
  Rng rng_;
  std::array<double, 3> ou_state_{};
  std::size_t episodes_ = 0;
  std::uint64_t steps_ = 0;
};

// Greedy learned policy: embed(mu(s)).
class AgentPolicy final : public Policy {
 public:
  explicit AgentPolicy(const DdpgAgent& agent, std::string name = "learned")
      : agent_(agent), name_(std::move(name)) {}
  std::string name() const override { return name_; }
  SchedulePlan decide(const Environment& env, const StateVector& state,
                      std::string& label) override;

 private:
  const DdpgAgent& agent_;
  std::string name_;
};

// Bandit check: i.i.d. uniform states; one fixed triple earns 0 in every
// state and every other triple earns -1.
class DominantTripleBandit final : public MdpEnvironment {
 public:
  DominantTripleBandit(ActionTriple dominant, std::size_t state_dim,
                       std::size_t episode_length, std::uint64_t seed);

  std::size_t state_dim() const override { return state_dim_; }
  StateVector reset() override;
  StepOutcome step(const ActionTriple& action) override;
  bool done() const override { return t_ >= length_; }

  double reward(const ActionTriple& action) const;
  StateVector sample_state();

 private:
  ActionTriple dominant_;
  std::size_t state_dim_;
  std::size_t length_;
  std::size_t t_ = 0;
  Rng rng_;
  StateVector state_;
};

}  // namespace mmsched
