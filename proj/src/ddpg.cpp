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

#include "mmsched/ddpg.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <stdexcept>

namespace mmsched {
namespace {

std::vector<int> layer_sizes(std::size_t in, const std::vector<int>& hidden,
                             int out) {
  std::vector<int> sizes{static_cast<int>(in)};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(out);
  return sizes;
}

const char* activation_name(Activation a) {
  switch (a) {
    case Activation::kRelu:
      return "relu";
    case Activation::kTanh:
      return "tanh";
    case Activation::kLinear:
      return "linear";
  }
  return "linear";
}

Activation parse_activation(const std::string& s) {
  if (s == "relu") return Activation::kRelu;
  if (s == "tanh") return Activation::kTanh;
  if (s == "linear") return Activation::kLinear;
  throw ConfigError("unknown activation '" + s + "'");
}

nlohmann::json net_to_json(const Mlp& net) {
  nlohmann::json j;
  j["sizes"] = net.sizes();
  j["hidden"] = activation_name(net.hidden_activation());
  j["output"] = activation_name(net.output_activation());
  nlohmann::json layers = nlohmann::json::array();
  for (std::size_t l = 0; l < net.layers(); ++l) {
    const auto& w = net.weights()[l];
    std::vector<double> wf;
    wf.reserve(static_cast<std::size_t>(w.size()));
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) wf.push_back(w(r, c));
    }
    const auto& b = net.biases()[l];
    layers.push_back({{"weights", wf},
                      {"biases", std::vector<double>(b.data(),
                                                     b.data() + b.size())}});
  }
  j["layers"] = std::move(layers);
  return j;
}

void net_from_json(const nlohmann::json& j, Mlp& net) {
  if (j.at("sizes").get<std::vector<int>>() != net.sizes() ||
      parse_activation(j.at("hidden")) != net.hidden_activation() ||
      parse_activation(j.at("output")) != net.output_activation()) {
    throw ConfigError("checkpoint network shape does not match the config");
  }
  const auto& layers = j.at("layers");
  for (std::size_t l = 0; l < net.layers(); ++l) {
    auto& w = net.weights()[l];
    auto& b = net.biases()[l];
    const auto wf = layers.at(l).at("weights").get<std::vector<double>>();
    const auto bf = layers.at(l).at("biases").get<std::vector<double>>();
    if (wf.size() != static_cast<std::size_t>(w.size()) ||
        bf.size() != static_cast<std::size_t>(b.size())) {
      throw ConfigError("checkpoint parameter array has the wrong length");
    }
    std::size_t i = 0;
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = wf[i++];
    }
    for (Eigen::Index r = 0; r < b.size(); ++r) b[r] = bf[static_cast<std::size_t>(r)];
  }
}

Eigen::VectorXd to_vector(const ContinuousAction& a) {
  return Eigen::Vector3d(a[0], a[1], a[2]);
}

}  // namespace

void TrainConfig::validate() const {
  for (int h : actor_hidden) {
    if (h <= 0) throw ConfigError("actor hidden sizes must be positive");
  }
  for (int h : critic_hidden) {
    if (h <= 0) throw ConfigError("critic hidden sizes must be positive");
  }
  if (!(actor_lr > 0.0) || !(critic_lr > 0.0)) {
    throw ConfigError("learning rates must be positive");
  }
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ConfigError("gamma must be in [0, 1)");
  if (!(tau > 0.0 && tau <= 1.0)) throw ConfigError("tau must be in (0, 1]");
  if (!(dropout >= 0.0 && dropout < 1.0)) {
    throw ConfigError("dropout must be in [0, 1)");
  }
  if (!(explore_sigma >= 0.0)) throw ConfigError("explore_sigma must be >= 0");
  if (!(ou_theta > 0.0 && ou_theta <= 1.0)) {
    throw ConfigError("ou_theta must be in (0, 1]");
  }
  if (batch_size == 0) throw ConfigError("batch_size must be positive");
  if (buffer_capacity < batch_size) {
    throw ConfigError("buffer_capacity must be at least batch_size");
  }
  if (updates_per_step == 0) throw ConfigError("updates_per_step must be positive");
  if (!(divergence_threshold > 0.0)) {
    throw ConfigError("divergence_threshold must be positive");
  }
}

Batch make_batch(const std::vector<const Transition*>& items) {
  if (items.empty()) return {};
  const Eigen::Index n = static_cast<Eigen::Index>(items.size());
  const Eigen::Index d = items.front()->state.size();
  Batch b;
  b.states.resize(d, n);
  b.next_states.resize(d, n);
  b.actions.resize(3, n);
  b.rewards.resize(n);
  b.not_done.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Transition& t = *items[static_cast<std::size_t>(i)];
    b.states.col(i) = t.state;
    b.next_states.col(i) = t.next_state;
    b.actions.col(i) = to_vector(t.action);
    b.rewards[i] = t.reward;
    b.not_done[i] = t.done ? 0.0 : 1.0;
  }
  return b;
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw ConfigError("replay capacity must be positive");
}

void ReplayBuffer::push(Transition t) {
  ++pushed_;
  const double delta = t.reward - mean_;
  mean_ += delta / static_cast<double>(pushed_);
  m2_ += delta * (t.reward - mean_);
  if (items_.size() < capacity_) {
    items_.push_back(std::move(t));
  } else {
    items_[head_] = std::move(t);
    head_ = (head_ + 1) % capacity_;
  }
}

Batch ReplayBuffer::sample(std::size_t n, Rng& rng) const {
  if (items_.empty()) throw std::logic_error("sampling an empty buffer");
  std::uniform_int_distribution<std::size_t> pick(0, items_.size() - 1);
  std::vector<const Transition*> chosen(n);
  for (auto& c : chosen) c = &items_[pick(rng)];
  return make_batch(chosen);
}

BufferStats ReplayBuffer::stats() const {
  BufferStats s;
  s.size = items_.size();
  s.capacity = capacity_;
  s.pushed = pushed_;
  s.reward_mean = mean_;
  s.reward_std =
      pushed_ > 1 ? std::sqrt(m2_ / static_cast<double>(pushed_ - 1)) : 0.0;
  return s;
}

DdpgAgent::DdpgAgent(std::size_t state_dim, TrainConfig config,
                     std::uint64_t seed)
    : state_dim_(state_dim), config_(std::move(config)) {
  config_.validate();
  if (state_dim == 0) throw ConfigError("state dimension must be positive");
  Rng rng = make_rng({seed, static_cast<std::uint64_t>(Stream::kAgent)});
  actor_ = Mlp(layer_sizes(state_dim, config_.actor_hidden, 3),
               Activation::kRelu, Activation::kTanh, rng);
  critic_ = Mlp(layer_sizes(state_dim + 3, config_.critic_hidden, 1),
                Activation::kRelu, Activation::kLinear, rng);
  actor_target_ = actor_;
  critic_target_ = critic_;
  actor_opt_ = Adam(actor_, AdamParams{config_.actor_lr});
  critic_opt_ = Adam(critic_, AdamParams{config_.critic_lr});
}

Eigen::MatrixXd DdpgAgent::stack(const Eigen::MatrixXd& states,
                                 const Eigen::MatrixXd& actions) const {
  Eigen::MatrixXd x(states.rows() + actions.rows(), states.cols());
  x << states, actions;
  return x;
}

ContinuousAction DdpgAgent::act(const Eigen::VectorXd& state) const {
  const Eigen::MatrixXd a = actor_.forward(state);
  return {a(0, 0), a(1, 0), a(2, 0)};
}

double DdpgAgent::q(const Eigen::VectorXd& state,
                    const ContinuousAction& action) const {
  return critic_.forward(stack(state, to_vector(action)))(0, 0);
}

Eigen::VectorXd DdpgAgent::targets(const Batch& batch) const {
  const Eigen::MatrixXd raw = actor_target_.forward(batch.next_states);
  Eigen::MatrixXd next_actions(3, raw.cols());
  for (Eigen::Index i = 0; i < raw.cols(); ++i) {
    const ContinuousAction c =
        center(embed({raw(0, i), raw(1, i), raw(2, i)}));
    next_actions.col(i) = to_vector(c);
  }
  const Eigen::VectorXd q_next =
      critic_target_.forward(stack(batch.next_states, next_actions))
          .row(0)
          .transpose();
  return batch.rewards +
         config_.gamma * batch.not_done.cwiseProduct(q_next);
}

double DdpgAgent::critic_loss(const Batch& batch,
                              const Eigen::VectorXd& y) const {
  const Eigen::VectorXd q =
      critic_.forward(stack(batch.states, batch.actions)).row(0).transpose();
  return (q - y).squaredNorm() / static_cast<double>(batch.size());
}

Gradients DdpgAgent::critic_gradients(const Batch& batch,
                                      const Eigen::VectorXd& y,
                                      Rng* dropout_rng, double* loss) const {
  Mlp::Cache cache;
  const Eigen::MatrixXd q = critic_.forward(
      stack(batch.states, batch.actions), cache,
      dropout_rng != nullptr ? config_.dropout : 0.0, dropout_rng);
  const double n = static_cast<double>(batch.size());
  const Eigen::RowVectorXd err = q.row(0) - y.transpose();
  if (loss != nullptr) *loss = err.squaredNorm() / n;
  return critic_.backward(cache, (2.0 / n) * err);
}

Eigen::MatrixXd DdpgAgent::critic_action_gradient(
    const Eigen::MatrixXd& states, const Eigen::MatrixXd& actions) const {
  Mlp::Cache cache;
  const Eigen::MatrixXd q =
      critic_.forward(stack(states, actions), cache, 0.0, nullptr);
  Eigen::MatrixXd grad_in;
  critic_.backward(cache, Eigen::MatrixXd::Ones(1, q.cols()), &grad_in);
  return grad_in.bottomRows(3);
}

double DdpgAgent::actor_objective(const Eigen::MatrixXd& states) const {
  const Eigen::MatrixXd a = actor_.forward(states);
  return -critic_.forward(stack(states, a)).mean();
}

Gradients DdpgAgent::actor_gradients(const Eigen::MatrixXd& states,
                                     Rng* dropout_rng,
                                     const ActionGradient* action_grad) const {
  Mlp::Cache cache;
  const Eigen::MatrixXd a = actor_.forward(
      states, cache, dropout_rng != nullptr ? config_.dropout : 0.0,
      dropout_rng);
  const Eigen::MatrixXd g = action_grad != nullptr
                                ? (*action_grad)(states, a)
                                : critic_action_gradient(states, a);
  const double n = static_cast<double>(states.cols());
  return actor_.backward(cache, (-1.0 / n) * g);
}

void DdpgAgent::check_loss(double loss) const {
  if (!std::isfinite(loss) || loss > config_.divergence_threshold) {
    throw DivergenceError("critic loss " + std::to_string(loss) +
                          " exceeds the divergence threshold");
  }
}

double DdpgAgent::critic_update(const Batch& batch, Rng& rng) {
  if (batch.size() == 0) {
    std::clog << "warning: critic update skipped on an empty batch\n";
    return 0.0;
  }
  const Eigen::VectorXd y = targets(batch);
  double loss = 0.0;
  const Gradients g = critic_gradients(batch, y, &rng, &loss);
  check_loss(loss);
  critic_opt_.step(critic_, g);
  if (!critic_.finite()) throw DivergenceError("critic parameters non-finite");
  return loss;
}

double DdpgAgent::actor_update(const Eigen::MatrixXd& states, Rng& rng,
                               const ActionGradient* action_grad) {
  if (states.cols() == 0) {
    std::clog << "warning: actor update skipped on an empty batch\n";
    return 0.0;
  }
  const Gradients g = actor_gradients(states, &rng, action_grad);
  actor_opt_.step(actor_, g);
  if (!actor_.finite()) throw DivergenceError("actor parameters non-finite");
  return g.norm();
}

void DdpgAgent::soft_update() {
  actor_target_.soft_update(actor_, config_.tau);
  critic_target_.soft_update(critic_, config_.tau);
}

UpdateStats DdpgAgent::update(const Batch& batch, Rng& rng) {
  UpdateStats s;
  s.critic_loss = critic_update(batch, rng);
  s.actor_grad_norm = actor_update(batch.states, rng);
  soft_update();
  return s;
}

nlohmann::json DdpgAgent::to_json() const {
  nlohmann::json j;
  j["state_dim"] = state_dim_;
  j["actor"] = net_to_json(actor_);
  j["critic"] = net_to_json(critic_);
  j["actor_target"] = net_to_json(actor_target_);
  j["critic_target"] = net_to_json(critic_target_);
  return j;
}

DdpgAgent DdpgAgent::from_json(const nlohmann::json& j, TrainConfig config) {
  DdpgAgent agent(j.at("state_dim").get<std::size_t>(), std::move(config), 0);
  net_from_json(j.at("actor"), agent.actor_);
  net_from_json(j.at("critic"), agent.critic_);
  net_from_json(j.at("actor_target"), agent.actor_target_);
  net_from_json(j.at("critic_target"), agent.critic_target_);
  return agent;
}

Trainer::Trainer(std::size_t state_dim, TrainConfig config, std::uint64_t seed)
    : agent_(state_dim, config, seed),
      buffer_(config.buffer_capacity),
      rng_(make_rng({seed, static_cast<std::uint64_t>(Stream::kTraining)})) {}

ContinuousAction Trainer::noisy(const ContinuousAction& a) {
  const auto& c = agent_.config();
  std::normal_distribution<double> n(0.0, 1.0);
  ContinuousAction out{};
  for (std::size_t i = 0; i < 3; ++i) {
    double eps = c.explore_sigma * n(rng_);
    if (c.ou_noise) {
      ou_state_[i] += -c.ou_theta * ou_state_[i] + eps;
      eps = ou_state_[i];
    }
    out[i] = std::clamp(a[i] + eps, -1.0, 1.0);
  }
  return out;
}

ContinuousAction Trainer::uniform() {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  return {u(rng_), u(rng_), u(rng_)};
}

EpisodeLog Trainer::run_episode(MdpEnvironment& env) {
  const auto& c = agent_.config();
  EpisodeLog log;
  log.episode = episodes_++;
  ou_state_ = {};
  Eigen::VectorXd s = env.reset();
  while (!env.done()) {
    const ContinuousAction a =
        steps_ < c.random_steps ? uniform() : noisy(agent_.act(s));
    ++steps_;
    const ActionTriple triple = embed(a);
    StepOutcome out = env.step(triple);
    log.episode_return += out.reward;
    ++log.steps;
    buffer_.push(Transition{s, c.discrete_replay ? center(triple) : a,
                            out.reward, out.next_state, out.done});
    if (buffer_.size() >= c.batch_size) {
      for (std::size_t u = 0; u < c.updates_per_step; ++u) {
        const UpdateStats st = agent_.update(buffer_.sample(c.batch_size, rng_),
                                             rng_);
        log.critic_loss += st.critic_loss;
        log.actor_grad_norm += st.actor_grad_norm;
        ++log.updates;
      }
    }
    s = std::move(out.next_state);
  }
  if (log.updates > 0) {
    log.critic_loss /= static_cast<double>(log.updates);
    log.actor_grad_norm /= static_cast<double>(log.updates);
  }
  return log;
}

SchedulePlan AgentPolicy::decide(const Environment& env,
                                 const StateVector& state,
                                 std::string& label) {
  const ActionTriple t = embed(agent_.act(state));
  label = action_name(t);
  return env.plan(t);
}

DominantTripleBandit::DominantTripleBandit(ActionTriple dominant,
                                           std::size_t state_dim,
                                           std::size_t episode_length,
                                           std::uint64_t seed)
    : dominant_(dominant),
      state_dim_(state_dim),
      length_(episode_length),
      rng_(make_rng({seed, static_cast<std::uint64_t>(Stream::kSessions)})) {
  if (!dominant.valid()) throw ConfigError("invalid dominant triple");
  if (state_dim == 0 || episode_length == 0) {
    throw ConfigError("bandit needs a state and a positive episode length");
  }
}

StateVector DominantTripleBandit::sample_state() {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  StateVector s(static_cast<Eigen::Index>(state_dim_));
  for (Eigen::Index i = 0; i < s.size(); ++i) s[i] = u(rng_);
  return s;
}

StateVector DominantTripleBandit::reset() {
  t_ = 0;
  state_ = sample_state();
  return state_;
}

double DominantTripleBandit::reward(const ActionTriple& action) const {
  return action == dominant_ ? 0.0 : -1.0;
}

StepOutcome DominantTripleBandit::step(const ActionTriple& action) {
  if (done()) throw std::logic_error("step after the episode ended");
  StepOutcome out;
  out.reward = reward(action);
  ++t_;
  out.done = done();
  state_ = sample_state();
  out.next_state = state_;
  return out;
}

}  // namespace mmsched
