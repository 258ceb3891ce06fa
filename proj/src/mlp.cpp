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

#include "mmsched/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace mmsched {
namespace {

Eigen::MatrixXd activate(Activation f, const Eigen::MatrixXd& z) {
  switch (f) {
    case Activation::kRelu:
      return z.cwiseMax(0.0);
    case Activation::kTanh:
      return z.array().tanh().matrix();
    case Activation::kLinear:
      return z;
  }
  return z;
}

// f'(z) expressed through z (and y = f(z) for tanh).
Eigen::MatrixXd derivative(Activation f, const Eigen::MatrixXd& z) {
  switch (f) {
    case Activation::kRelu:
      return (z.array() > 0.0).cast<double>().matrix();
    case Activation::kTanh:
      return (1.0 - z.array().tanh().square()).matrix();
    case Activation::kLinear:
      return Eigen::MatrixXd::Ones(z.rows(), z.cols());
  }
  return z;
}

}  // namespace

double Gradients::norm() const {
  double s = 0.0;
  for (const auto& w : weights) s += w.squaredNorm();
  for (const auto& b : biases) s += b.squaredNorm();
  return std::sqrt(s);
}

Mlp::Mlp(std::vector<int> sizes, Activation hidden, Activation output, Rng& rng,
         double final_scale)
    : sizes_(std::move(sizes)), hidden_(hidden), output_(output) {
  if (sizes_.size() < 2) throw std::invalid_argument("need at least two sizes");
  for (int s : sizes_) {
    if (s <= 0) throw std::invalid_argument("layer sizes must be positive");
  }
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    const bool last = l + 2 == sizes_.size();
    const double scale =
        last ? final_scale : 1.0 / std::sqrt(static_cast<double>(sizes_[l]));
    Eigen::MatrixXd w(sizes_[l + 1], sizes_[l]);
    Eigen::VectorXd b(sizes_[l + 1]);
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = scale * u(rng);
    for (Eigen::Index i = 0; i < b.size(); ++i) b[i] = scale * u(rng);
    weights_.push_back(std::move(w));
    biases_.push_back(std::move(b));
  }
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd a = x;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    Eigen::MatrixXd z = (weights_[l] * a).colwise() + biases_[l];
    a = activate(l + 1 == weights_.size() ? output_ : hidden_, z);
  }
  return a;
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& x, Cache& cache,
                             double dropout, Rng* rng) const {
  cache.inputs.clear();
  cache.pre.clear();
  cache.masks.clear();
  const bool drop = dropout > 0.0 && rng != nullptr;
  std::bernoulli_distribution keep(1.0 - dropout);
  Eigen::MatrixXd a = x;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    cache.inputs.push_back(a);
    Eigen::MatrixXd z = (weights_[l] * a).colwise() + biases_[l];
    const bool last = l + 1 == weights_.size();
    a = activate(last ? output_ : hidden_, z);
    cache.pre.push_back(std::move(z));
    if (!last) {
      Eigen::MatrixXd mask = Eigen::MatrixXd::Ones(a.rows(), a.cols());
      if (drop) {
        const double scale = 1.0 / (1.0 - dropout);
        for (Eigen::Index i = 0; i < mask.size(); ++i) {
          mask.data()[i] = keep(*rng) ? scale : 0.0;
        }
        a = a.cwiseProduct(mask);
      }
      cache.masks.push_back(std::move(mask));
    }
  }
  return a;
}

Gradients Mlp::backward(const Cache& cache, const Eigen::MatrixXd& grad_out,
                        Eigen::MatrixXd* grad_in) const {
  const std::size_t n = weights_.size();
  Gradients g;
  g.weights.resize(n);
  g.biases.resize(n);
  Eigen::MatrixXd delta = grad_out;
  for (std::size_t l = n; l-- > 0;) {
    const bool last = l + 1 == n;
    if (!last) delta = delta.cwiseProduct(cache.masks[l]);
    delta = delta.cwiseProduct(derivative(last ? output_ : hidden_, cache.pre[l]));
    g.weights[l] = delta * cache.inputs[l].transpose();
    g.biases[l] = delta.rowwise().sum();
    if (l > 0 || grad_in != nullptr) {
      Eigen::MatrixXd next = weights_[l].transpose() * delta;
      delta = std::move(next);
    }
  }
  if (grad_in != nullptr) *grad_in = std::move(delta);
  return g;
}

void Mlp::soft_update(const Mlp& source, double tau) {
  if (source.sizes_ != sizes_) throw std::invalid_argument("shape mismatch");
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    weights_[l] = tau * source.weights_[l] + (1.0 - tau) * weights_[l];
    biases_[l] = tau * source.biases_[l] + (1.0 - tau) * biases_[l];
  }
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    n += static_cast<std::size_t>(weights_[l].size() + biases_[l].size());
  }
  return n;
}

bool Mlp::finite() const {
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    if (!weights_[l].allFinite() || !biases_[l].allFinite()) return false;
  }
  return true;
}

Adam::Adam(const Mlp& net, AdamParams params) : params_(params) {
  for (std::size_t l = 0; l < net.layers(); ++l) {
    const auto& w = net.weights()[l];
    const auto& b = net.biases()[l];
    m_.weights.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
    v_.weights.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
    m_.biases.push_back(Eigen::VectorXd::Zero(b.size()));
    v_.biases.push_back(Eigen::VectorXd::Zero(b.size()));
  }
}

void Adam::step(Mlp& net, const Gradients& grad) {
  ++t_;
  const double b1 = params_.beta1;
  const double b2 = params_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  const double lr = params_.learning_rate;
  const double eps = params_.epsilon;
  auto apply = [&](auto& param, auto& m, auto& v, const auto& g) {
    m = b1 * m + (1.0 - b1) * g;
    v = b2 * v + (1.0 - b2) * g.cwiseProduct(g);
    param.array() -=
        lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
  };
  for (std::size_t l = 0; l < net.layers(); ++l) {
    apply(net.weights()[l], m_.weights[l], v_.weights[l], grad.weights[l]);
    apply(net.biases()[l], m_.biases[l], v_.biases[l], grad.biases[l]);
  }
}

}  // namespace mmsched
