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

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "mmsched/rng.hpp"

namespace mmsched {

enum class Activation { kRelu, kTanh, kLinear };

struct Gradients {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;

  double norm() const;
};

// Fully connected network. Samples are columns: y = f(W x + b) per layer.
// Dropout, when enabled, is inverted dropout on hidden activations.
class Mlp {
 public:
  struct Cache {
    std::vector<Eigen::MatrixXd> inputs;  // input to each layer
    std::vector<Eigen::MatrixXd> pre;     // pre-activation of each layer
    std::vector<Eigen::MatrixXd> masks;   // scaled dropout masks, hidden only
  };

  Mlp() = default;
  // Hidden weights are uniform in +-1/sqrt(fan_in); the output layer uses
  // +-final_scale.
  Mlp(std::vector<int> sizes, Activation hidden, Activation output, Rng& rng,
      double final_scale = 3e-3);

  Eigen::MatrixXd forward(const Eigen::MatrixXd& x) const;
  Eigen::MatrixXd forward(const Eigen::MatrixXd& x, Cache& cache,
                          double dropout, Rng* rng) const;
  // Gradients of sum(grad_out .* y) with respect to the parameters and,
  // when grad_in is given, the input.
  Gradients backward(const Cache& cache, const Eigen::MatrixXd& grad_out,
                     Eigen::MatrixXd* grad_in = nullptr) const;

  // this <- tau * source + (1 - tau) * this
  void soft_update(const Mlp& source, double tau);

  std::size_t parameter_count() const;
  std::size_t layers() const { return weights_.size(); }
  const std::vector<int>& sizes() const { return sizes_; }
  Activation hidden_activation() const { return hidden_; }
  Activation output_activation() const { return output_; }

  std::vector<Eigen::MatrixXd>& weights() { return weights_; }
  std::vector<Eigen::VectorXd>& biases() { return biases_; }
  const std::vector<Eigen::MatrixXd>& weights() const { return weights_; }
  const std::vector<Eigen::VectorXd>& biases() const { return biases_; }

  bool finite() const;

 private:
  std::vector<int> sizes_;
  Activation hidden_ = Activation::kRelu;
  Activation output_ = Activation::kLinear;
  std::vector<Eigen::MatrixXd> weights_;
  std::vector<Eigen::VectorXd> biases_;
};

struct AdamParams {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

class Adam {
 public:
  Adam() = default;
  Adam(const Mlp& net, AdamParams params);

  // Descends along the gradient.
  void step(Mlp& net, const Gradients& grad);
  long steps() const { return t_; }

 private:
  AdamParams params_;
  long t_ = 0;
  Gradients m_;
  Gradients v_;
};

}  // namespace mmsched
