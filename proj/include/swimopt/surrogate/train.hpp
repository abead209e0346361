// Copyright 2026 The swimopt Authors
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

// Mini-batch gradient descent with momentum on the composite force loss.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <vector>

#include "swimopt/errors.hpp"
#include "swimopt/surrogate/dataset.hpp"
#include "swimopt/surrogate/network.hpp"

namespace swimopt::surrogate {

struct TrainConfig {
  double learning_rate = 0.01;
  double momentum = 0.9;
  std::size_t batch_size = 64;
  std::size_t epochs = 20;
  std::uint64_t seed = 1;
  LossWeights weights;
  std::size_t depth = 3;
  std::size_t width = 256;
};

struct EpochStats {
  std::size_t epoch = 0;
  double train_loss = 0.0;  // mean of the epoch's mini-batch losses
  double test_loss = 0.0;
  double mse_part = 0.0;  // unweighted test components
  double cos_part = 0.0;

  friend bool operator==(const EpochStats&, const EpochStats&) = default;
};

inline constexpr std::size_t kEvalBatch = 256;

/// Mean loss of `net` over the listed samples.
inline LossBreakdown evaluate(const SurrogateNetwork& net, const ForceDataset& data, std::span<const std::size_t> idx,
                              const LossWeights& w) {
  LossBreakdown sum;
  Eigen::MatrixXd x, t;
  for (std::size_t start = 0; start < idx.size(); start += kEvalBatch) {
    const auto chunk = idx.subspan(start, std::min(kEvalBatch, idx.size() - start));
    data.batch(chunk, x, t);
    const auto l = loss_and_gradient(net, x, t, w);
    const double n = static_cast<double>(chunk.size());
    sum.total += l.total * n;
    sum.mse += l.mse * n;
    sum.cos += l.cos * n;
  }
  const double inv = idx.empty() ? 0.0 : 1.0 / static_cast<double>(idx.size());
  return {sum.total * inv, sum.mse * inv, sum.cos * inv};
}

/// Loss of always predicting the training-split mean force field, on the test split.
inline LossBreakdown mean_predictor_loss(const ForceDataset& data, const LossWeights& w) {
  LossBreakdown sum;
  const Eigen::VectorXd& mean = data.target_scaler.mean;
  const std::span<const double> pred(mean.data(), kOutputDim);
  const std::span<const double> scale(data.target_scaler.scale.data(), kOutputDim);
  for (std::size_t i : data.test) {
    const auto l = force_loss(pred, data.target(i), w, scale);
    sum.total += l.total;
    sum.mse += l.mse;
    sum.cos += l.cos;
  }
  const double inv = data.test.empty() ? 0.0 : 1.0 / static_cast<double>(data.test.size());
  return {sum.total * inv, sum.mse * inv, sum.cos * inv};
}

/// Fresh network sized for the dataset with its standardizers attached.
inline SurrogateNetwork make_network(const ForceDataset& data, const TrainConfig& cfg) {
  SurrogateNetwork net({kInputDim, kOutputDim, cfg.depth, cfg.width}, cfg.seed);
  net.set_scalers(data.input_scaler, data.target_scaler);
  return net;
}

/// Trains in place and returns one EpochStats per epoch. Deterministic for a
/// fixed config and dataset. Throws DivergenceError when an epoch's train
/// loss exceeds 10x the first mini-batch loss.
inline std::vector<EpochStats> train(SurrogateNetwork& net, const ForceDataset& data, const TrainConfig& cfg) {
  if (data.train.empty() || data.test.empty()) throw DomainError("train: both splits must be non-empty");
  if (cfg.batch_size == 0) throw DomainError("train: batch size must be positive");
  if (!(cfg.learning_rate >= 0.0) || !(cfg.momentum >= 0.0 && cfg.momentum < 1.0)) {
    throw DomainError("train: bad learning rate or momentum");
  }
  std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<std::size_t> order = data.train;
  ParamBuffer grad(net.parameter_count());
  ParamBuffer velocity(net.parameter_count(), 0.0);
  std::vector<EpochStats> history;
  double initial = -1.0;
  Eigen::MatrixXd x, t;
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::span<const std::size_t> chunk(order.data() + start, std::min(cfg.batch_size, order.size() - start));
      data.batch(chunk, x, t);
      std::fill(grad.begin(), grad.end(), 0.0);
      const auto l = loss_and_gradient(net, x, t, cfg.weights, grad);
      if (initial < 0.0) initial = l.total;
      loss_sum += l.total * static_cast<double>(chunk.size());
      auto p = net.params();
      for (std::size_t k = 0; k < p.size(); ++k) {
        velocity[k] = cfg.momentum * velocity[k] - cfg.learning_rate * grad[k];
        p[k] += velocity[k];
      }
    }
    EpochStats st;
    st.epoch = epoch;
    st.train_loss = loss_sum / static_cast<double>(order.size());
    if (!std::isfinite(st.train_loss) || st.train_loss > 10.0 * initial) {
      throw DivergenceError("training diverged at epoch " + std::to_string(epoch));
    }
    const auto test = evaluate(net, data, data.test, cfg.weights);
    st.test_loss = test.total;
    st.mse_part = test.mse;
    st.cos_part = test.cos;
    history.push_back(st);
    net.set_trained(true);
  }
  return history;
}

}  // namespace swimopt::surrogate
