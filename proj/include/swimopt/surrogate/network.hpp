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

// Feed-forward residual network used as the surface-force surrogate, its
// composite loss and exact reverse-mode gradients.
//
//   h_0 = tanh(W_0 x + b_0)
//   h_l = h_{l-1} + tanh(W_l h_{l-1} + b_l),   l = 1..depth-1
//   z   = W_out h_{depth-1} + b_out
//
// x is the standardized input and z the standardized output; the attached
// Standardizers map to and from physical units.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "swimopt/errors.hpp"

namespace swimopt::surrogate {

using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixMap = Eigen::Map<RowMajorMatrix>;
using ConstMatrixMap = Eigen::Map<const RowMajorMatrix>;
using VectorMap = Eigen::Map<Eigen::VectorXd>;
using ConstVectorMap = Eigen::Map<const Eigen::VectorXd>;

// Parameter-sized buffers that Eigen maps over. A fixed base alignment keeps
// the vectorized kernels on the same code path, hence bitwise reproducible.
using ParamBuffer = std::vector<double, Eigen::aligned_allocator<double>>;

inline constexpr double kVarianceFloor = 1e-9;
inline constexpr double kDirectionEpsilon = 1e-8;

/// Per-feature affine standardization, x_norm = (x - mean) / scale.
struct Standardizer {
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;

  static Standardizer identity(std::size_t dim) {
    return {Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim)), Eigen::VectorXd::Ones(static_cast<Eigen::Index>(dim))};
  }

  /// From accumulated first and second moments over `count` samples.
  static Standardizer from_moments(const Eigen::VectorXd& sum, const Eigen::VectorXd& sum_sq, double count) {
    Standardizer s;
    s.mean = sum / count;
    const Eigen::VectorXd var = (sum_sq / count - s.mean.cwiseProduct(s.mean)).cwiseMax(kVarianceFloor);
    s.scale = var.cwiseSqrt();
    return s;
  }

  std::size_t dim() const { return static_cast<std::size_t>(mean.size()); }

  template <typename Derived>
  void normalize_inplace(Eigen::MatrixBase<Derived>& cols) const {
    cols.colwise() -= mean;
    cols.array().colwise() /= scale.array();
  }
  template <typename Derived>
  void denormalize_inplace(Eigen::MatrixBase<Derived>& cols) const {
    cols.array().colwise() *= scale.array();
    cols.colwise() += mean;
  }

  friend bool operator==(const Standardizer& a, const Standardizer& b) {
    return a.mean.size() == b.mean.size() && a.mean == b.mean && a.scale == b.scale;
  }
};

struct LossWeights {
  double mse = 1.0;
  double cos = 1.0;
};

/// Unweighted components and the weighted total.
struct LossBreakdown {
  double total = 0.0;
  double mse = 0.0;
  double cos = 0.0;
};

/// w_mse * mean(((pred - target) / scale)^2) + w_cos * mean_i(1 - cos(pred_i, target_i))
/// over 2D per-point vectors; points with |target_i| < kDirectionEpsilon are
/// left out of the cosine mean. An empty `scale` means unit scale. When
/// `grad` is non-empty it receives d loss / d pred.
inline LossBreakdown force_loss(std::span<const double> pred, std::span<const double> target, const LossWeights& w,
                                std::span<const double> scale = {}, std::span<double> grad = {}) {
  if (pred.size() != target.size() || pred.size() % 2 != 0) throw DomainError("force_loss: bad dimensions");
  const std::size_t n = pred.size();
  const std::size_t points = n / 2;
  LossBreakdown out;
  double sq = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double inv = scale.empty() ? 1.0 : 1.0 / scale[k];
    const double d = (pred[k] - target[k]) * inv;
    sq += d * d;
    if (!grad.empty()) grad[k] = w.mse * 2.0 * d * inv / static_cast<double>(n);
  }
  out.mse = sq / static_cast<double>(n);

  std::size_t included = 0;
  for (std::size_t i = 0; i < points; ++i) {
    if (std::hypot(target[2 * i], target[2 * i + 1]) >= kDirectionEpsilon) ++included;
  }
  double cos_sum = 0.0;
  for (std::size_t i = 0; i < points && included > 0; ++i) {
    const double gx = target[2 * i], gy = target[2 * i + 1];
    const double gn = std::hypot(gx, gy);
    if (gn < kDirectionEpsilon) continue;
    const double px = pred[2 * i], py = pred[2 * i + 1];
    const double pn = std::hypot(px, py);
    if (pn == 0.0) {
      cos_sum += 1.0;  // undefined direction counts as orthogonal
      continue;
    }
    const double c = (px * gx + py * gy) / (pn * gn);
    cos_sum += 1.0 - std::min(c, 1.0);
    if (!grad.empty()) {
      // d(1 - c)/dp = -(g / (|p||g|) - c p / |p|^2)
      const double f = w.cos / static_cast<double>(included);
      grad[2 * i] -= f * (gx / (pn * gn) - c * px / (pn * pn));
      grad[2 * i + 1] -= f * (gy / (pn * gn) - c * py / (pn * pn));
    }
  }
  out.cos = included > 0 ? cos_sum / static_cast<double>(included) : 0.0;
  out.total = w.mse * out.mse + w.cos * out.cos;
  return out;
}

struct NetworkShape {
  std::size_t input_dim = 0;
  std::size_t output_dim = 0;
  std::size_t depth = 1;  // hidden layers
  std::size_t width = 1;

  friend bool operator==(const NetworkShape&, const NetworkShape&) = default;
};

/// Activations kept from a forward pass for backpropagation.
struct ForwardCache {
  std::vector<Eigen::MatrixXd> hidden;  // h_l, width x batch
  std::vector<Eigen::MatrixXd> act;     // tanh(W_l h + b_l)
  Eigen::MatrixXd output;               // standardized output z
};

class SurrogateNetwork {
 public:
  SurrogateNetwork() = default;

  /// Zero biases; weights ~ N(0, 1/fan_in), residual blocks scaled by 1/2.
  SurrogateNetwork(const NetworkShape& shape, std::uint64_t seed) : shape_(shape) {
    if (shape.input_dim == 0 || shape.output_dim == 0 || shape.output_dim % 2 != 0) {
      throw DomainError("network needs positive input dim and even output dim");
    }
    if (shape.depth < 1 || shape.width < 1) throw DomainError("network depth and width must be >= 1");
    layout();
    params_.assign(total_, 0.0);
    input_scaler_ = Standardizer::identity(shape.input_dim);
    output_scaler_ = Standardizer::identity(shape.output_dim);
    std::mt19937_64 rng(seed);
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      const auto& L = layers_[l];
      double sd = 1.0 / std::sqrt(static_cast<double>(L.cols));
      if (l > 0 && l + 1 < layers_.size()) sd *= 0.5;
      std::normal_distribution<double> normal(0.0, sd);
      for (std::size_t k = 0; k < L.rows * L.cols; ++k) params_[L.w_offset + k] = normal(rng);
    }
  }

  const NetworkShape& shape() const { return shape_; }
  std::size_t parameter_count() const { return total_; }

  /// Flat parameters: per layer, row-major weights then biases; hidden layers first, output last.
  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }

  const Standardizer& input_scaler() const { return input_scaler_; }
  const Standardizer& output_scaler() const { return output_scaler_; }
  void set_scalers(Standardizer in, Standardizer out) {
    if (in.dim() != shape_.input_dim || out.dim() != shape_.output_dim) throw DomainError("scaler dimension mismatch");
    input_scaler_ = std::move(in);
    output_scaler_ = std::move(out);
  }

  bool trained() const { return trained_; }
  void set_trained(bool t) { trained_ = t; }

  /// Standardized input columns -> standardized output columns.
  Eigen::MatrixXd forward_normalized(const Eigen::MatrixXd& x, ForwardCache* cache = nullptr) const {
    check_input(x);
    const std::size_t hidden_layers = shape_.depth;
    ForwardCache local;
    ForwardCache& c = cache ? *cache : local;
    c.hidden.resize(hidden_layers);
    c.act.resize(hidden_layers);
    for (std::size_t l = 0; l < hidden_layers; ++l) {
      const Eigen::MatrixXd& prev = l == 0 ? x : c.hidden[l - 1];
      Eigen::MatrixXd pre = weight(l) * prev;
      pre.colwise() += bias(l);
      c.act[l] = pre.array().tanh().matrix();
      c.hidden[l] = l == 0 ? c.act[l] : Eigen::MatrixXd(prev + c.act[l]);
    }
    c.output.noalias() = weight(hidden_layers) * c.hidden.back();
    c.output.colwise() += bias(hidden_layers);
    if (!cache) return std::move(c.output);
    return c.output;
  }

  /// Standardized input columns -> physical output columns.
  Eigen::MatrixXd forward(const Eigen::MatrixXd& x_normalized) const {
    Eigen::MatrixXd z = forward_normalized(x_normalized);
    output_scaler_.denormalize_inplace(z);
    return z;
  }

  /// Accumulates d loss / d params into `grad` given d loss / d z (standardized output).
  void backward(const Eigen::MatrixXd& x, const ForwardCache& c, const Eigen::MatrixXd& dz_out,
                std::span<double> grad) const {
    if (grad.size() != total_) throw DomainError("gradient buffer size mismatch");
    const std::size_t L = shape_.depth;
    grad_weight(grad, L).noalias() += dz_out * c.hidden[L - 1].transpose();
    grad_bias(grad, L) += dz_out.rowwise().sum();
    Eigen::MatrixXd dh = weight(L).transpose() * dz_out;
    for (std::size_t l = L; l-- > 0;) {
      const Eigen::MatrixXd dpre = (dh.array() * (1.0 - c.act[l].array().square())).matrix();
      const Eigen::MatrixXd& prev = l == 0 ? x : c.hidden[l - 1];
      grad_weight(grad, l).noalias() += dpre * prev.transpose();
      grad_bias(grad, l) += dpre.rowwise().sum();
      if (l > 0) dh += weight(l).transpose() * dpre;  // residual path keeps dh
    }
  }

  ConstMatrixMap weight(std::size_t l) const {
    const auto& L = layers_[l];
    return ConstMatrixMap(params_.data() + L.w_offset, static_cast<Eigen::Index>(L.rows), static_cast<Eigen::Index>(L.cols));
  }
  ConstVectorMap bias(std::size_t l) const {
    const auto& L = layers_[l];
    return ConstVectorMap(params_.data() + L.b_offset, static_cast<Eigen::Index>(L.rows));
  }
  MatrixMap weight(std::size_t l) {
    const auto& L = layers_[l];
    return MatrixMap(params_.data() + L.w_offset, static_cast<Eigen::Index>(L.rows), static_cast<Eigen::Index>(L.cols));
  }
  VectorMap bias(std::size_t l) {
    const auto& L = layers_[l];
    return VectorMap(params_.data() + L.b_offset, static_cast<Eigen::Index>(L.rows));
  }
  std::size_t layer_count() const { return layers_.size(); }

  friend bool operator==(const SurrogateNetwork& a, const SurrogateNetwork& b) {
    return a.shape_ == b.shape_ && a.params_ == b.params_ && a.input_scaler_ == b.input_scaler_ &&
           a.output_scaler_ == b.output_scaler_ && a.trained_ == b.trained_;
  }

  /// Rebuild from stored parts (weights file).
  static SurrogateNetwork from_parts(const NetworkShape& shape, std::span<const double> params, Standardizer in,
                                     Standardizer out, bool trained) {
    SurrogateNetwork n(shape, 0);
    if (params.size() != n.total_) throw DomainError("parameter count mismatch");
    n.params_.assign(params.begin(), params.end());
    n.set_scalers(std::move(in), std::move(out));
    n.trained_ = trained;
    return n;
  }

 private:
  struct LayerSpan {
    std::size_t rows, cols, w_offset, b_offset;
  };

  void layout() {
    layers_.clear();
    std::size_t off = 0;
    auto add = [&](std::size_t rows, std::size_t cols) {
      layers_.push_back({rows, cols, off, off + rows * cols});
      off += rows * cols + rows;
    };
    add(shape_.width, shape_.input_dim);
    for (std::size_t l = 1; l < shape_.depth; ++l) add(shape_.width, shape_.width);
    add(shape_.output_dim, shape_.width);
    total_ = off;
  }

  void check_input(const Eigen::MatrixXd& x) const {
    if (static_cast<std::size_t>(x.rows()) != shape_.input_dim) {
      throw DomainError("network input has " + std::to_string(x.rows()) + " rows, expected " +
                        std::to_string(shape_.input_dim));
    }
  }

  MatrixMap grad_weight(std::span<double> g, std::size_t l) const {
    const auto& L = layers_[l];
    return MatrixMap(g.data() + L.w_offset, static_cast<Eigen::Index>(L.rows), static_cast<Eigen::Index>(L.cols));
  }
  VectorMap grad_bias(std::span<double> g, std::size_t l) const {
    const auto& L = layers_[l];
    return VectorMap(g.data() + L.b_offset, static_cast<Eigen::Index>(L.rows));
  }

  NetworkShape shape_;
  std::vector<LayerSpan> layers_;
  std::size_t total_ = 0;
  ParamBuffer params_;
  Standardizer input_scaler_;
  Standardizer output_scaler_;
  bool trained_ = false;
};

/// Batch loss (mean over columns) for standardized inputs and physical
/// targets; adds the parameter gradient into `grad` when it is non-empty.
inline LossBreakdown loss_and_gradient(const SurrogateNetwork& net, const Eigen::MatrixXd& x_normalized,
                                       const Eigen::MatrixXd& targets, const LossWeights& w,
                                       std::span<double> grad = {}) {
  ForwardCache cache;
  net.forward_normalized(x_normalized, &cache);
  Eigen::MatrixXd pred = cache.output;
  net.output_scaler().denormalize_inplace(pred);
  const auto batch = pred.cols();
  const std::size_t out_dim = net.shape().output_dim;
  const Eigen::VectorXd& scale = net.output_scaler().scale;
  std::span<const double> scale_span(scale.data(), out_dim);
  Eigen::MatrixXd dz(pred.rows(), batch);
  LossBreakdown total;
  for (Eigen::Index b = 0; b < batch; ++b) {
    std::span<double> g = grad.empty() ? std::span<double>{} : std::span<double>(dz.col(b).data(), out_dim);
    const auto l = force_loss(std::span<const double>(pred.col(b).data(), out_dim),
                              std::span<const double>(targets.col(b).data(), out_dim), w, scale_span, g);
    total.total += l.total;
    total.mse += l.mse;
    total.cos += l.cos;
  }
  const double inv = 1.0 / static_cast<double>(batch);
  total.total *= inv;
  total.mse *= inv;
  total.cos *= inv;
  if (!grad.empty()) {
    // chain through denormalization, then average over the batch
    dz.array().colwise() *= scale.array();
    dz *= inv;
    net.backward(x_normalized, cache, dz, grad);
  }
  return total;
}

}  // namespace swimopt::surrogate
