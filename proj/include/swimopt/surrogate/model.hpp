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

// Trained surrogate wrapped as a ForceModel, and the weights file format.
//
// Weights file (little-endian):
//   char[8]  magic "SWIMNET1"
//   u32      format version (1)
//   u32      trained flag
//   u64      input_dim, output_dim, depth, width
//   f64[in]  input mean,  f64[in]  input scale
//   f64[out] output mean, f64[out] output scale
//   f64[...] parameters: per layer row-major weights then biases,
//            hidden layers first, output layer last

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "swimopt/errors.hpp"
#include "swimopt/hydro.hpp"
#include "swimopt/surrogate/dataset.hpp"
#include "swimopt/surrogate/network.hpp"

namespace swimopt::surrogate {

inline constexpr char kWeightsMagic[8] = {'S', 'W', 'I', 'M', 'N', 'E', 'T', '1'};
inline constexpr std::uint32_t kWeightsVersion = 1;

namespace detail {

template <typename T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
inline void put_doubles(std::ostream& os, const double* p, std::size_t n) {
  os.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(n * sizeof(double)));
}
template <typename T>
T get(std::istream& is) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof(T))) throw ConfigError("weights file truncated");
  return v;
}
inline void get_doubles(std::istream& is, double* p, std::size_t n) {
  if (!is.read(reinterpret_cast<char*>(p), static_cast<std::streamsize>(n * sizeof(double)))) {
    throw ConfigError("weights file truncated");
  }
}

}  // namespace detail

inline void write_weights(const SurrogateNetwork& net, std::ostream& os) {
  os.write(kWeightsMagic, sizeof(kWeightsMagic));
  detail::put(os, kWeightsVersion);
  detail::put(os, static_cast<std::uint32_t>(net.trained() ? 1 : 0));
  const auto& s = net.shape();
  for (std::uint64_t v : {s.input_dim, s.output_dim, s.depth, s.width}) detail::put(os, v);
  detail::put_doubles(os, net.input_scaler().mean.data(), s.input_dim);
  detail::put_doubles(os, net.input_scaler().scale.data(), s.input_dim);
  detail::put_doubles(os, net.output_scaler().mean.data(), s.output_dim);
  detail::put_doubles(os, net.output_scaler().scale.data(), s.output_dim);
  detail::put_doubles(os, net.params().data(), net.parameter_count());
}

inline void save_weights(const SurrogateNetwork& net, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot write weights file " + path);
  write_weights(net, os);
  if (!os) throw ConfigError("failed writing weights file " + path);
}

/// `path` only labels error messages.
inline SurrogateNetwork read_weights(std::istream& is, const std::string& path) {
  char magic[8];
  if (!is.read(magic, sizeof(magic)) || std::memcmp(magic, kWeightsMagic, sizeof(magic)) != 0) {
    throw ConfigError(path + " is not a surrogate weights file");
  }
  const auto version = detail::get<std::uint32_t>(is);
  if (version != kWeightsVersion) throw ConfigError("unsupported weights version " + std::to_string(version));
  const bool trained = detail::get<std::uint32_t>(is) != 0;
  NetworkShape shape;
  shape.input_dim = detail::get<std::uint64_t>(is);
  shape.output_dim = detail::get<std::uint64_t>(is);
  shape.depth = detail::get<std::uint64_t>(is);
  shape.width = detail::get<std::uint64_t>(is);
  if (shape.input_dim == 0 || shape.input_dim > (1u << 24) || shape.output_dim == 0 || shape.output_dim > (1u << 24) ||
      shape.depth == 0 || shape.depth > 64 || shape.width == 0 || shape.width > (1u << 16)) {
    throw ConfigError("weights file has implausible dimensions");
  }
  Standardizer in{Eigen::VectorXd(shape.input_dim), Eigen::VectorXd(shape.input_dim)};
  Standardizer out{Eigen::VectorXd(shape.output_dim), Eigen::VectorXd(shape.output_dim)};
  detail::get_doubles(is, in.mean.data(), shape.input_dim);
  detail::get_doubles(is, in.scale.data(), shape.input_dim);
  detail::get_doubles(is, out.mean.data(), shape.output_dim);
  detail::get_doubles(is, out.scale.data(), shape.output_dim);
  const SurrogateNetwork probe(shape, 0);
  std::vector<double> params(probe.parameter_count());
  detail::get_doubles(is, params.data(), params.size());
  if (is.peek() != std::char_traits<char>::eof()) throw ConfigError("trailing bytes in weights file " + path);
  return SurrogateNetwork::from_parts(shape, std::move(params), std::move(in), std::move(out), trained);
}

inline SurrogateNetwork load_weights(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open weights file " + path);
  return read_weights(is, path);
}

/// Learned force model: reads the current and three past body-frame
/// outlines, predicts body-frame forces and rotates them into the world
/// frame with the pre-step heading. Rigid-body velocities are not inputs.
class SurrogateForceModel final : public hydro::ForceModel {
 public:
  explicit SurrogateForceModel(std::shared_ptr<const SurrogateNetwork> net) : net_(std::move(net)) {
    if (!net_ || !net_->trained()) throw ConfigError("surrogate force model needs trained weights");
    if (net_->shape().input_dim != kInputDim || net_->shape().output_dim != kOutputDim) {
      throw ConfigError("surrogate weights have wrong input/output dimensions");
    }
  }

  std::size_t history_length() const override { return hydro::kMaxHistory; }

  kin::SurfaceForces compute(const hydro::ForceQuery& q) const override {
    kin::SurfaceForces out;
    compute_batch(std::span<const hydro::ForceQuery>(&q, 1), std::span<kin::SurfaceForces>(&out, 1));
    return out;
  }

  void compute_batch(std::span<const hydro::ForceQuery> queries, std::span<kin::SurfaceForces> out) const override {
    const auto n = static_cast<Eigen::Index>(queries.size());
    Eigen::MatrixXd x(kInputDim, n);
    for (Eigen::Index b = 0; b < n; ++b) {
      const auto& q = queries[static_cast<std::size_t>(b)];
      stack_outlines(q.outlines, std::span<double>(x.col(b).data(), kInputDim));
    }
    net_->input_scaler().normalize_inplace(x);
    const Eigen::MatrixXd y = net_->forward(x);
    for (Eigen::Index b = 0; b < n; ++b) {
      const double h = queries[static_cast<std::size_t>(b)].state->heading;
      const double c = std::cos(h), s = std::sin(h);
      auto& f = out[static_cast<std::size_t>(b)].forces;
      for (std::size_t i = 0; i < kin::kOutlinePoints; ++i) {
        const auto r = static_cast<Eigen::Index>(2 * i);
        f[i] = rotate(Vec2{y(r, b), y(r + 1, b)}, c, s);
      }
    }
  }

  const SurrogateNetwork& network() const { return *net_; }

 private:
  std::shared_ptr<const SurrogateNetwork> net_;
};

}  // namespace swimopt::surrogate
