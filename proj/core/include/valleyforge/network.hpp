// Copyright 2026 The ValleyForge Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// HSC-AttentionNet: causal temporal convolutions, an LSTM over the
// convolved sequence, additive attention pooling over the hidden states and
// one sigmoid output per disease label.
//
// A tabular row of D' selected features is read as a length-D' sequence
// with a single input channel, in column order.
//
//   u      = ReLU(causal_conv_L(... ReLU(causal_conv_1(x)) ...))   T x C
//   i,f,o  = sigmoid(W u_t + U h_{t-1} + b),  g = tanh(...)
//   c_t    = f * c_{t-1} + i * g,   h_t = o * tanh(c_t)
//   e_t    = v_a . tanh(W_a h_t),   alpha = softmax(e)
//   z      = sum_t alpha_t h_t
//   y_hat  = sigmoid(W_h z + b_h)
//
// Forward, backward (BPTT) and the mini-batch SGD loop are implemented here
// without external numeric libraries.

#ifndef VALLEYFORGE_NETWORK_HPP_
#define VALLEYFORGE_NETWORK_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "valleyforge/dataio.hpp"
#include "valleyforge/matrix.hpp"

namespace valleyforge {

struct NetConfig {
  std::size_t input_len = 1;  // D', number of selected features
  std::size_t conv_layers = 2;
  std::size_t channels = 4;
  std::size_t kernel = 3;
  std::size_t hidden = 16;
  std::size_t attention_dim = 8;
  std::size_t outputs = 1;
  double learning_rate = 0.05;
  std::size_t batch_size = 16;
  std::size_t epochs = 200;
  std::uint64_t seed = 0;
  double clip_eps = 1e-7;
  // Parameters start uniform in [-init_scale, init_scale]. At 0.1 plain SGD
  // sits on the near-zero saddle for hundreds of epochs at these widths.
  double init_scale = 0.5;

  // Throws ConfigInvalid.
  void validate() const;
  bool same_shape(const NetConfig& other) const noexcept;
  bool operator==(const NetConfig&) const = default;
};

// Named contiguous slice of the flat parameter vector.
struct ParamGroup {
  std::string name;
  std::size_t offset;
  std::size_t size;
};

// All trainable values of the network in one flat vector. Gradients use the
// same type and layout.
//
// Group order: conv{l}.weight [C][C_in][k], conv{l}.bias [C]; lstm.W_{f,i,o,g}
// [H][C]; lstm.U_{f,i,o,g} [H][H]; lstm.b_{f,i,o,g} [H]; attn.W_a [A][H];
// attn.v_a [A]; head.W_h [K][H]; head.b_h [K].
class NetParams {
 public:
  NetParams() = default;
  explicit NetParams(const NetConfig& config);  // all zeros

  const NetConfig& config() const noexcept { return config_; }
  const std::vector<ParamGroup>& groups() const noexcept { return groups_; }
  const ParamGroup& group(const std::string& name) const;

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> group_values(const std::string& name);
  std::span<const double> group_values(const std::string& name) const;
  std::size_t size() const noexcept { return values_.size(); }

  // Hash of the values; used to detect traces from other parameters.
  std::uint64_t fingerprint() const noexcept;

  bool operator==(const NetParams& other) const {
    return config_.same_shape(other.config_) && values_ == other.values_;
  }

 private:
  NetConfig config_;
  std::vector<ParamGroup> groups_;
  std::vector<double> values_;
};

struct ForwardTrace {
  std::uint64_t params_fingerprint = 0;
  std::vector<double> input;                   // T
  std::vector<std::vector<double>> conv_pre;   // per layer, T*C
  std::vector<std::vector<double>> conv_out;   // per layer, T*C
  std::vector<double> gate_f, gate_i, gate_o, gate_g;  // T*H
  std::vector<double> cell, cell_tanh, hidden;         // T*H
  std::vector<double> attn_hidden;             // T*A, tanh(W_a h_t)
  std::vector<double> attn_logits;             // T, e_t
  std::vector<double> attn_weights;            // T, alpha_t
  std::vector<double> pooled;                  // H, z
  std::vector<double> logits;                  // K
  std::vector<double> output;                  // K, y_hat
};

NetParams init_params(const NetConfig& config);

// Returns y_hat (K values) and fills trace. Throws ShapeMismatch.
std::vector<double> forward(std::span<const double> x, const NetParams& params,
                            const NetConfig& config, ForwardTrace& trace);

// Mean binary cross-entropy over all B*K entries, probabilities clamped to
// [clip_eps, 1 - clip_eps].
double loss(const Matrix& predicted, const Matrix& target, double clip_eps = 1e-7);

// dL/dy_hat of one entry, (y_hat - y) / (y_hat (1 - y_hat)), with the clamp
// applied to y_hat.
double bce_derivative(double predicted, double target, double clip_eps = 1e-7);

// Gradient of the single-sample loss (mean over the K heads) with respect
// to every parameter. Throws StaleTrace if the trace came from different
// parameter values.
NetParams backward(const ForwardTrace& trace, std::span<const double> target,
                   const NetParams& params);

// d y_hat[head] / d x, the input saliency of one output.
std::vector<double> input_gradient(const ForwardTrace& trace, const NetParams& params,
                                   std::size_t head);

void sgd_update(std::span<double> theta, std::span<const double> gradient, double eta);
NetParams sgd_step(const NetParams& params, const NetParams& gradient, double eta);

struct TrainResult {
  NetParams params;
  std::vector<double> loss_curve;  // mean training loss per epoch
};

TrainResult train(const RecordTable& table, const NetConfig& config);

Matrix predict_proba(const RecordTable& table, const NetParams& params,
                     const NetConfig& config);

// Single dense layer + sigmoid, trained with the same loss and update
// primitives. Used as the cheap wrapper model during feature selection.
struct LinearModel {
  std::size_t inputs = 0;
  std::size_t outputs = 0;
  std::vector<double> weights;  // outputs x inputs, then outputs biases

  Matrix predict(const Matrix& features) const;
};

struct LinearTrainConfig {
  std::size_t epochs = 20;
  std::size_t batch_size = 32;
  double learning_rate = 0.1;
  std::uint64_t seed = 0;
  double clip_eps = 1e-7;
};

LinearModel train_linear(const Matrix& features, const Matrix& labels,
                         const LinearTrainConfig& config);

}  // namespace valleyforge

#endif  // VALLEYFORGE_NETWORK_HPP_
