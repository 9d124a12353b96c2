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

#include "valleyforge/network.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <numeric>

#include "valleyforge/error.hpp"
#include "valleyforge/rng.hpp"

namespace valleyforge {

namespace {

constexpr std::array<const char*, 4> kGateNames = {"f", "i", "o", "g"};
enum Gate { kF = 0, kI = 1, kO = 2, kG = 3 };

// Resolved offsets of every group for the hot loops.
struct Layout {
  std::size_t T, L, C, k, H, A, K;
  std::vector<std::size_t> conv_w, conv_b, conv_in;
  std::array<std::size_t, 4> W, U, b;
  std::size_t Wa, va, Wh, bh, total;

  explicit Layout(const NetConfig& c)
      : T(c.input_len), L(c.conv_layers), C(c.channels), k(c.kernel), H(c.hidden),
        A(c.attention_dim), K(c.outputs) {
    std::size_t off = 0;
    for (std::size_t l = 0; l < L; ++l) {
      const std::size_t cin = l == 0 ? 1 : C;
      conv_in.push_back(cin);
      conv_w.push_back(off);
      off += C * cin * k;
      conv_b.push_back(off);
      off += C;
    }
    for (int g = 0; g < 4; ++g) W[g] = off, off += H * C;
    for (int g = 0; g < 4; ++g) U[g] = off, off += H * H;
    for (int g = 0; g < 4; ++g) b[g] = off, off += H;
    Wa = off, off += A * H;
    va = off, off += A;
    Wh = off, off += K * H;
    bh = off, off += K;
    total = off;
  }
};

inline double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

void check_shape(const NetParams& params, const NetConfig& config) {
  if (!params.config().same_shape(config) || params.size() != Layout(config).total)
    fail(ErrorCode::ShapeMismatch, "parameters were built for a different network shape");
}

void resize_trace(ForwardTrace& tr, const Layout& ly) {
  tr.input.resize(ly.T);
  tr.conv_pre.resize(ly.L);
  tr.conv_out.resize(ly.L);
  for (std::size_t l = 0; l < ly.L; ++l) {
    tr.conv_pre[l].resize(ly.T * ly.C);
    tr.conv_out[l].resize(ly.T * ly.C);
  }
  for (auto* v : {&tr.gate_f, &tr.gate_i, &tr.gate_o, &tr.gate_g, &tr.cell, &tr.cell_tanh,
                  &tr.hidden})
    v->resize(ly.T * ly.H);
  tr.attn_hidden.resize(ly.T * ly.A);
  tr.attn_logits.resize(ly.T);
  tr.attn_weights.resize(ly.T);
  tr.pooled.resize(ly.H);
  tr.logits.resize(ly.K);
  tr.output.resize(ly.K);
}

void forward_unchecked(std::span<const double> x, std::span<const double> p, const Layout& ly,
                       ForwardTrace& tr) {
  resize_trace(tr, ly);
  std::copy(x.begin(), x.end(), tr.input.begin());
  const std::size_t T = ly.T, C = ly.C, H = ly.H, A = ly.A, K = ly.K, k = ly.k;

  // Causal convolutions, left zero padding of k-1.
  const double* in = tr.input.data();
  std::size_t cin = 1;
  for (std::size_t l = 0; l < ly.L; ++l) {
    const double* w = p.data() + ly.conv_w[l];
    const double* bias = p.data() + ly.conv_b[l];
    double* pre = tr.conv_pre[l].data();
    double* out = tr.conv_out[l].data();
    for (std::size_t t = 0; t < T; ++t) {
      for (std::size_t co = 0; co < C; ++co) {
        double s = bias[co];
        for (std::size_t j = 0; j < k; ++j) {
          if (t + j < k - 1) continue;
          const std::size_t src = t + j - (k - 1);
          for (std::size_t ci = 0; ci < cin; ++ci)
            s += w[(co * cin + ci) * k + j] * in[src * cin + ci];
        }
        pre[t * C + co] = s;
        out[t * C + co] = s > 0.0 ? s : 0.0;
      }
    }
    in = out;
    cin = C;
  }

  // LSTM.
  std::vector<double> a(4 * H);
  for (std::size_t t = 0; t < T; ++t) {
    const double* u = in + t * C;
    const double* h_prev = t > 0 ? tr.hidden.data() + (t - 1) * H : nullptr;
    for (int g = 0; g < 4; ++g) {
      const double* Wg = p.data() + ly.W[g];
      const double* Ug = p.data() + ly.U[g];
      const double* bg = p.data() + ly.b[g];
      for (std::size_t r = 0; r < H; ++r) {
        double s = bg[r];
        const double* wr = Wg + r * C;
        for (std::size_t c = 0; c < C; ++c) s += wr[c] * u[c];
        if (h_prev) {
          const double* ur = Ug + r * H;
          for (std::size_t c = 0; c < H; ++c) s += ur[c] * h_prev[c];
        }
        a[g * H + r] = s;
      }
    }
    for (std::size_t r = 0; r < H; ++r) {
      const std::size_t idx = t * H + r;
      const double f = sigmoid(a[kF * H + r]);
      const double i = sigmoid(a[kI * H + r]);
      const double o = sigmoid(a[kO * H + r]);
      const double g = std::tanh(a[kG * H + r]);
      const double c_prev = t > 0 ? tr.cell[idx - H] : 0.0;
      const double c = f * c_prev + i * g;
      const double tc = std::tanh(c);
      tr.gate_f[idx] = f;
      tr.gate_i[idx] = i;
      tr.gate_o[idx] = o;
      tr.gate_g[idx] = g;
      tr.cell[idx] = c;
      tr.cell_tanh[idx] = tc;
      tr.hidden[idx] = o * tc;
    }
  }

  // Additive attention pooling.
  const double* Wa = p.data() + ly.Wa;
  const double* va = p.data() + ly.va;
  double max_e = -INFINITY;
  for (std::size_t t = 0; t < T; ++t) {
    const double* h = tr.hidden.data() + t * H;
    double e = 0.0;
    for (std::size_t r = 0; r < A; ++r) {
      double s = 0.0;
      for (std::size_t c = 0; c < H; ++c) s += Wa[r * H + c] * h[c];
      const double m = std::tanh(s);
      tr.attn_hidden[t * A + r] = m;
      e += va[r] * m;
    }
    tr.attn_logits[t] = e;
    max_e = std::max(max_e, e);
  }
  double denom = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    tr.attn_weights[t] = std::exp(tr.attn_logits[t] - max_e);
    denom += tr.attn_weights[t];
  }
  std::fill(tr.pooled.begin(), tr.pooled.end(), 0.0);
  for (std::size_t t = 0; t < T; ++t) {
    tr.attn_weights[t] /= denom;
    const double* h = tr.hidden.data() + t * H;
    for (std::size_t c = 0; c < H; ++c) tr.pooled[c] += tr.attn_weights[t] * h[c];
  }

  // Sigmoid heads.
  const double* Wh = p.data() + ly.Wh;
  const double* bh = p.data() + ly.bh;
  for (std::size_t j = 0; j < K; ++j) {
    double s = bh[j];
    for (std::size_t c = 0; c < H; ++c) s += Wh[j * H + c] * tr.pooled[c];
    tr.logits[j] = s;
    tr.output[j] = sigmoid(s);
  }
}

// Reverse pass from d(loss)/d(logits). Gradients are accumulated into grad
// (when non-empty) and the input gradient written to dx (when non-empty).
void backprop(const ForwardTrace& tr, std::span<const double> dlogits,
              std::span<const double> p, const Layout& ly, std::span<double> grad,
              std::span<double> dx) {
  const std::size_t T = ly.T, C = ly.C, H = ly.H, A = ly.A, K = ly.K, k = ly.k;
  const bool want_grad = !grad.empty();
  double* G = grad.data();

  // Head.
  std::vector<double> dz(H, 0.0);
  const double* Wh = p.data() + ly.Wh;
  for (std::size_t j = 0; j < K; ++j) {
    const double d = dlogits[j];
    if (d == 0.0) continue;
    if (want_grad) {
      for (std::size_t c = 0; c < H; ++c) G[ly.Wh + j * H + c] += d * tr.pooled[c];
      G[ly.bh + j] += d;
    }
    for (std::size_t c = 0; c < H; ++c) dz[c] += d * Wh[j * H + c];
  }

  // Attention.
  std::vector<double> dh(T * H, 0.0);
  std::vector<double> dalpha(T);
  double weighted = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    const double* h = tr.hidden.data() + t * H;
    double s = 0.0;
    for (std::size_t c = 0; c < H; ++c) {
      s += dz[c] * h[c];
      dh[t * H + c] = tr.attn_weights[t] * dz[c];
    }
    dalpha[t] = s;
    weighted += tr.attn_weights[t] * s;
  }
  const double* Wa = p.data() + ly.Wa;
  const double* va = p.data() + ly.va;
  std::vector<double> dpre(A);
  for (std::size_t t = 0; t < T; ++t) {
    const double de = tr.attn_weights[t] * (dalpha[t] - weighted);
    const double* m = tr.attn_hidden.data() + t * A;
    const double* h = tr.hidden.data() + t * H;
    for (std::size_t r = 0; r < A; ++r) {
      if (want_grad) G[ly.va + r] += de * m[r];
      dpre[r] = de * va[r] * (1.0 - m[r] * m[r]);
    }
    for (std::size_t r = 0; r < A; ++r) {
      if (dpre[r] == 0.0) continue;
      if (want_grad)
        for (std::size_t c = 0; c < H; ++c) G[ly.Wa + r * H + c] += dpre[r] * h[c];
      for (std::size_t c = 0; c < H; ++c) dh[t * H + c] += dpre[r] * Wa[r * H + c];
    }
  }

  // LSTM, backprop through time.
  const double* u_all = ly.L > 0 ? tr.conv_out[ly.L - 1].data() : tr.input.data();
  std::vector<double> du(T * C, 0.0);
  std::vector<double> dh_next(H, 0.0), dc_next(H, 0.0);
  std::vector<double> da(4 * H);
  for (std::size_t tt = T; tt-- > 0;) {
    for (std::size_t r = 0; r < H; ++r) {
      const std::size_t idx = tt * H + r;
      const double dht = dh[idx] + dh_next[r];
      const double f = tr.gate_f[idx], i = tr.gate_i[idx], o = tr.gate_o[idx],
                   g = tr.gate_g[idx], tc = tr.cell_tanh[idx];
      const double c_prev = tt > 0 ? tr.cell[idx - H] : 0.0;
      const double dc = dc_next[r] + dht * o * (1.0 - tc * tc);
      da[kO * H + r] = dht * tc * o * (1.0 - o);
      da[kI * H + r] = dc * g * i * (1.0 - i);
      da[kG * H + r] = dc * i * (1.0 - g * g);
      da[kF * H + r] = dc * c_prev * f * (1.0 - f);
      dc_next[r] = dc * f;
    }
    const double* u = u_all + tt * C;
    const double* h_prev = tt > 0 ? tr.hidden.data() + (tt - 1) * H : nullptr;
    std::fill(dh_next.begin(), dh_next.end(), 0.0);
    for (int g = 0; g < 4; ++g) {
      const double* Wg = p.data() + ly.W[g];
      const double* Ug = p.data() + ly.U[g];
      for (std::size_t r = 0; r < H; ++r) {
        const double d = da[g * H + r];
        if (d == 0.0) continue;
        if (want_grad) {
          for (std::size_t c = 0; c < C; ++c) G[ly.W[g] + r * C + c] += d * u[c];
          G[ly.b[g] + r] += d;
        }
        for (std::size_t c = 0; c < C; ++c) du[tt * C + c] += d * Wg[r * C + c];
        if (h_prev) {
          if (want_grad)
            for (std::size_t c = 0; c < H; ++c) G[ly.U[g] + r * H + c] += d * h_prev[c];
          for (std::size_t c = 0; c < H; ++c) dh_next[c] += d * Ug[r * H + c];
        }
      }
    }
  }

  // Convolutions, last layer first.
  std::vector<double> dout = std::move(du);
  for (std::size_t l = ly.L; l-- > 0;) {
    const std::size_t cin = ly.conv_in[l];
    const double* in = l == 0 ? tr.input.data() : tr.conv_out[l - 1].data();
    const double* w = p.data() + ly.conv_w[l];
    const double* pre = tr.conv_pre[l].data();
    std::vector<double> din(T * cin, 0.0);
    for (std::size_t t = 0; t < T; ++t) {
      for (std::size_t co = 0; co < C; ++co) {
        const double d = pre[t * C + co] > 0.0 ? dout[t * C + co] : 0.0;
        if (d == 0.0) continue;
        if (want_grad) G[ly.conv_b[l] + co] += d;
        for (std::size_t j = 0; j < k; ++j) {
          if (t + j < k - 1) continue;
          const std::size_t src = t + j - (k - 1);
          for (std::size_t ci = 0; ci < cin; ++ci) {
            const std::size_t wi = (co * cin + ci) * k + j;
            if (want_grad) G[ly.conv_w[l] + wi] += d * in[src * cin + ci];
            din[src * cin + ci] += d * w[wi];
          }
        }
      }
    }
    dout = std::move(din);
  }
  if (!dx.empty()) std::copy(dout.begin(), dout.end(), dx.begin());
}

// dL/dlogit for the per-sample loss averaged over K heads. Zero where the
// clamp is active, matching the derivative of the clamped loss.
void loss_logit_gradient(const ForwardTrace& tr, std::span<const double> target,
                         double clip_eps, std::span<double> dlogits) {
  const double K = static_cast<double>(tr.output.size());
  for (std::size_t j = 0; j < tr.output.size(); ++j) {
    const double yh = tr.output[j];
    dlogits[j] = (yh < clip_eps || yh > 1.0 - clip_eps) ? 0.0 : (yh - target[j]) / K;
  }
}

double sample_loss(std::span<const double> predicted, std::span<const double> target,
                   double clip_eps) {
  double s = 0.0;
  for (std::size_t j = 0; j < predicted.size(); ++j) {
    const double p = std::clamp(predicted[j], clip_eps, 1.0 - clip_eps);
    s += target[j] * std::log(p) + (1.0 - target[j]) * std::log(1.0 - p);
  }
  return -s;
}

}  // namespace

void NetConfig::validate() const {
  auto need = [](bool ok, const char* what) {
    if (!ok) fail(ErrorCode::ConfigInvalid, std::string("network config: ") + what);
  };
  need(input_len >= 1, "input_len must be >= 1");
  need(conv_layers >= 1, "conv_layers must be >= 1");
  need(channels >= 1, "channels must be >= 1");
  need(kernel >= 1, "kernel must be >= 1");
  need(hidden >= 1, "hidden must be >= 1");
  need(attention_dim >= 1, "attention_dim must be >= 1");
  need(outputs >= 1, "outputs must be >= 1");
  need(learning_rate > 0.0 && std::isfinite(learning_rate), "learning_rate must be > 0");
  need(batch_size >= 1, "batch_size must be >= 1");
  need(clip_eps > 0.0 && clip_eps < 0.5, "clip_eps must lie in (0, 0.5)");
  need(init_scale >= 0.0 && std::isfinite(init_scale), "init_scale must be >= 0");
}

bool NetConfig::same_shape(const NetConfig& o) const noexcept {
  return input_len == o.input_len && conv_layers == o.conv_layers && channels == o.channels &&
         kernel == o.kernel && hidden == o.hidden && attention_dim == o.attention_dim &&
         outputs == o.outputs;
}

NetParams::NetParams(const NetConfig& config) : config_(config) {
  const Layout ly(config);
  for (std::size_t l = 0; l < ly.L; ++l) {
    const std::string p = "conv" + std::to_string(l);
    groups_.push_back({p + ".weight", ly.conv_w[l], ly.C * ly.conv_in[l] * ly.k});
    groups_.push_back({p + ".bias", ly.conv_b[l], ly.C});
  }
  for (int g = 0; g < 4; ++g)
    groups_.push_back({std::string("lstm.W_") + kGateNames[g], ly.W[g], ly.H * ly.C});
  for (int g = 0; g < 4; ++g)
    groups_.push_back({std::string("lstm.U_") + kGateNames[g], ly.U[g], ly.H * ly.H});
  for (int g = 0; g < 4; ++g)
    groups_.push_back({std::string("lstm.b_") + kGateNames[g], ly.b[g], ly.H});
  groups_.push_back({"attn.W_a", ly.Wa, ly.A * ly.H});
  groups_.push_back({"attn.v_a", ly.va, ly.A});
  groups_.push_back({"head.W_h", ly.Wh, ly.K * ly.H});
  groups_.push_back({"head.b_h", ly.bh, ly.K});
  values_.assign(ly.total, 0.0);
}

const ParamGroup& NetParams::group(const std::string& name) const {
  for (const auto& g : groups_) {
    if (g.name == name) return g;
  }
  fail(ErrorCode::ShapeMismatch, "no parameter group named '" + name + "'");
}

std::span<double> NetParams::group_values(const std::string& name) {
  const auto& g = group(name);
  return std::span<double>(values_).subspan(g.offset, g.size);
}

std::span<const double> NetParams::group_values(const std::string& name) const {
  const auto& g = group(name);
  return std::span<const double>(values_).subspan(g.offset, g.size);
}

std::uint64_t NetParams::fingerprint() const noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (double v : values_) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    h = (h ^ bits) * 0x100000001b3ULL;
  }
  return h ^ values_.size();
}

NetParams init_params(const NetConfig& config) {
  config.validate();
  NetParams params(config);
  Engine eng = make_engine(config.seed, {0x1417});
  for (double& v : params.values()) v = uniform(eng, -config.init_scale, config.init_scale);
  return params;
}

std::vector<double> forward(std::span<const double> x, const NetParams& params,
                            const NetConfig& config, ForwardTrace& trace) {
  check_shape(params, config);
  if (x.size() != config.input_len)
    fail(ErrorCode::ShapeMismatch, "input has " + std::to_string(x.size()) +
                                       " features, network expects " +
                                       std::to_string(config.input_len));
  forward_unchecked(x, params.values(), Layout(config), trace);
  trace.params_fingerprint = params.fingerprint();
  return trace.output;
}

double loss(const Matrix& predicted, const Matrix& target, double clip_eps) {
  if (predicted.rows() != target.rows() || predicted.cols() != target.cols())
    fail(ErrorCode::ShapeMismatch, "prediction and target shapes differ");
  if (predicted.empty()) fail(ErrorCode::ShapeMismatch, "empty batch");
  return sample_loss(predicted.data(), target.data(), clip_eps) /
         static_cast<double>(predicted.data().size());
}

double bce_derivative(double predicted, double target, double clip_eps) {
  const double p = std::clamp(predicted, clip_eps, 1.0 - clip_eps);
  return (p - target) / (p * (1.0 - p));
}

NetParams backward(const ForwardTrace& trace, std::span<const double> target,
                   const NetParams& params) {
  if (trace.params_fingerprint != params.fingerprint())
    fail(ErrorCode::StaleTrace, "trace was produced with different parameters");
  const Layout ly(params.config());
  if (target.size() != ly.K || trace.output.size() != ly.K)
    fail(ErrorCode::ShapeMismatch, "target length differs from output count");
  std::vector<double> dlogits(ly.K);
  loss_logit_gradient(trace, target, params.config().clip_eps, dlogits);
  NetParams grad(params.config());
  backprop(trace, dlogits, params.values(), ly, grad.values(), {});
  return grad;
}

std::vector<double> input_gradient(const ForwardTrace& trace, const NetParams& params,
                                   std::size_t head) {
  if (trace.params_fingerprint != params.fingerprint())
    fail(ErrorCode::StaleTrace, "trace was produced with different parameters");
  const Layout ly(params.config());
  if (head >= ly.K) fail(ErrorCode::ShapeMismatch, "head index out of range");
  std::vector<double> dlogits(ly.K, 0.0);
  const double y = trace.output[head];
  dlogits[head] = y * (1.0 - y);
  std::vector<double> dx(ly.T);
  backprop(trace, dlogits, params.values(), ly, {}, dx);
  return dx;
}

void sgd_update(std::span<double> theta, std::span<const double> gradient, double eta) {
  if (theta.size() != gradient.size())
    fail(ErrorCode::ShapeMismatch, "gradient length differs from parameter length");
  for (std::size_t i = 0; i < theta.size(); ++i) theta[i] -= eta * gradient[i];
}

NetParams sgd_step(const NetParams& params, const NetParams& gradient, double eta) {
  if (!params.config().same_shape(gradient.config()))
    fail(ErrorCode::ShapeMismatch, "gradient shape differs from parameters");
  NetParams out = params;
  sgd_update(out.values(), gradient.values(), eta);
  return out;
}

TrainResult train(const RecordTable& table, const NetConfig& config) {
  config.validate();
  if (table.rows() == 0) fail(ErrorCode::EmptyTable, "training table is empty");
  if (table.width() != config.input_len)
    fail(ErrorCode::ShapeMismatch, "table width " + std::to_string(table.width()) +
                                       " differs from input_len " +
                                       std::to_string(config.input_len));
  if (table.heads() != config.outputs)
    fail(ErrorCode::ShapeMismatch, "table has " + std::to_string(table.heads()) +
                                       " labels, network has " +
                                       std::to_string(config.outputs) + " outputs");

  TrainResult result{init_params(config), {}};
  const Layout ly(config);
  const std::size_t n = table.rows();
  const std::size_t batch = std::min(config.batch_size, n);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Engine shuffler = make_engine(config.seed, {0x5f1e});
  ForwardTrace trace;
  std::vector<double> grad(ly.total);
  std::vector<double> dlogits(ly.K);

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle(order.begin(), order.end(), shuffler);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t stop = std::min(start + batch, n);
      std::fill(grad.begin(), grad.end(), 0.0);
      auto theta = result.params.values();
      for (std::size_t b = start; b < stop; ++b) {
        const std::size_t r = order[b];
        forward_unchecked(table.features.row(r), theta, ly, trace);
        epoch_loss += sample_loss(trace.output, table.labels.row(r), config.clip_eps) /
                      static_cast<double>(ly.K);
        loss_logit_gradient(trace, table.labels.row(r), config.clip_eps, dlogits);
        backprop(trace, dlogits, theta, ly, grad, {});
      }
      const double scale = 1.0 / static_cast<double>(stop - start);
      for (double& g : grad) g *= scale;
      sgd_update(theta, grad, config.learning_rate);
    }
    result.loss_curve.push_back(epoch_loss / static_cast<double>(n));
  }
  return result;
}

Matrix predict_proba(const RecordTable& table, const NetParams& params,
                     const NetConfig& config) {
  check_shape(params, config);
  if (table.width() != config.input_len)
    fail(ErrorCode::ShapeMismatch, "table width " + std::to_string(table.width()) +
                                       " differs from input_len " +
                                       std::to_string(config.input_len));
  const Layout ly(config);
  Matrix out(table.rows(), ly.K);
  ForwardTrace trace;
  for (std::size_t r = 0; r < table.rows(); ++r) {
    forward_unchecked(table.features.row(r), params.values(), ly, trace);
    std::copy(trace.output.begin(), trace.output.end(), out.row(r).begin());
  }
  return out;
}

Matrix LinearModel::predict(const Matrix& features) const {
  if (features.cols() != inputs)
    fail(ErrorCode::ShapeMismatch, "linear model input width mismatch");
  Matrix out(features.rows(), outputs);
  for (std::size_t r = 0; r < features.rows(); ++r) {
    const auto x = features.row(r);
    for (std::size_t j = 0; j < outputs; ++j) {
      double s = weights[outputs * inputs + j];
      for (std::size_t c = 0; c < inputs; ++c) s += weights[j * inputs + c] * x[c];
      out(r, j) = sigmoid(s);
    }
  }
  return out;
}

LinearModel train_linear(const Matrix& features, const Matrix& labels,
                         const LinearTrainConfig& config) {
  const std::size_t n = features.rows();
  if (n == 0) fail(ErrorCode::EmptyTable, "training table is empty");
  if (labels.rows() != n) fail(ErrorCode::ShapeMismatch, "label rows differ from feature rows");
  if (config.batch_size == 0 || !(config.learning_rate > 0.0))
    fail(ErrorCode::ConfigInvalid, "linear surrogate needs batch_size >= 1 and learning_rate > 0");
  LinearModel model;
  model.inputs = features.cols();
  model.outputs = labels.cols();
  const std::size_t d = model.inputs, k = model.outputs;
  model.weights.assign(k * d + k, 0.0);

  const std::size_t batch = std::min(config.batch_size, n);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Engine shuffler = make_engine(config.seed, {0x11ea});
  std::vector<double> grad(model.weights.size());
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle(order.begin(), order.end(), shuffler);
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t stop = std::min(start + batch, n);
      std::fill(grad.begin(), grad.end(), 0.0);
      for (std::size_t b = start; b < stop; ++b) {
        const auto x = features.row(order[b]);
        const auto y = labels.row(order[b]);
        for (std::size_t j = 0; j < k; ++j) {
          double s = model.weights[k * d + j];
          for (std::size_t c = 0; c < d; ++c) s += model.weights[j * d + c] * x[c];
          const double p = sigmoid(s);
          // dL/dlogit through the clamped cross-entropy, averaged over heads.
          const double dlogit = bce_derivative(p, y[j], config.clip_eps) * p * (1.0 - p) /
                                static_cast<double>(k);
          for (std::size_t c = 0; c < d; ++c) grad[j * d + c] += dlogit * x[c];
          grad[k * d + j] += dlogit;
        }
      }
      const double scale = 1.0 / static_cast<double>(stop - start);
      for (double& g : grad) g *= scale;
      sgd_update(model.weights, grad, config.learning_rate);
    }
  }
  return model;
}

}  // namespace valleyforge
