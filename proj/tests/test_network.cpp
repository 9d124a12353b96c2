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

#include <cmath>
#include <numeric>

#include "doctest.h"
#include "gradcheck.hpp"
#include "oracles.hpp"
#include "valleyforge/dataio.hpp"
#include "valleyforge/error.hpp"
#include "valleyforge/network.hpp"

using namespace valleyforge;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::IoError;
}

Matrix mat(std::size_t r, std::size_t c, std::vector<double> v) {
  Matrix m(r, c);
  std::copy(v.begin(), v.end(), m.data().begin());
  return m;
}

RecordTable toy(std::uint64_t seed) {
  SynthSpec spec;
  spec.n = 200;
  spec.informative = 2;
  spec.noise = 0;
  spec.delta = 4.0;
  spec.seed = seed;
  const RecordTable t = synth_generate(spec);
  return apply_normalizer(t, fit_normalizer(t));
}

}  // namespace

TEST_CASE("forward output range and attention normalisation") {
  const NetConfig cfg = gradcheck::tiny_config(3);
  const NetParams p = init_params(cfg);
  ForwardTrace tr;
  const auto y = forward(std::vector<double>{0.5, -1, 2, 0.1, 0, 3}, p, cfg, tr);
  REQUIRE(y.size() == 2);
  for (double v : y) CHECK((v > 0.0 && v < 1.0));
  double sum = 0;
  for (double a : tr.attn_weights) {
    CHECK(a >= 0.0);
    sum += a;
  }
  CHECK(std::abs(sum - 1.0) < 1e-9);

  // Independent softmax of shifted logits reproduces the weights.
  std::vector<double> e = tr.attn_logits;
  for (double& v : e) v += 100.0;
  const double mx = *std::max_element(e.begin(), e.end());
  double z = 0;
  for (double& v : e) z += (v = std::exp(v - mx));
  for (std::size_t t = 0; t < e.size(); ++t) CHECK(std::abs(e[t] / z - tr.attn_weights[t]) < 1e-9);

  // Pure: same input, same bits.
  ForwardTrace tr2;
  CHECK(forward(std::vector<double>{0.5, -1, 2, 0.1, 0, 3}, p, cfg, tr2) == y);

  CHECK(code_of([&] { forward(std::vector<double>{1, 2}, p, cfg, tr); }) ==
        ErrorCode::ShapeMismatch);
}

TEST_CASE("zero parameters give one half") {
  NetConfig cfg = gradcheck::tiny_config(1);
  cfg.outputs = 3;
  const NetParams zero(cfg);
  ForwardTrace tr;
  for (double v : forward(std::vector<double>(6, 0.7), zero, cfg, tr)) CHECK(v == 0.5);
}

TEST_CASE("loss and its derivative") {
  CHECK(std::abs(loss(mat(1, 1, {0.5}), mat(1, 1, {1})) - std::log(2.0)) < 1e-12);
  CHECK(loss(mat(1, 2, {1.0, 0.0}), mat(1, 2, {1, 0})) <= -std::log(1 - 1e-7) + 1e-15);
  const double a = loss(mat(1, 1, {0.3}), mat(1, 1, {1}));
  const double b = loss(mat(1, 1, {0.8}), mat(1, 1, {0}));
  CHECK(std::abs(loss(mat(2, 1, {0.3, 0.8}), mat(2, 1, {1, 0})) - (a + b) / 2) < 1e-12);
  CHECK(std::abs(loss(mat(2, 1, {0.8, 0.3}), mat(2, 1, {0, 1})) - (a + b) / 2) < 1e-12);
  CHECK(bce_derivative(0.5, 1.0) == -2.0);
  CHECK(code_of([&] { loss(mat(1, 1, {0.5}), mat(1, 2, {1, 0})); }) == ErrorCode::ShapeMismatch);
}

TEST_CASE("backward matches central differences for every group") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto errs = gradcheck::check(seed);
    for (const auto& [name, e] : errs) {
      INFO("seed " << seed << " group " << name);
      CHECK(e.norm_rel < 1e-4);
    }
  }
}

TEST_CASE("input gradient matches central differences") {
  const NetConfig cfg = gradcheck::tiny_config(8);
  const NetParams p = init_params(cfg);
  std::vector<double> x{0.4, -0.3, 1.2, -0.9, 0.05, 0.7};
  ForwardTrace tr;
  forward(x, p, cfg, tr);
  for (std::size_t head = 0; head < cfg.outputs; ++head) {
    const auto g = input_gradient(tr, p, head);
    for (std::size_t d = 0; d < x.size(); ++d) {
      const double keep = x[d];
      ForwardTrace t2;
      x[d] = keep + 1e-5;
      const double up = forward(x, p, cfg, t2)[head];
      x[d] = keep - 1e-5;
      const double down = forward(x, p, cfg, t2)[head];
      x[d] = keep;
      const double fd = (up - down) / 2e-5;
      CHECK(std::abs(g[d] - fd) <= 1e-4 * std::max(std::abs(fd), 1e-3));
    }
  }
}

TEST_CASE("backward edge cases") {
  const NetConfig cfg = gradcheck::tiny_config(4);
  NetParams p = init_params(cfg);
  for (double& v : p.group_values("conv0.bias")) v = 0.0;
  ForwardTrace tr;
  forward(std::vector<double>(6, 0.0), p, cfg, tr);
  const NetParams g = backward(tr, std::vector<double>{1, 0}, p);
  for (double v : g.group_values("conv0.weight")) CHECK(v == 0.0);

  p.values()[0] += 0.01;
  CHECK(code_of([&] { backward(tr, std::vector<double>{1, 0}, p); }) == ErrorCode::StaleTrace);
}

TEST_CASE("sgd step") {
  std::vector<double> theta{1.0};
  sgd_update(theta, std::vector<double>{0.5}, 0.1);
  CHECK(theta[0] == doctest::Approx(0.95).epsilon(1e-15));

  const NetConfig cfg = gradcheck::tiny_config(2);
  const NetParams p = init_params(cfg);
  NetParams g(cfg);
  for (std::size_t i = 0; i < g.size(); ++i) g.values()[i] = 0.01 * static_cast<double>(i % 7);
  CHECK(sgd_step(p, g, 0.0) == p);
  const NetParams one = sgd_step(p, g, 0.1), two = sgd_step(p, g, 0.2);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d1 = one.values()[i] - p.values()[i];
    const double d2 = two.values()[i] - p.values()[i];
    CHECK(std::abs(d2 - 2 * d1) < 1e-15);
  }
  NetConfig other = cfg;
  other.hidden = 4;
  CHECK(code_of([&] { sgd_step(p, NetParams(other), 0.1); }) == ErrorCode::ShapeMismatch);
}

TEST_CASE("training contract") {
  const RecordTable t = toy(1);
  NetConfig cfg;
  cfg.input_len = 2;
  cfg.seed = 1;

  NetConfig none = cfg;
  none.epochs = 0;
  const TrainResult r0 = train(t, none);
  CHECK(r0.loss_curve.empty());
  CHECK(r0.params == init_params(none));

  const TrainResult a = train(t, cfg);
  const TrainResult b = train(t, cfg);
  CHECK(a.params == b.params);
  CHECK(a.loss_curve == b.loss_curve);
  REQUIRE(a.loss_curve.size() == 200);

  const Matrix prob = predict_proba(t, a.params, cfg);
  CHECK(prob.rows() == t.rows());
  CHECK(prob.cols() == 1);
  double hits = 0;
  for (std::size_t r = 0; r < t.rows(); ++r) {
    CHECK((prob(r, 0) > 0.0 && prob(r, 0) < 1.0));
    hits += ((prob(r, 0) >= 0.5) == (t.labels(r, 0) == 1.0));
  }
  CHECK(hits / static_cast<double>(t.rows()) >= 0.98);

  RecordTable empty = t.select_rows({});
  CHECK(code_of([&] { train(empty, cfg); }) == ErrorCode::EmptyTable);
}

TEST_CASE("loss falls on the toy set for every seed") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    NetConfig cfg;
    cfg.input_len = 2;
    cfg.seed = seed;
    const TrainResult r = train(toy(seed), cfg);
    CHECK(r.loss_curve.back() < r.loss_curve.front());
  }
}

TEST_CASE("identical rows predict identically") {
  RecordTable t = toy(2).select_rows({5, 5, 5});
  NetConfig cfg;
  cfg.input_len = 2;
  cfg.epochs = 3;
  const TrainResult r = train(toy(2), cfg);
  const Matrix p = predict_proba(t, r.params, cfg);
  CHECK(p(0, 0) == p(1, 0));
  CHECK(p(1, 0) == p(2, 0));
}

TEST_CASE("linear surrogate separates the toy set") {
  const RecordTable t = toy(3);
  LinearTrainConfig lc;
  lc.seed = 3;
  const LinearModel m = train_linear(t.features, t.labels, lc);
  const Matrix p = m.predict(t.features);
  double hits = 0;
  for (std::size_t r = 0; r < t.rows(); ++r)
    hits += ((p(r, 0) >= 0.5) == (t.labels(r, 0) == 1.0));
  CHECK(hits / static_cast<double>(t.rows()) >= 0.97);
}
