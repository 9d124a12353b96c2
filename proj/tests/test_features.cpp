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

#include <numeric>

#include "doctest.h"
#include "oracles.hpp"
#include "valleyforge/error.hpp"
#include "valleyforge/features.hpp"
#include "valleyforge/rng.hpp"

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

FeatureScores fs(std::vector<double> s) { return {std::move(s), ScoreSource::Statistical}; }

}  // namespace

TEST_CASE("statistical scores follow |pearson r|") {
  RecordTable t;
  t.features = Matrix(6, 3);
  t.labels = Matrix(6, 1);
  const double y[] = {0, 1, 0, 1, 1, 0};
  const double noisy[] = {0.3, 0.9, -0.2, 0.1, 0.7, 0.4};
  for (std::size_t r = 0; r < 6; ++r) {
    t.features(r, 0) = y[r];
    t.features(r, 1) = 7.0;
    t.features(r, 2) = noisy[r];
    t.labels(r, 0) = y[r];
  }
  t.feature_names = {"same", "flat", "noisy"};
  t.label_names = {"y"};
  const StatisticalScores s = statistical_scores(t);
  CHECK(s.raw[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.scores.s[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.scores.s[1] == 0.0);
  CHECK(s.raw[2] == doctest::Approx(std::abs(oracle::pearson(
                                         std::vector<double>(noisy, noisy + 6),
                                         std::vector<double>(y, y + 6))))
                        .epsilon(1e-12));
  CHECK(s.mean[1] == 7.0);
  CHECK(s.stddev[1] == 0.0);

  // Positive affine maps leave |r| unchanged.
  RecordTable u = t;
  for (std::size_t r = 0; r < 6; ++r) u.features(r, 2) = 3.5 * t.features(r, 2) - 11.0;
  CHECK(std::abs(statistical_scores(u).raw[2] - s.raw[2]) < 1e-12);

  RecordTable small = t.select_rows({0, 1});
  CHECK(code_of([&] { statistical_scores(small); }) == ErrorCode::TooFewRows);
}

TEST_CASE("noise columns score low on synthetic data") {
  SynthSpec spec;
  spec.informative = 5;
  spec.noise = 15;
  const StatisticalScores s = statistical_scores(synth_generate(spec));
  for (std::size_t c = 5; c < 20; ++c) CHECK(s.raw[c] < 0.15);
  for (std::size_t c = 0; c < 5; ++c) CHECK(s.raw[c] > 0.5);
}

TEST_CASE("deep scores are rescaled saliencies that favour informative columns") {
  int wins = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    SynthSpec spec;
    spec.n = 800;
    spec.seed = seed;
    RecordTable t = synth_generate(spec);
    t = apply_normalizer(t, fit_normalizer(t));
    NetConfig probe;
    probe.epochs = 20;
    probe.seed = seed;
    const DeepScores d = deep_scores(t, probe);
    REQUIRE(d.scores.size() == 20);
    CHECK(*std::max_element(d.scores.s.begin(), d.scores.s.end()) == 1.0);
    for (double v : d.scores.s) CHECK((v >= 0.0 && v <= 1.0));

    std::vector<std::size_t> order(20);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](auto a, auto b) { return d.scores.s[a] > d.scores.s[b]; });
    double rank_inf = 0, rank_noise = 0;
    for (std::size_t r = 0; r < 20; ++r) (order[r] < 5 ? rank_inf : rank_noise) += r;
    wins += (rank_inf / 5.0 < rank_noise / 15.0);
  }
  CHECK(wins >= 8);
}

TEST_CASE("blend_scores") {
  const FeatureScores a = fs({0.2, 0.8}), b = fs({0.6, 0.4});
  const FeatureScores m = blend_scores(a, b, 0.5);
  CHECK(m.s[0] == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(m.s[1] == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(blend_scores(a, b, 1.0).s == a.s);
  CHECK(blend_scores(a, b, 0.0).s == b.s);
  CHECK(blend_scores(a, b, 0.3, ScoreSource::BlendedOwf).source == ScoreSource::BlendedOwf);

  CHECK(code_of([&] { blend_scores(a, fs({0.1}), 0.5); }) == ErrorCode::DimensionMismatch);
  CHECK(code_of([&] { blend_scores(a, b, 1.5); }) == ErrorCode::WeightOutOfRange);
  CHECK(code_of([&] { BlendConfig{-0.1, 0.5}.validate(); }) == ErrorCode::WeightOutOfRange);

  Engine eng = make_engine(5, {});
  for (int trial = 0; trial < 100; ++trial) {
    FeatureScores x = fs({uniform01(eng), uniform01(eng), uniform01(eng)});
    FeatureScores y = fs({uniform01(eng), uniform01(eng), uniform01(eng)});
    const double w = uniform01(eng);
    const auto z = blend_scores(x, y, w);
    const auto same = blend_scores(x, x, w);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(z.s[i] >= std::min(x.s[i], y.s[i]) - 1e-15);
      CHECK(z.s[i] <= std::max(x.s[i], y.s[i]) + 1e-15);
      CHECK(same.s[i] == doctest::Approx(x.s[i]).epsilon(1e-15));
    }
  }
}

TEST_CASE("select_top") {
  CHECK(select_top(fs({0.9, 0.1, 0.8}), 2).indices() == std::vector<std::size_t>{0, 2});
  CHECK(select_top(fs({0.5, 0.5}), 1).indices() == std::vector<std::size_t>{0});
  CHECK(select_top(fs({0.5, 0.2, 0.1}), 3).cardinality() == 3);
  CHECK(code_of([&] { select_top(fs({0.5}), 0); }) == ErrorCode::BadK);
  CHECK(code_of([&] { select_top(fs({0.5}), 2); }) == ErrorCode::BadK);

  Engine eng = make_engine(9, {});
  std::vector<double> s(12);
  for (double& v : s) v = uniform01(eng);
  std::vector<double> cubed = s;
  for (double& v : cubed) v = v * v * v + 2.0;
  for (std::size_t k = 1; k <= s.size(); ++k) {
    const FeatureMask a = select_top(fs(s), k);
    CHECK(a.cardinality() == k);
    CHECK(a == select_top(fs(cubed), k));
  }
}

TEST_CASE("rescale_by_max") {
  CHECK(rescale_by_max({1.0, 2.0, 4.0}) == std::vector<double>{0.25, 0.5, 1.0});
  CHECK(rescale_by_max({0.0, 0.0}) == std::vector<double>{0.0, 0.0});
}
