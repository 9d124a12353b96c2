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

#include "doctest.h"
#include "oracles.hpp"
#include "valleyforge/error.hpp"
#include "valleyforge/metrics.hpp"
#include "valleyforge/rng.hpp"

using namespace valleyforge;
using V = std::vector<double>;

TEST_CASE("confusion counts") {
  CHECK(confusion(V{0.9, 0.1}, V{1, 0}) == ConfusionCounts{1, 0, 1, 0});
  CHECK(confusion(V{0.5}, V{1}).tp == 1);
  CHECK(confusion(V{0.9, 0.9, 0.9}, V{0, 0, 0}).fp == 3);
  bool threw = false;
  try {
    confusion(V{0.1}, V{1, 0});
  } catch (const Error& e) {
    threw = e.code() == ErrorCode::LengthMismatch;
  }
  CHECK(threw);
}

TEST_CASE("classification scores") {
  const auto s = classification_scores({2, 1, 6, 1});
  CHECK(s.precision == doctest::Approx(2.0 / 3.0));
  CHECK(s.recall == doctest::Approx(2.0 / 3.0));
  CHECK(s.f1 == doctest::Approx(2.0 / 3.0));
  CHECK(s.accuracy == doctest::Approx(0.8));

  const auto perfect = classification_scores({3, 0, 4, 0});
  CHECK(perfect == ClassificationScores{1, 1, 1, 1});

  const auto none = classification_scores({0, 0, 5, 2});
  CHECK(none.precision == 0.0);
  CHECK(none.recall == 0.0);
  CHECK(none.f1 == 0.0);
}

TEST_CASE("roc curve shape") {
  const auto sep = roc_points(V{0.1, 0.2, 0.8, 0.9}, V{0, 0, 1, 1});
  bool corner = false;
  for (const auto& p : sep) corner |= (p.fpr == 0.0 && p.tpr == 1.0);
  CHECK(corner);

  const auto flat = roc_points(V{0.4, 0.4, 0.4}, V{0, 1, 0});
  REQUIRE(flat.size() == 2);
  CHECK((flat[0].fpr == 0.0 && flat[0].tpr == 0.0));
  CHECK((flat[1].fpr == 1.0 && flat[1].tpr == 1.0));
  CHECK(std::isinf(flat[0].threshold));

  Engine eng = make_engine(11, {});
  V s(40), y(40);
  for (std::size_t i = 0; i < 40; ++i) {
    s[i] = std::round(uniform01(eng) * 10) / 10;
    y[i] = i % 3 == 0;
  }
  const auto pts = roc_points(s, y);
  for (std::size_t i = 1; i < pts.size(); ++i) {
    CHECK(pts[i].fpr >= pts[i - 1].fpr);
    CHECK(pts[i].tpr >= pts[i - 1].tpr);
  }
  CHECK((pts.back().fpr == 1.0 && pts.back().tpr == 1.0));

  bool threw = false;
  try {
    roc_points(V{0.1, 0.2}, V{1, 1});
  } catch (const Error& e) {
    threw = e.code() == ErrorCode::SingleClass;
  }
  CHECK(threw);
}

TEST_CASE("auc fixed instance and pairwise equivalence") {
  CHECK(auc(V{0.1, 0.4, 0.35, 0.8}, V{0, 0, 1, 1}) == 0.75);
  CHECK(auc(V{0.1, 0.2, 0.8, 0.9}, V{0, 0, 1, 1}) == 1.0);

  Engine eng = make_engine(2024, {});
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + uniform_index(eng, 49);
    V s(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = static_cast<double>(uniform_index(eng, 8)) / 8.0;  // many ties
      y[i] = static_cast<double>(uniform_index(eng, 2));
    }
    y[0] = 0;
    y[1] = 1;
    CHECK(std::abs(auc(s, y) - oracle::pairwise_auc(s, y)) < 1e-12);

    V mono = s;
    for (double& v : mono) v = std::exp(3.0 * v) - 7.0;
    CHECK(std::abs(auc(mono, y) - auc(s, y)) < 1e-12);
  }
}

TEST_CASE("auc of uninformative scores is near one half") {
  Engine eng = make_engine(77, {});
  V s(1000), y(1000);
  for (std::size_t i = 0; i < 1000; ++i) {
    s[i] = uniform01(eng);
    y[i] = static_cast<double>(uniform_index(eng, 2));
  }
  CHECK(std::abs(auc(s, y) - 0.5) < 0.05);
}

TEST_CASE("evaluate reports every head plus macro averages") {
  Matrix p(4, 2), y(4, 2);
  const double pv[] = {0.9, 0.2, 0.1, 0.7, 0.6, 0.4, 0.3, 0.8};
  const double yv[] = {1, 0, 0, 1, 1, 1, 0, 0};
  std::copy(pv, pv + 8, p.data().begin());
  std::copy(yv, yv + 8, y.data().begin());
  const MetricsReport r = evaluate(p, y, {"a", "b"});
  REQUIRE(r.heads.size() == 2);
  CHECK(r.heads[0].label == "a");
  CHECK(r.heads[0].scores.accuracy == 1.0);
  CHECK(r.heads[0].auc.has_value());
  CHECK(r.macro.accuracy ==
        doctest::Approx((r.heads[0].scores.accuracy + r.heads[1].scores.accuracy) / 2));
  REQUIRE(r.macro_auc.has_value());
  CHECK(*r.macro_auc == doctest::Approx((*r.heads[0].auc + *r.heads[1].auc) / 2));
  CHECK(format_table(r).find("macro") != std::string::npos);

  // Permuting samples leaves the scores unchanged.
  Matrix p2(4, 2), y2(4, 2);
  const std::size_t perm[] = {2, 0, 3, 1};
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t k = 0; k < 2; ++k) {
      p2(i, k) = p(perm[i], k);
      y2(i, k) = y(perm[i], k);
    }
  const MetricsReport r2 = evaluate(p2, y2, {"a", "b"});
  CHECK(r2.macro == r.macro);
  CHECK(r2.macro_auc == r.macro_auc);
}
