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

// Per-feature relevance scores and their two-stage convex blend.
//
// Three score vectors feed the blend, each in [0,1] and rescaled so the
// largest entry is 1:
//   statistical  |Pearson r| between a feature and the first label
//   optimal      selection frequency in the final optimizer population
//   deep         mean |d y_hat / d x| of a briefly trained network
//
//   wf  = wt_1 * statistical + (1 - wt_1) * optimal
//   owf = wt_2 * wf          + (1 - wt_2) * deep

#ifndef VALLEYFORGE_FEATURES_HPP_
#define VALLEYFORGE_FEATURES_HPP_

#include <cstddef>
#include <string_view>
#include <vector>

#include "valleyforge/dataio.hpp"
#include "valleyforge/network.hpp"

namespace valleyforge {

enum class ScoreSource { Statistical, Deep, Optimal, BlendedWf, BlendedOwf };

std::string_view to_string(ScoreSource source) noexcept;

struct FeatureScores {
  std::vector<double> s;
  ScoreSource source = ScoreSource::Statistical;

  std::size_t size() const noexcept { return s.size(); }
  bool operator==(const FeatureScores&) const = default;
};

struct BlendConfig {
  double wt_1 = 0.5;
  double wt_2 = 0.5;

  // Throws WeightOutOfRange.
  void validate() const;
  bool operator==(const BlendConfig&) const = default;
};

struct FeatureMask {
  std::vector<bool> m;

  std::size_t size() const noexcept { return m.size(); }
  std::size_t cardinality() const noexcept;
  std::vector<std::size_t> indices() const;
  bool operator==(const FeatureMask&) const = default;
};

// Divides by the maximum; an all-zero vector stays all zero.
std::vector<double> rescale_by_max(std::vector<double> raw);

struct StatisticalScores {
  FeatureScores scores;
  std::vector<double> raw;  // |r| before rescaling
  std::vector<double> mean;
  std::vector<double> stddev;  // population
};

// Throws TooFewRows when N < 3.
StatisticalScores statistical_scores(const RecordTable& table);

struct DeepScores {
  FeatureScores scores;
  std::vector<double> raw;
};

// Trains a probe network with probe_config (input_len/outputs are taken from
// the table) and averages absolute input gradients over samples and heads.
DeepScores deep_scores(const RecordTable& table, NetConfig probe_config);

// out = w * a + (1 - w) * b, tagged with `source`.
FeatureScores blend_scores(const FeatureScores& a, const FeatureScores& b, double w,
                           ScoreSource source = ScoreSource::BlendedWf);

// Top-k by score, ties to the lower index. Throws BadK.
FeatureMask select_top(const FeatureScores& scores, std::size_t k);

}  // namespace valleyforge

#endif  // VALLEYFORGE_FEATURES_HPP_
