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

#include "valleyforge/features.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "valleyforge/error.hpp"

namespace valleyforge {

std::string_view to_string(ScoreSource source) noexcept {
  switch (source) {
    case ScoreSource::Statistical: return "statistical";
    case ScoreSource::Deep: return "deep";
    case ScoreSource::Optimal: return "optimal";
    case ScoreSource::BlendedWf: return "blended_wf";
    case ScoreSource::BlendedOwf: return "blended_owf";
  }
  return "unknown";
}

void BlendConfig::validate() const {
  if (!(wt_1 >= 0.0 && wt_1 <= 1.0) || !(wt_2 >= 0.0 && wt_2 <= 1.0))
    fail(ErrorCode::WeightOutOfRange, "blend weights must lie in [0,1]");
}

std::size_t FeatureMask::cardinality() const noexcept {
  return static_cast<std::size_t>(std::count(m.begin(), m.end(), true));
}

std::vector<std::size_t> FeatureMask::indices() const {
  std::vector<std::size_t> out;
  for (std::size_t d = 0; d < m.size(); ++d) {
    if (m[d]) out.push_back(d);
  }
  return out;
}

std::vector<double> rescale_by_max(std::vector<double> raw) {
  const double hi = raw.empty() ? 0.0 : *std::max_element(raw.begin(), raw.end());
  if (hi > 0.0) {
    for (double& v : raw) v /= hi;
  } else {
    std::fill(raw.begin(), raw.end(), 0.0);
  }
  return raw;
}

StatisticalScores statistical_scores(const RecordTable& table) {
  const std::size_t n = table.rows();
  if (n < 3) fail(ErrorCode::TooFewRows, "statistical scores need at least 3 rows");
  const std::size_t d = table.width();
  const auto y = table.labels.column(0);
  const double nn = static_cast<double>(n);
  const double y_mean = std::accumulate(y.begin(), y.end(), 0.0) / nn;
  double syy = 0.0;
  for (double v : y) syy += (v - y_mean) * (v - y_mean);

  StatisticalScores out;
  out.raw.assign(d, 0.0);
  out.mean.assign(d, 0.0);
  out.stddev.assign(d, 0.0);
  for (std::size_t c = 0; c < d; ++c) {
    double sum = 0.0;
    for (std::size_t r = 0; r < n; ++r) sum += table.features(r, c);
    const double mean = sum / nn;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      const double dx = table.features(r, c) - mean;
      sxx += dx * dx;
      sxy += dx * (y[r] - y_mean);
    }
    out.mean[c] = mean;
    out.stddev[c] = std::sqrt(sxx / nn);
    if (sxx > 0.0 && syy > 0.0) out.raw[c] = std::min(1.0, std::abs(sxy) / std::sqrt(sxx * syy));
  }
  out.scores = {rescale_by_max(out.raw), ScoreSource::Statistical};
  return out;
}

DeepScores deep_scores(const RecordTable& table, NetConfig probe_config) {
  probe_config.input_len = table.width();
  probe_config.outputs = table.heads();
  const TrainResult trained = train(table, probe_config);
  const std::size_t d = table.width();
  const std::size_t k = table.heads();

  DeepScores out;
  out.raw.assign(d, 0.0);
  ForwardTrace trace;
  for (std::size_t r = 0; r < table.rows(); ++r) {
    forward(table.features.row(r), trained.params, probe_config, trace);
    for (std::size_t head = 0; head < k; ++head) {
      const auto g = input_gradient(trace, trained.params, head);
      for (std::size_t c = 0; c < d; ++c) out.raw[c] += std::abs(g[c]);
    }
  }
  const double norm = static_cast<double>(table.rows() * k);
  for (double& v : out.raw) v /= norm;
  out.scores = {rescale_by_max(out.raw), ScoreSource::Deep};
  return out;
}

FeatureScores blend_scores(const FeatureScores& a, const FeatureScores& b, double w,
                           ScoreSource source) {
  if (a.size() != b.size())
    fail(ErrorCode::DimensionMismatch, "blended score vectors differ in length");
  if (!(w >= 0.0 && w <= 1.0)) fail(ErrorCode::WeightOutOfRange, "blend weight outside [0,1]");
  FeatureScores out{std::vector<double>(a.size()), source};
  for (std::size_t z = 0; z < a.size(); ++z) out.s[z] = w * a.s[z] + (1.0 - w) * b.s[z];
  return out;
}

FeatureMask select_top(const FeatureScores& scores, std::size_t k) {
  const std::size_t d = scores.size();
  if (k < 1 || k > d)
    fail(ErrorCode::BadK, "k=" + std::to_string(k) + " outside [1, " + std::to_string(d) + "]");
  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::ranges::stable_sort(order, [&](std::size_t a, std::size_t b) {
    return scores.s[a] > scores.s[b];
  });
  FeatureMask mask{std::vector<bool>(d, false)};
  for (std::size_t i = 0; i < k; ++i) mask.m[order[i]] = true;
  return mask;
}

}  // namespace valleyforge
