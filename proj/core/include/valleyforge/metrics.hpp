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

#ifndef VALLEYFORGE_METRICS_HPP_
#define VALLEYFORGE_METRICS_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "valleyforge/matrix.hpp"

namespace valleyforge {

struct ConfusionCounts {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;

  std::size_t total() const noexcept { return tp + fp + tn + fn; }
  bool operator==(const ConfusionCounts&) const = default;
};

// Predicted positive iff score >= threshold.
ConfusionCounts confusion(std::span<const double> scores, std::span<const double> labels,
                          double threshold = 0.5);

struct ClassificationScores {
  double accuracy = 0, precision = 0, recall = 0, f1 = 0;

  bool operator==(const ClassificationScores&) const = default;
};

// 0/0 ratios are reported as 0.
ClassificationScores classification_scores(const ConfusionCounts& c);

struct RocPoint {
  double threshold;  // +inf for the leading (0,0) point
  double fpr;
  double tpr;

  bool operator==(const RocPoint&) const = default;
};

// One point per distinct score (descending thresholds), led by (0,0) and
// closed by (1,1). Throws SingleClass.
std::vector<RocPoint> roc_points(std::span<const double> scores, std::span<const double> labels);

// Trapezoidal area under roc_points; equals P(s_pos > s_neg) + P(tie)/2.
double auc(std::span<const double> scores, std::span<const double> labels);

struct HeadMetrics {
  std::string label;
  ConfusionCounts counts;
  ClassificationScores scores;
  std::optional<double> auc;  // empty when the head has a single class
  std::vector<RocPoint> roc;

  bool operator==(const HeadMetrics&) const = default;
};

struct MetricsReport {
  std::vector<HeadMetrics> heads;
  ClassificationScores macro;
  std::optional<double> macro_auc;  // mean over heads with a defined AUC

  bool operator==(const MetricsReport&) const = default;
};

MetricsReport evaluate(const Matrix& probabilities, const Matrix& labels,
                       const std::vector<std::string>& label_names, double threshold = 0.5);

std::string format_table(const MetricsReport& report);

}  // namespace valleyforge

#endif  // VALLEYFORGE_METRICS_HPP_
