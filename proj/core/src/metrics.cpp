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

#include "valleyforge/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>

#include "valleyforge/error.hpp"

namespace valleyforge {

namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

void check_lengths(std::span<const double> scores, std::span<const double> labels) {
  if (scores.size() != labels.size())
    fail(ErrorCode::LengthMismatch, "scores and labels differ in length (" +
                                        std::to_string(scores.size()) + " vs " +
                                        std::to_string(labels.size()) + ")");
}

}  // namespace

ConfusionCounts confusion(std::span<const double> scores, std::span<const double> labels,
                          double threshold) {
  check_lengths(scores, labels);
  ConfusionCounts c;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool predicted = scores[i] >= threshold;
    const bool actual = labels[i] != 0.0;
    if (predicted && actual) ++c.tp;
    else if (predicted) ++c.fp;
    else if (actual) ++c.fn;
    else ++c.tn;
  }
  return c;
}

ClassificationScores classification_scores(const ConfusionCounts& c) {
  ClassificationScores s;
  s.accuracy = ratio(c.tp + c.tn, c.total());
  s.precision = ratio(c.tp, c.tp + c.fp);
  s.recall = ratio(c.tp, c.tp + c.fn);
  s.f1 = ratio(2 * c.tp, 2 * c.tp + c.fp + c.fn);
  return s;
}

std::vector<RocPoint> roc_points(std::span<const double> scores,
                                 std::span<const double> labels) {
  check_lengths(scores, labels);
  std::size_t pos = 0;
  for (double y : labels) pos += y != 0.0;
  const std::size_t neg = labels.size() - pos;
  if (pos == 0 || neg == 0)
    fail(ErrorCode::SingleClass, "ROC needs at least one positive and one negative label");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::ranges::sort(order, [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  std::vector<RocPoint> pts{{std::numeric_limits<double>::infinity(), 0.0, 0.0}};
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double thr = scores[order[i]];
    for (; i < order.size() && scores[order[i]] == thr; ++i) {
      if (labels[order[i]] != 0.0) ++tp;
      else ++fp;
    }
    pts.push_back({thr, ratio(fp, neg), ratio(tp, pos)});
  }
  if (pts.back().fpr != 1.0 || pts.back().tpr != 1.0)
    pts.push_back({-std::numeric_limits<double>::infinity(), 1.0, 1.0});
  return pts;
}

double auc(std::span<const double> scores, std::span<const double> labels) {
  const auto pts = roc_points(scores, labels);
  double area = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i)
    area += (pts[i].fpr - pts[i - 1].fpr) * (pts[i].tpr + pts[i - 1].tpr) * 0.5;
  return area;
}

MetricsReport evaluate(const Matrix& probabilities, const Matrix& labels,
                       const std::vector<std::string>& label_names, double threshold) {
  if (probabilities.rows() != labels.rows() || probabilities.cols() != labels.cols())
    fail(ErrorCode::LengthMismatch, "probability and label matrices differ in shape");
  if (label_names.size() != labels.cols())
    fail(ErrorCode::LengthMismatch, "label name count differs from label columns");
  MetricsReport report;
  double auc_sum = 0.0;
  std::size_t auc_count = 0;
  for (std::size_t k = 0; k < labels.cols(); ++k) {
    const auto s = probabilities.column(k);
    const auto y = labels.column(k);
    HeadMetrics h;
    h.label = label_names[k];
    h.counts = confusion(s, y, threshold);
    h.scores = classification_scores(h.counts);
    const bool both = h.counts.tp + h.counts.fn > 0 && h.counts.tn + h.counts.fp > 0;
    if (both) {
      h.roc = roc_points(s, y);
      h.auc = auc(s, y);
      auc_sum += *h.auc;
      ++auc_count;
    }
    report.macro.accuracy += h.scores.accuracy;
    report.macro.precision += h.scores.precision;
    report.macro.recall += h.scores.recall;
    report.macro.f1 += h.scores.f1;
    report.heads.push_back(std::move(h));
  }
  const double k = static_cast<double>(labels.cols());
  report.macro.accuracy /= k;
  report.macro.precision /= k;
  report.macro.recall /= k;
  report.macro.f1 /= k;
  if (auc_count > 0) report.macro_auc = auc_sum / static_cast<double>(auc_count);
  return report;
}

std::string format_table(const MetricsReport& report) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "%-16s %9s %9s %9s %9s %9s\n", "label", "accuracy",
                "precision", "recall", "f1", "auc");
  out << line;
  auto row = [&](const std::string& name, const ClassificationScores& s,
                 const std::optional<double>& a) {
    char auc_text[16] = "n/a";
    if (a) std::snprintf(auc_text, sizeof auc_text, "%.4f", *a);
    std::snprintf(line, sizeof line, "%-16s %9.4f %9.4f %9.4f %9.4f %9s\n", name.c_str(),
                  s.accuracy, s.precision, s.recall, s.f1, auc_text);
    out << line;
  };
  for (const auto& h : report.heads) row(h.label, h.scores, h.auc);
  if (report.heads.size() > 1) row("macro", report.macro, report.macro_auc);
  return out.str();
}

}  // namespace valleyforge
