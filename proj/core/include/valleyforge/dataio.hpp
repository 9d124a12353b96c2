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

// Tabular health-record ingestion, normalization, splitting, and synthetic
// data with known ground truth.
//
// Supported CSV schemas (comma separated, header row, UTF-8):
//
//   covid   age, sex, fever, headache, cough, covid
//   stroke  [id], gender, age, hypertension, heart_disease, ever_married,
//           work_type, Residence_type, avg_glucose_level, bmi,
//           smoking_status, stroke
//   generic any numeric columns plus one or more `label:<name>` columns
//
// Categorical dictionaries (matching is case-insensitive; the numeric codes
// themselves are also accepted):
//
//   sex / gender     female=0 male=1 other=2
//   yes/no columns   no=0 yes=1 (also false/true, negative/positive)
//   work_type        children=0 govt_job=1 never_worked=2 private=3
//                    self-employed=4
//   Residence_type   rural=0 urban=1
//   smoking_status   never smoked=0 formerly smoked=1 smokes=2 unknown=3
//
// Empty cells and the tokens N/A, NA, NaN, ? are missing. Missing features
// are imputed with the column median; rows with a missing label are dropped.

#ifndef VALLEYFORGE_DATAIO_HPP_
#define VALLEYFORGE_DATAIO_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "valleyforge/matrix.hpp"

namespace valleyforge {

struct RecordTable {
  Matrix features;  // N x D
  Matrix labels;    // N x K, entries exactly 0 or 1
  std::vector<std::string> feature_names;
  std::vector<std::string> label_names;
  std::string schema_id;

  std::size_t rows() const noexcept { return features.rows(); }
  std::size_t width() const noexcept { return features.cols(); }
  std::size_t heads() const noexcept { return labels.cols(); }

  // Throws BadShape when any invariant is broken.
  void validate() const;

  RecordTable select_rows(const std::vector<std::size_t>& indices) const;
  RecordTable select_columns(const std::vector<bool>& keep) const;

  bool operator==(const RecordTable&) const = default;
};

struct LoadReport {
  std::size_t rows_read = 0;
  std::size_t rows_dropped = 0;
  std::size_t cells_imputed = 0;
  bool labels_absent = false;
};

struct LoadOptions {
  // For prediction inputs: absent label columns or empty label cells become
  // 0 instead of failing or dropping the row. A generic file without label
  // columns gets one placeholder label named "label".
  bool labels_optional = false;
};

RecordTable load_table(const std::filesystem::path& path, std::string_view schema_id,
                       LoadReport* report = nullptr, const LoadOptions& options = {});

// Writes the generic schema (labels as `label:<name>` columns) with
// round-trip exact number formatting.
void save_table(const RecordTable& table, const std::filesystem::path& path);

struct NormalizationStats {
  std::vector<double> mu;
  std::vector<double> sigma;  // population standard deviation
  std::vector<bool> constant_mask;

  bool operator==(const NormalizationStats&) const = default;
};

NormalizationStats fit_normalizer(const RecordTable& table);
RecordTable apply_normalizer(const RecordTable& table, const NormalizationStats& stats);

struct SplitResult {
  RecordTable train;
  RecordTable test;
  std::vector<std::size_t> train_rows;  // indices into the input table
  std::vector<std::size_t> test_rows;
  std::vector<std::string> warnings;
};

// Stratified on the first label column; per-class test count is
// round(class_count * test_fraction), except singleton classes which stay
// in train.
SplitResult stratified_split(const RecordTable& table, double test_fraction,
                             std::uint64_t seed);

struct SynthSpec {
  std::size_t n = 2000;
  std::size_t informative = 5;
  std::size_t noise = 15;
  double delta = 3.0;
  std::uint64_t seed = 7;
};

// Columns x0..x{informative-1} carry signal (mean +delta/2 for positives,
// -delta/2 for negatives, unit variance); the remaining columns are N(0,1)
// noise. Exactly n/2 positives, rows in shuffled order.
RecordTable synth_generate(const SynthSpec& spec);

}  // namespace valleyforge

#endif  // VALLEYFORGE_DATAIO_HPP_
