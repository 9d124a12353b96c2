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

// End-to-end orchestration: ingest, score and select features, train the
// network, evaluate, persist. Also the optimizer benchmark harness.
//
// run_train order of work:
//   load -> stratified split -> normalizer fitted on train only
//   statistical scores F on the normalized train split
//   SEV-EB over [-1,1]^D with binarize + fs_fitness on an inner
//     train/validation split -> best mask, selection frequencies OF
//   deep scores F1W from a probe network on the best-mask columns
//   [optional] outer SEV-EB over (wt_1, wt_2, log10 eta)
//   wf = blend(F, OF, wt_1), owf = blend(wf, F1W, wt_2)
//   final mask = top-k of owf -> train network -> evaluate on test split
//
// Every stochastic step draws from a stream derived from the pipeline seed,
// so (config, seed, input files) determine every output.

#ifndef VALLEYFORGE_PIPELINE_HPP_
#define VALLEYFORGE_PIPELINE_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "valleyforge/dataio.hpp"
#include "valleyforge/features.hpp"
#include "valleyforge/metrics.hpp"
#include "valleyforge/network.hpp"
#include "valleyforge/sev_eb.hpp"

namespace valleyforge {

struct DatasetConfig {
  std::optional<std::filesystem::path> path;  // CSV input; otherwise synth
  std::string schema = "generic";
  SynthSpec synth;
};

struct FeatureSelectionConfig {
  // Empty selects every feature whose owf score reaches auto_threshold times
  // the largest owf score (at least 2).
  std::optional<std::size_t> k_final;
  double auto_threshold = 0.2;
  double val_fraction = 0.25;          // inner split for the wrapper fitness
  std::size_t probe_epochs = 20;
  SevEbConfig sev_eb;                  // also holds lambda and surrogate_epochs
};

struct BlendSettings {
  BlendConfig weights;
  bool tune = false;
  SevEbConfig tuner;
  std::size_t tune_epochs = 20;

  BlendSettings() {
    tuner.pop_size = 10;
    tuner.max_iters = 15;
  }
};

struct PipelineConfig {
  DatasetConfig dataset;
  double test_fraction = 0.2;
  std::uint64_t seed = 1;
  FeatureSelectionConfig feature_selection;
  BlendSettings blend;
  NetConfig network;
  std::filesystem::path output_dir = "out";

  void validate() const;  // throws ConfigInvalid
};

// Parses the JSON configuration; missing keys keep their defaults.
PipelineConfig load_pipeline_config(const std::filesystem::path& path);
PipelineConfig parse_pipeline_config(const std::string& json_text);

// VALLEYFORGE_SEED, when set to an unsigned integer.
std::optional<std::uint64_t> seed_from_env();

struct ModelArtifact {
  static constexpr int kFormatVersion = 1;

  int format_version = kFormatVersion;
  std::string schema_id;
  std::vector<std::string> feature_names;
  std::vector<std::string> label_names;
  NormalizationStats normalizer;
  FeatureMask mask;
  BlendConfig blend;
  FeatureScores statistical, optimal, deep, wf, owf;
  NetConfig network;
  NetParams params;
  MetricsReport metrics;  // ROC points omitted
  std::uint64_t seed = 0;

  bool operator==(const ModelArtifact&) const = default;
};

struct ScoreRow {
  std::string feature_name;
  double mean, stddev, stat_score, deep_score, optimal_score, wf, owf;
  bool selected;
};

struct TrainOutcome {
  ModelArtifact artifact;
  MetricsReport report;  // test split, with ROC points
  std::vector<double> loss_curve;
  std::vector<ScoreRow> scores;
  SplitResult split;     // raw (unnormalized) train/test tables
  FeatureMask sev_eb_mask;
  OptResult selection;
  std::optional<OptResult> tuning;
  LoadReport load_report;
};

TrainOutcome run_train(const PipelineConfig& config);

// Throws SchemaMismatch when the table's columns differ from the artifact's.
MetricsReport run_eval(const ModelArtifact& artifact, const RecordTable& table);

// N x K risk probabilities, row order preserved. Only feature columns are
// checked against the artifact.
Matrix run_predict(const ModelArtifact& artifact, const RecordTable& table);

void save_artifact(const ModelArtifact& artifact, const std::filesystem::path& path);
ModelArtifact load_artifact(const std::filesystem::path& path);
std::string artifact_to_json(const ModelArtifact& artifact);
ModelArtifact artifact_from_json(const std::string& text);

std::string metrics_to_json(const MetricsReport& report);

// Writes metrics.json, roc_<label>.csv, scores.csv, model.json and
// loss_curve.csv into dir.
void write_train_outputs(const TrainOutcome& outcome, const std::filesystem::path& dir);
void write_eval_outputs(const MetricsReport& report, const std::filesystem::path& dir);
void write_predictions(const Matrix& probabilities, const std::vector<std::string>& label_names,
                       const std::filesystem::path& path);

struct BenchConfig {
  std::vector<std::string> functions = {"sphere", "rastrigin", "rosenbrock"};
  std::vector<std::size_t> dims = {10, 5, 10};  // parallel to functions
  std::size_t seeds = 10;                       // seeds 1..seeds
  std::size_t pop_size = 30;
  std::size_t max_iters = 500;
  std::size_t threads = 1;
};

BenchConfig load_bench_config(const std::filesystem::path& path);

struct BenchRow {
  std::string function;
  std::string method;  // "sev_eb" or "random"
  std::size_t dimension;
  std::uint64_t seed;
  std::size_t iterations;
  std::size_t evaluations;
  double best_fitness;
  double wall_time_ms;
  std::vector<double> history;
};

std::vector<BenchRow> run_bench(const BenchConfig& config);

// bench.csv plus one history_<function>_<method>_<seed>.csv per run.
void write_bench_outputs(const std::vector<BenchRow>& rows, const std::filesystem::path& dir);

}  // namespace valleyforge

#endif  // VALLEYFORGE_PIPELINE_HPP_
