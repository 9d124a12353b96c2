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

// valleyforge train|eval|predict|bench|gen-synth

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "valleyforge/dataio.hpp"
#include "valleyforge/error.hpp"
#include "valleyforge/metrics.hpp"
#include "valleyforge/pipeline.hpp"

namespace fs = std::filesystem;
using namespace valleyforge;

namespace {

int cmd_train(const std::string& config_path, std::optional<std::uint64_t> seed_flag,
              const std::string& out_flag) {
  PipelineConfig config = load_pipeline_config(config_path);
  if (seed_flag)
    config.seed = *seed_flag;
  else if (auto env = seed_from_env())
    config.seed = *env;
  if (!out_flag.empty()) config.output_dir = out_flag;

  const TrainOutcome outcome = run_train(config);
  write_train_outputs(outcome, config.output_dir);

  std::cout << "seed " << config.seed << ", " << outcome.artifact.mask.cardinality() << " of "
            << outcome.artifact.feature_names.size() << " features selected:";
  for (std::size_t z : outcome.artifact.mask.indices())
    std::cout << ' ' << outcome.artifact.feature_names[z];
  std::cout << "\n" << format_table(outcome.report);
  std::cout << "outputs written to " << config.output_dir.string() << "\n";
  return 0;
}

int cmd_eval(const std::string& model, const std::string& data, const std::string& schema,
             const std::string& out) {
  const ModelArtifact artifact = load_artifact(model);
  const RecordTable table = load_table(data, schema.empty() ? artifact.schema_id : schema);
  const MetricsReport report = run_eval(artifact, table);
  std::cout << format_table(report);
  if (!out.empty()) write_eval_outputs(report, out);
  return 0;
}

int cmd_predict(const std::string& model, const std::string& data, const std::string& schema,
                const std::string& out) {
  const ModelArtifact artifact = load_artifact(model);
  const RecordTable table = load_table(data, schema.empty() ? artifact.schema_id : schema,
                                       nullptr, LoadOptions{.labels_optional = true});
  write_predictions(run_predict(artifact, table), artifact.label_names, out);
  std::cout << table.rows() << " rows scored, written to " << out << "\n";
  return 0;
}

int cmd_bench(const std::string& config_path, const std::string& out) {
  const BenchConfig config = config_path.empty() ? BenchConfig{} : load_bench_config(config_path);
  const auto rows = run_bench(config);
  write_bench_outputs(rows, out);
  for (const auto& r : rows)
    std::cout << r.function << " d=" << r.dimension << " seed=" << r.seed << " " << r.method
              << " best=" << r.best_fitness << "\n";
  std::cout << "bench.csv written to " << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-disease risk prediction with SEV-EB feature selection"};
  app.require_subcommand(1);

  std::string config_path, out_dir, model_path, data_path, schema;
  std::optional<std::uint64_t> seed;

  auto* train = app.add_subcommand("train", "Select features, train and evaluate a model");
  train->add_option("--config", config_path, "JSON pipeline configuration")->required();
  train->add_option("--seed", seed, "Overrides VALLEYFORGE_SEED and the config seed");
  train->add_option("--out", out_dir, "Output directory (default: config output_dir)");

  auto* eval = app.add_subcommand("eval", "Evaluate a saved model on a labelled CSV");
  eval->add_option("--model", model_path, "model.json from train")->required();
  eval->add_option("--data", data_path, "CSV to evaluate")->required();
  eval->add_option("--schema", schema, "covid, stroke or generic (default: the model's)");
  eval->add_option("--out", out_dir, "Write metrics.json and ROC CSVs here");

  auto* predict = app.add_subcommand("predict", "Write per-record risk probabilities");
  predict->add_option("--model", model_path, "model.json from train")->required();
  predict->add_option("--data", data_path, "CSV to score")->required();
  predict->add_option("--schema", schema, "covid, stroke or generic (default: the model's)");
  predict->add_option("--out", out_dir, "Output CSV path")->required();

  std::string bench_out = "bench_out";
  auto* bench = app.add_subcommand("bench", "SEV-EB against random search on test functions");
  bench->add_option("--config", config_path, "JSON bench configuration");
  bench->add_option("--out", bench_out, "Output directory");

  SynthSpec synth;
  std::string synth_out;
  auto* gen = app.add_subcommand("gen-synth", "Write a synthetic dataset with known signal");
  gen->add_option("--n", synth.n, "Rows")->capture_default_str();
  gen->add_option("--informative", synth.informative, "Informative columns")->capture_default_str();
  gen->add_option("--noise", synth.noise, "Noise columns")->capture_default_str();
  gen->add_option("--delta", synth.delta, "Class mean separation")->capture_default_str();
  gen->add_option("--seed", synth.seed, "Generator seed")->capture_default_str();
  gen->add_option("--out", synth_out, "Output CSV path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) return cmd_train(config_path, seed, out_dir);
    if (*eval) return cmd_eval(model_path, data_path, schema, out_dir);
    if (*predict) return cmd_predict(model_path, data_path, schema, out_dir);
    if (*bench) return cmd_bench(config_path, bench_out);
    if (*gen) {
      save_table(synth_generate(synth), synth_out);
      std::cout << synth.n << " rows written to " << synth_out << "\n";
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "ERROR " << to_string(e.code()) << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "ERROR Internal: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
