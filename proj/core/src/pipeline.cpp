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

#include "valleyforge/pipeline.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "json.hpp"
#include "valleyforge/error.hpp"
#include "valleyforge/rng.hpp"

namespace valleyforge {
namespace {

using nlohmann::json;

// Sub-stream keys off the pipeline seed.
enum StreamKey : std::uint64_t {
  kSplit = 1,
  kInnerSplit = 2,
  kSelection = 3,
  kSurrogate = 4,
  kProbe = 5,
  kNetwork = 6,
  kTuner = 7,
};

std::string number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), end);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
  if (!out) fail(ErrorCode::IoError, "write failed for " + path.string());
}

// ---- config parsing -------------------------------------------------------

// Reads obj[key] into out when present; rejects keys not in `allowed`.
class Reader {
 public:
  Reader(const json& obj, std::string where, std::set<std::string> allowed)
      : obj_(obj), where_(std::move(where)) {
    if (!obj_.is_object()) fail(ErrorCode::ConfigInvalid, where_ + " must be an object");
    for (const auto& [k, v] : obj_.items())
      if (!allowed.count(k)) fail(ErrorCode::ConfigInvalid, "unknown key " + where_ + "." + k);
  }

  template <class T>
  void get(const char* key, T& out) const {
    if (!obj_.contains(key)) return;
    try {
      out = obj_.at(key).get<T>();
    } catch (const json::exception&) {
      fail(ErrorCode::ConfigInvalid, "bad value for " + where_ + "." + key);
    }
  }

  const json* child(const char* key) const {
    return obj_.contains(key) ? &obj_.at(key) : nullptr;
  }

 private:
  const json& obj_;
  std::string where_;
};

void read_sev_eb(const json& j, const std::string& where, SevEbConfig& c) {
  Reader r(j, where,
           {"pop_size", "max_iters", "eps", "rho0", "alpha_prob", "alpha_frac", "min_width",
            "lambda", "surrogate_epochs", "threads"});
  r.get("pop_size", c.pop_size);
  r.get("max_iters", c.max_iters);
  r.get("eps", c.eps);
  r.get("rho0", c.rho0);
  r.get("alpha_prob", c.alpha_prob);
  r.get("alpha_frac", c.alpha_frac);
  r.get("min_width", c.min_width);
  r.get("lambda", c.lambda);
  r.get("surrogate_epochs", c.surrogate_epochs);
  r.get("threads", c.threads);
}

void read_network(const json& j, NetConfig& c) {
  Reader r(j, "network",
           {"conv_layers", "channels", "kernel", "hidden", "attention_dim", "learning_rate",
            "batch_size", "epochs", "clip_eps", "init_scale"});
  r.get("conv_layers", c.conv_layers);
  r.get("channels", c.channels);
  r.get("kernel", c.kernel);
  r.get("hidden", c.hidden);
  r.get("attention_dim", c.attention_dim);
  r.get("learning_rate", c.learning_rate);
  r.get("batch_size", c.batch_size);
  r.get("epochs", c.epochs);
  r.get("clip_eps", c.clip_eps);
  r.get("init_scale", c.init_scale);
}

json net_to_json(const NetConfig& c) {
  return {{"input_len", c.input_len},     {"conv_layers", c.conv_layers},
          {"channels", c.channels},       {"kernel", c.kernel},
          {"hidden", c.hidden},           {"attention_dim", c.attention_dim},
          {"outputs", c.outputs},         {"learning_rate", c.learning_rate},
          {"batch_size", c.batch_size},   {"epochs", c.epochs},
          {"seed", c.seed},               {"clip_eps", c.clip_eps},
          {"init_scale", c.init_scale}};
}

NetConfig net_from_json(const json& j) {
  NetConfig c;
  c.input_len = j.at("input_len").get<std::size_t>();
  c.conv_layers = j.at("conv_layers").get<std::size_t>();
  c.channels = j.at("channels").get<std::size_t>();
  c.kernel = j.at("kernel").get<std::size_t>();
  c.hidden = j.at("hidden").get<std::size_t>();
  c.attention_dim = j.at("attention_dim").get<std::size_t>();
  c.outputs = j.at("outputs").get<std::size_t>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.batch_size = j.at("batch_size").get<std::size_t>();
  c.epochs = j.at("epochs").get<std::size_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.clip_eps = j.at("clip_eps").get<double>();
  c.init_scale = j.at("init_scale").get<double>();
  return c;
}

// ---- metrics / artifact json ----------------------------------------------

json optional_number(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

std::optional<double> optional_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

json scores_to_json(const ClassificationScores& s) {
  return {{"accuracy", s.accuracy}, {"precision", s.precision}, {"recall", s.recall},
          {"f1", s.f1}};
}

ClassificationScores scores_from_json(const json& j) {
  return {j.at("accuracy").get<double>(), j.at("precision").get<double>(),
          j.at("recall").get<double>(), j.at("f1").get<double>()};
}

json report_to_json(const MetricsReport& r) {
  json heads = json::array();
  for (const auto& h : r.heads) {
    heads.push_back({{"label", h.label},
                     {"tp", h.counts.tp},
                     {"fp", h.counts.fp},
                     {"tn", h.counts.tn},
                     {"fn", h.counts.fn},
                     {"scores", scores_to_json(h.scores)},
                     {"auc", optional_number(h.auc)}});
  }
  return {{"heads", heads}, {"macro", scores_to_json(r.macro)},
          {"macro_auc", optional_number(r.macro_auc)}};
}

MetricsReport report_from_json(const json& j) {
  MetricsReport r;
  for (const auto& h : j.at("heads")) {
    HeadMetrics m;
    m.label = h.at("label").get<std::string>();
    m.counts = {h.at("tp").get<std::size_t>(), h.at("fp").get<std::size_t>(),
                h.at("tn").get<std::size_t>(), h.at("fn").get<std::size_t>()};
    m.scores = scores_from_json(h.at("scores"));
    m.auc = optional_from(h.at("auc"));
    r.heads.push_back(std::move(m));
  }
  r.macro = scores_from_json(j.at("macro"));
  r.macro_auc = optional_from(j.at("macro_auc"));
  return r;
}

json feature_scores_to_json(const FeatureScores& f) {
  return {{"source", std::string(to_string(f.source))}, {"values", f.s}};
}

FeatureScores feature_scores_from_json(const json& j) {
  FeatureScores f;
  const auto name = j.at("source").get<std::string>();
  bool found = false;
  for (auto s : {ScoreSource::Statistical, ScoreSource::Deep, ScoreSource::Optimal,
                 ScoreSource::BlendedWf, ScoreSource::BlendedOwf}) {
    if (to_string(s) == name) {
      f.source = s;
      found = true;
    }
  }
  if (!found) fail(ErrorCode::CorruptArtifact, "unknown score source " + name);
  f.s = j.at("values").get<std::vector<double>>();
  return f;
}

MetricsReport without_roc(MetricsReport r) {
  for (auto& h : r.heads) h.roc.clear();
  return r;
}

// ---- training helpers -----------------------------------------------------

double macro_f1(const Matrix& probs, const Matrix& labels) {
  double f1 = 0.0;
  for (std::size_t k = 0; k < labels.cols(); ++k)
    f1 += classification_scores(confusion(probs.column(k), labels.column(k))).f1;
  return f1 / static_cast<double>(labels.cols());
}

struct Blended {
  FeatureScores wf, owf;
};

Blended blend_all(const FeatureScores& f, const FeatureScores& of, const FeatureScores& f1w,
                  const BlendConfig& b) {
  Blended out;
  out.wf = blend_scores(f, of, b.wt_1, ScoreSource::BlendedWf);
  out.owf = blend_scores(out.wf, f1w, b.wt_2, ScoreSource::BlendedOwf);
  return out;
}

NetConfig sized(NetConfig c, std::size_t inputs, std::size_t outputs) {
  c.input_len = inputs;
  c.outputs = outputs;
  return c;
}

}  // namespace

// ---- config ---------------------------------------------------------------

void PipelineConfig::validate() const {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    fail(ErrorCode::ConfigInvalid, "test_fraction must lie in (0,1)");
  if (!(feature_selection.val_fraction > 0.0 && feature_selection.val_fraction < 1.0))
    fail(ErrorCode::ConfigInvalid, "feature_selection.val_fraction must lie in (0,1)");
  if (feature_selection.k_final && *feature_selection.k_final < 1)
    fail(ErrorCode::ConfigInvalid, "feature_selection.k_final must be >= 1");
  if (!(feature_selection.auto_threshold >= 0.0 && feature_selection.auto_threshold <= 1.0))
    fail(ErrorCode::ConfigInvalid, "feature_selection.auto_threshold must lie in [0,1]");
  if (feature_selection.probe_epochs < 1)
    fail(ErrorCode::ConfigInvalid, "feature_selection.probe_epochs must be >= 1");
  if (blend.tune_epochs < 1) fail(ErrorCode::ConfigInvalid, "blend.tune_epochs must be >= 1");
  if (!dataset.path && (dataset.synth.n < 2 || dataset.synth.informative + dataset.synth.noise < 1))
    fail(ErrorCode::ConfigInvalid, "synthetic dataset needs n >= 2 and at least one column");
  feature_selection.sev_eb.validate();
  blend.weights.validate();
  if (blend.tune) blend.tuner.validate();
  network.validate();
}

PipelineConfig parse_pipeline_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::ConfigInvalid, std::string("config is not valid JSON: ") + e.what());
  }
  PipelineConfig c;
  Reader r(root, "config",
           {"dataset", "test_fraction", "seed", "feature_selection", "blend", "network",
            "output_dir"});
  r.get("test_fraction", c.test_fraction);
  r.get("seed", c.seed);
  if (root.contains("output_dir")) {
    std::string dir;
    r.get("output_dir", dir);
    c.output_dir = dir;
  }
  if (const json* d = r.child("dataset")) {
    Reader dr(*d, "dataset", {"path", "schema", "synth"});
    if (d->contains("path")) {
      std::string p;
      dr.get("path", p);
      c.dataset.path = p;
    }
    dr.get("schema", c.dataset.schema);
    if (const json* s = dr.child("synth")) {
      Reader sr(*s, "dataset.synth", {"n", "informative", "noise", "delta", "seed"});
      sr.get("n", c.dataset.synth.n);
      sr.get("informative", c.dataset.synth.informative);
      sr.get("noise", c.dataset.synth.noise);
      sr.get("delta", c.dataset.synth.delta);
      sr.get("seed", c.dataset.synth.seed);
    }
  }
  if (const json* f = r.child("feature_selection")) {
    Reader fr(*f, "feature_selection",
              {"k_final", "auto_threshold", "lambda", "surrogate_epochs", "val_fraction",
               "probe_epochs", "sev_eb"});
    if (f->contains("k_final")) {
      const json& k = f->at("k_final");
      if (k.is_string() && k.get<std::string>() == "auto") {
        c.feature_selection.k_final.reset();
      } else {
        std::size_t kv = 0;
        fr.get("k_final", kv);
        c.feature_selection.k_final = kv;
      }
    }
    fr.get("auto_threshold", c.feature_selection.auto_threshold);
    fr.get("val_fraction", c.feature_selection.val_fraction);
    fr.get("probe_epochs", c.feature_selection.probe_epochs);
    if (const json* s = fr.child("sev_eb"))
      read_sev_eb(*s, "feature_selection.sev_eb", c.feature_selection.sev_eb);
    fr.get("lambda", c.feature_selection.sev_eb.lambda);
    fr.get("surrogate_epochs", c.feature_selection.sev_eb.surrogate_epochs);
  }
  if (const json* b = r.child("blend")) {
    Reader br(*b, "blend", {"wt_1", "wt_2", "tune", "tune_epochs", "tuner"});
    br.get("wt_1", c.blend.weights.wt_1);
    br.get("wt_2", c.blend.weights.wt_2);
    br.get("tune", c.blend.tune);
    br.get("tune_epochs", c.blend.tune_epochs);
    if (const json* t = br.child("tuner")) read_sev_eb(*t, "blend.tuner", c.blend.tuner);
  }
  if (const json* n = r.child("network")) read_network(*n, c.network);
  c.validate();
  return c;
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path))
    fail(ErrorCode::ConfigInvalid, "config file not found: " + path.string());
  return parse_pipeline_config(read_file(path));
}

std::optional<std::uint64_t> seed_from_env() {
  const char* v = std::getenv("VALLEYFORGE_SEED");
  if (v == nullptr || *v == '\0') return std::nullopt;
  std::uint64_t seed = 0;
  const char* end = v + std::char_traits<char>::length(v);
  auto [ptr, ec] = std::from_chars(v, end, seed);
  if (ec != std::errc() || ptr != end)
    fail(ErrorCode::ConfigInvalid, std::string("VALLEYFORGE_SEED is not an unsigned integer: ") + v);
  return seed;
}

// ---- train / eval / predict -----------------------------------------------

TrainOutcome run_train(const PipelineConfig& config) {
  config.validate();
  TrainOutcome out;

  RecordTable table;
  if (config.dataset.path) {
    if (!std::filesystem::exists(*config.dataset.path))
      fail(ErrorCode::ConfigInvalid, "dataset not found: " + config.dataset.path->string());
    table = load_table(*config.dataset.path, config.dataset.schema, &out.load_report);
  } else {
    table = synth_generate(config.dataset.synth);
    out.load_report.rows_read = table.rows();
  }
  const std::size_t d = table.width();
  if (config.feature_selection.k_final && *config.feature_selection.k_final > d)
    fail(ErrorCode::ConfigInvalid, "k_final=" + std::to_string(*config.feature_selection.k_final) +
                                       " exceeds feature count " + std::to_string(d));

  const std::uint64_t seed = config.seed;
  out.split = stratified_split(table, config.test_fraction, derive_seed(seed, {kSplit}));
  const NormalizationStats norm = fit_normalizer(out.split.train);
  const RecordTable train = apply_normalizer(out.split.train, norm);

  const StatisticalScores stat = statistical_scores(train);

  // Wrapper selection on an inner split of the training rows.
  const SplitResult inner =
      stratified_split(train, config.feature_selection.val_fraction, derive_seed(seed, {kInnerSplit}));
  SevEbConfig sel_cfg = config.feature_selection.sev_eb;
  sel_cfg.seed = derive_seed(seed, {kSelection});
  const std::uint64_t surrogate_seed = derive_seed(seed, {kSurrogate});
  const FitnessFn fs = [&](std::span<const double> x) {
    return fs_fitness(binarize(x), inner.train, inner.test, sel_cfg.lambda,
                      sel_cfg.surrogate_epochs, surrogate_seed);
  };
  out.selection = optimize(fs, SearchSpace::cube(d, -1.0, 1.0), sel_cfg);
  out.sev_eb_mask = binarize(out.selection.x_best);

  FeatureScores optimal{std::vector<double>(d, 0.0), ScoreSource::Optimal};
  const Population& fin = out.selection.final_population;
  for (std::size_t p = 0; p < fin.size(); ++p)
    for (std::size_t z = 0; z < d; ++z)
      if (fin.positions(p, z) > 0.0) optimal.s[z] += 1.0;
  for (double& v : optimal.s) v /= static_cast<double>(fin.size());

  // Deep scores from a probe trained on the best mask's columns only.
  FeatureScores deep{std::vector<double>(d, 0.0), ScoreSource::Deep};
  if (out.sev_eb_mask.cardinality() > 0) {
    NetConfig probe = config.network;
    probe.epochs = config.feature_selection.probe_epochs;
    probe.seed = derive_seed(seed, {kProbe});
    const DeepScores ds = deep_scores(train.select_columns(out.sev_eb_mask.m), probe);
    const auto idx = out.sev_eb_mask.indices();
    for (std::size_t j = 0; j < idx.size(); ++j) deep.s[idx[j]] = ds.scores.s[j];
  }

  // Auto k: every feature whose default-weight owf clears the threshold.
  // Wrapper picks and strongly correlated features both land near 1/4 or
  // above; everything else sits near 0.
  std::size_t k_final = 0;
  if (config.feature_selection.k_final) {
    k_final = *config.feature_selection.k_final;
  } else {
    const Blended pre = blend_all(stat.scores, optimal, deep, config.blend.weights);
    const double top = *std::max_element(pre.owf.s.begin(), pre.owf.s.end());
    for (double v : pre.owf.s)
      if (v >= config.feature_selection.auto_threshold * top) ++k_final;
    k_final = std::min(d, std::max<std::size_t>(2, k_final));
  }

  BlendConfig weights = config.blend.weights;
  NetConfig net_cfg = config.network;
  if (config.blend.tune) {
    SevEbConfig tcfg = config.blend.tuner;
    tcfg.seed = derive_seed(seed, {kTuner});
    const FitnessFn tune_fit = [&](std::span<const double> x) {
      const BlendConfig b{std::clamp(x[0], 0.0, 1.0), std::clamp(x[1], 0.0, 1.0)};
      const Blended bl = blend_all(stat.scores, optimal, deep, b);
      const FeatureMask m = select_top(bl.owf, k_final);
      const RecordTable tr = inner.train.select_columns(m.m);
      const RecordTable va = inner.test.select_columns(m.m);
      NetConfig nc = sized(config.network, tr.width(), tr.heads());
      nc.learning_rate = std::pow(10.0, x[2]);
      nc.epochs = config.blend.tune_epochs;
      nc.seed = derive_seed(seed, {kNetwork});
      const TrainResult tr_res = valleyforge::train(tr, nc);
      return 1.0 - macro_f1(predict_proba(va, tr_res.params, nc), va.labels);
    };
    const SearchSpace space{{0.0, 0.0, -3.0}, {1.0, 1.0, -1.0}};
    out.tuning = optimize(tune_fit, space, tcfg);
    weights = {out.tuning->x_best[0], out.tuning->x_best[1]};
    net_cfg.learning_rate = std::pow(10.0, out.tuning->x_best[2]);
  }

  const Blended bl = blend_all(stat.scores, optimal, deep, weights);
  const FeatureMask mask = select_top(bl.owf, k_final);

  net_cfg = sized(net_cfg, mask.cardinality(), table.heads());
  net_cfg.seed = derive_seed(seed, {kNetwork});
  TrainResult trained = valleyforge::train(train.select_columns(mask.m), net_cfg);
  out.loss_curve = std::move(trained.loss_curve);

  ModelArtifact& a = out.artifact;
  a.schema_id = table.schema_id;
  a.feature_names = table.feature_names;
  a.label_names = table.label_names;
  a.normalizer = norm;
  a.mask = mask;
  a.blend = weights;
  a.statistical = stat.scores;
  a.optimal = optimal;
  a.deep = deep;
  a.wf = bl.wf;
  a.owf = bl.owf;
  a.network = net_cfg;
  a.params = std::move(trained.params);
  a.seed = seed;

  out.report = run_eval(a, out.split.test);
  a.metrics = without_roc(out.report);

  for (std::size_t z = 0; z < d; ++z) {
    out.scores.push_back({table.feature_names[z], norm.mu[z], norm.sigma[z], stat.scores.s[z],
                          deep.s[z], optimal.s[z], bl.wf.s[z], bl.owf.s[z], mask.m[z]});
  }
  return out;
}

namespace {

void check_features(const ModelArtifact& a, const RecordTable& t) {
  if (t.feature_names != a.feature_names)
    fail(ErrorCode::SchemaMismatch, "feature columns differ from the model's");
}

Matrix masked_proba(const ModelArtifact& a, const RecordTable& t) {
  const RecordTable x = apply_normalizer(t, a.normalizer).select_columns(a.mask.m);
  return predict_proba(x, a.params, a.network);
}

}  // namespace

MetricsReport run_eval(const ModelArtifact& artifact, const RecordTable& table) {
  check_features(artifact, table);
  if (table.label_names != artifact.label_names)
    fail(ErrorCode::SchemaMismatch, "label columns differ from the model's");
  return evaluate(masked_proba(artifact, table), table.labels, table.label_names);
}

Matrix run_predict(const ModelArtifact& artifact, const RecordTable& table) {
  check_features(artifact, table);
  return masked_proba(artifact, table);
}

// ---- artifact io -----------------------------------------------------------

std::string artifact_to_json(const ModelArtifact& a) {
  json params = json::array();
  json j;
  j["format_version"] = a.format_version;
  j["schema_id"] = a.schema_id;
  j["seed"] = a.seed;
  j["feature_names"] = a.feature_names;
  j["label_names"] = a.label_names;
  j["normalizer"] = {{"mu", a.normalizer.mu},
                     {"sigma", a.normalizer.sigma},
                     {"constant", a.normalizer.constant_mask}};
  j["mask"] = a.mask.m;
  j["blend"] = {{"wt_1", a.blend.wt_1}, {"wt_2", a.blend.wt_2}};
  j["scores"] = {{"statistical", feature_scores_to_json(a.statistical)},
                 {"optimal", feature_scores_to_json(a.optimal)},
                 {"deep", feature_scores_to_json(a.deep)},
                 {"wf", feature_scores_to_json(a.wf)},
                 {"owf", feature_scores_to_json(a.owf)}};
  j["network"] = net_to_json(a.network);
  const auto v = a.params.values();
  j["params"] = std::vector<double>(v.begin(), v.end());
  j["metrics"] = report_to_json(a.metrics);
  return j.dump(1) + "\n";
}

ModelArtifact artifact_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::CorruptArtifact, std::string("model is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("format_version"))
    fail(ErrorCode::CorruptArtifact, "model has no format_version");
  if (!j["format_version"].is_number_integer() ||
      j["format_version"].get<long long>() != ModelArtifact::kFormatVersion)
    fail(ErrorCode::VersionMismatch, "unsupported model format_version " +
                                         j["format_version"].dump() + ", expected " +
                                         std::to_string(ModelArtifact::kFormatVersion));
  try {
    ModelArtifact a;
    a.schema_id = j.at("schema_id").get<std::string>();
    a.seed = j.at("seed").get<std::uint64_t>();
    a.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    a.label_names = j.at("label_names").get<std::vector<std::string>>();
    const json& n = j.at("normalizer");
    a.normalizer.mu = n.at("mu").get<std::vector<double>>();
    a.normalizer.sigma = n.at("sigma").get<std::vector<double>>();
    a.normalizer.constant_mask = n.at("constant").get<std::vector<bool>>();
    a.mask.m = j.at("mask").get<std::vector<bool>>();
    a.blend = {j.at("blend").at("wt_1").get<double>(), j.at("blend").at("wt_2").get<double>()};
    const json& s = j.at("scores");
    a.statistical = feature_scores_from_json(s.at("statistical"));
    a.optimal = feature_scores_from_json(s.at("optimal"));
    a.deep = feature_scores_from_json(s.at("deep"));
    a.wf = feature_scores_from_json(s.at("wf"));
    a.owf = feature_scores_from_json(s.at("owf"));
    a.network = net_from_json(j.at("network"));
    a.network.validate();
    a.params = NetParams(a.network);
    const auto values = j.at("params").get<std::vector<double>>();
    if (values.size() != a.params.size())
      fail(ErrorCode::CorruptArtifact, "parameter count does not match the network shape");
    std::copy(values.begin(), values.end(), a.params.values().begin());
    a.metrics = report_from_json(j.at("metrics"));

    const std::size_t d = a.feature_names.size();
    const auto same = [d](std::size_t x) { return x == d; };
    if (!same(a.normalizer.mu.size()) || !same(a.normalizer.sigma.size()) ||
        !same(a.normalizer.constant_mask.size()) || !same(a.mask.size()) ||
        !same(a.statistical.size()) || !same(a.optimal.size()) || !same(a.deep.size()) ||
        !same(a.wf.size()) || !same(a.owf.size()))
      fail(ErrorCode::CorruptArtifact, "vector lengths disagree with feature count");
    if (a.mask.cardinality() != a.network.input_len)
      fail(ErrorCode::CorruptArtifact, "mask cardinality differs from network input_len");
    if (a.label_names.size() != a.network.outputs)
      fail(ErrorCode::CorruptArtifact, "label count differs from network outputs");
    return a;
  } catch (const json::exception& e) {
    fail(ErrorCode::CorruptArtifact, std::string("malformed model: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::CorruptArtifact) throw;
    fail(ErrorCode::CorruptArtifact, std::string("malformed model: ") + e.what());
  }
}

void save_artifact(const ModelArtifact& artifact, const std::filesystem::path& path) {
  write_file(path, artifact_to_json(artifact));
}

ModelArtifact load_artifact(const std::filesystem::path& path) {
  return artifact_from_json(read_file(path));
}

std::string metrics_to_json(const MetricsReport& report) {
  return report_to_json(report).dump(2) + "\n";
}

// ---- output files ----------------------------------------------------------

void write_eval_outputs(const MetricsReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_file(dir / "metrics.json", metrics_to_json(report));
  for (const auto& h : report.heads) {
    if (h.roc.empty()) continue;
    std::string csv = "threshold,fpr,tpr\n";
    for (const auto& p : h.roc)
      csv += number(p.threshold) + "," + number(p.fpr) + "," + number(p.tpr) + "\n";
    write_file(dir / ("roc_" + h.label + ".csv"), csv);
  }
}

void write_train_outputs(const TrainOutcome& outcome, const std::filesystem::path& dir) {
  write_eval_outputs(outcome.report, dir);
  save_artifact(outcome.artifact, dir / "model.json");

  std::string scores =
      "feature_name,mean,std,stat_score,deep_score,optimal_score,wf,owf,selected\n";
  for (const auto& r : outcome.scores) {
    scores += r.feature_name + "," + number(r.mean) + "," + number(r.stddev) + "," +
              number(r.stat_score) + "," + number(r.deep_score) + "," +
              number(r.optimal_score) + "," + number(r.wf) + "," + number(r.owf) + "," +
              (r.selected ? "1" : "0") + "\n";
  }
  write_file(dir / "scores.csv", scores);

  std::string loss = "epoch,mean_loss\n";
  for (std::size_t e = 0; e < outcome.loss_curve.size(); ++e)
    loss += std::to_string(e + 1) + "," + number(outcome.loss_curve[e]) + "\n";
  write_file(dir / "loss_curve.csv", loss);
}

void write_predictions(const Matrix& probabilities, const std::vector<std::string>& label_names,
                       const std::filesystem::path& path) {
  std::string csv = "row";
  for (const auto& n : label_names) csv += "," + n;
  csv += "\n";
  for (std::size_t r = 0; r < probabilities.rows(); ++r) {
    csv += std::to_string(r);
    for (std::size_t k = 0; k < probabilities.cols(); ++k) csv += "," + number(probabilities(r, k));
    csv += "\n";
  }
  write_file(path, csv);
}

// ---- benchmark harness ----------------------------------------------------

BenchConfig load_bench_config(const std::filesystem::path& path) {
  json root;
  try {
    root = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    fail(ErrorCode::ConfigInvalid, std::string("bench config is not valid JSON: ") + e.what());
  }
  BenchConfig c;
  Reader r(root, "bench", {"runs", "seeds", "pop_size", "max_iters", "threads"});
  r.get("seeds", c.seeds);
  r.get("pop_size", c.pop_size);
  r.get("max_iters", c.max_iters);
  r.get("threads", c.threads);
  if (const json* runs = r.child("runs")) {
    if (!runs->is_array()) fail(ErrorCode::ConfigInvalid, "bench.runs must be an array");
    c.functions.clear();
    c.dims.clear();
    for (const auto& run : *runs) {
      Reader rr(run, "bench.runs[]", {"function", "dim"});
      std::string fn;
      std::size_t dim = 0;
      rr.get("function", fn);
      rr.get("dim", dim);
      if (fn.empty() || dim == 0)
        fail(ErrorCode::ConfigInvalid, "bench.runs entries need function and dim >= 1");
      c.functions.push_back(fn);
      c.dims.push_back(dim);
    }
  }
  if (c.seeds < 1) fail(ErrorCode::ConfigInvalid, "bench.seeds must be >= 1");
  return c;
}

std::vector<BenchRow> run_bench(const BenchConfig& config) {
  if (config.functions.size() != config.dims.size())
    fail(ErrorCode::ConfigInvalid, "bench functions and dims differ in length");
  std::vector<BenchRow> rows;
  for (std::size_t f = 0; f < config.functions.size(); ++f) {
    const std::string& name = config.functions[f];
    const SearchSpace space = bench_space(name, config.dims[f]);
    const FitnessFn fn = [&name](std::span<const double> x) { return bench_fn(name, x); };
    for (std::uint64_t s = 1; s <= config.seeds; ++s) {
      SevEbConfig c;
      c.pop_size = config.pop_size;
      c.max_iters = config.max_iters;
      c.threads = config.threads;
      c.seed = s;
      for (const char* method : {"sev_eb", "random"}) {
        const auto t0 = std::chrono::steady_clock::now();
        OptResult res = std::string_view(method) == "sev_eb" ? optimize(fn, space, c)
                                                             : random_search(fn, space, c);
        const auto t1 = std::chrono::steady_clock::now();
        rows.push_back({name, method, config.dims[f], s, config.max_iters, res.evaluations,
                        res.f_best,
                        std::chrono::duration<double, std::milli>(t1 - t0).count(),
                        std::move(res.history)});
      }
    }
  }
  return rows;
}

void write_bench_outputs(const std::vector<BenchRow>& rows, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::string csv = "function,method,dimension,seed,iterations,evaluations,best_fitness,wall_time_ms\n";
  for (const auto& r : rows) {
    csv += r.function + "," + r.method + "," + std::to_string(r.dimension) + "," +
           std::to_string(r.seed) + "," + std::to_string(r.iterations) + "," +
           std::to_string(r.evaluations) + "," + number(r.best_fitness) + "," +
           number(r.wall_time_ms) + "\n";
    std::string hist = "iteration,f_best\n";
    for (std::size_t t = 0; t < r.history.size(); ++t)
      hist += std::to_string(t) + "," + number(r.history[t]) + "\n";
    write_file(dir / ("history_" + r.function + "_" + r.method + "_" + std::to_string(r.seed) +
                      ".csv"),
               hist);
  }
  write_file(dir / "bench.csv", csv);
}

}  // namespace valleyforge
