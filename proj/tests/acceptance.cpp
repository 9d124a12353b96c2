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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.
//
//   acceptance [--work DIR] [--stroke PATH] [--only N]
//
// The stroke smoke test reads PATH or $VALLEYFORGE_STROKE_CSV; without
// either it reports SKIP.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "gradcheck.hpp"
#include "oracles.hpp"
#include "valleyforge/error.hpp"
#include "valleyforge/pipeline.hpp"
#include "valleyforge/rng.hpp"

using namespace valleyforge;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(int id, const char* status, const std::string& what, const std::string& detail) {
  std::cout << std::left << std::setw(5) << status << "criterion " << id << "  " << what << "  ["
            << detail << "]" << std::endl;
  if (std::strcmp(status, "FAIL") == 0) ++failures;
}

void verdict(int id, bool ok, const std::string& what, const std::string& detail) {
  report(id, ok ? "PASS" : "FAIL", what, detail);
}

std::string fmt(double v, int prec = 4) {
  std::ostringstream s;
  s << std::setprecision(prec) << v;
  return s.str();
}

// ---- criteria 1 and 3 ----------------------------------------------------

void synthetic_end_to_end() {
  int metric_ok = 0, recovery_ok = 0;
  std::vector<double> noise_counts;
  double slowest = 0;
  std::ostringstream runs;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    PipelineConfig c;  // defaults: synth n=2000, 5 informative, delta=3, 15 noise, seed 7
    c.seed = seed;
    const auto t0 = Clock::now();
    const TrainOutcome o = run_train(c);
    const double secs = seconds_since(t0);
    slowest = std::max(slowest, secs);

    const auto& m = o.report.macro;
    const bool ok = m.accuracy >= 0.90 && m.f1 >= 0.90 && secs < 300.0;
    metric_ok += ok;

    std::size_t informative = 0, noise = 0;
    for (std::size_t z : o.artifact.mask.indices()) (z < 5 ? informative : noise)++;
    recovery_ok += informative >= 4;
    noise_counts.push_back(static_cast<double>(noise));
    runs << " s" << seed << ":acc=" << fmt(m.accuracy, 3) << ",f1=" << fmt(m.f1, 3) << ",inf="
         << informative << ",noise=" << noise;
  }
  std::cout << "      runs" << runs.str() << std::endl;
  verdict(1, metric_ok >= 8, "synthetic accuracy and macro-F1 >= 0.90 in >= 8/10 seeds",
          std::to_string(metric_ok) + "/10 seeds, slowest run " + fmt(slowest, 3) + " s");
  const double med_noise = oracle::median(noise_counts);
  verdict(3, recovery_ok >= 8 && med_noise <= 3.0,
          ">= 4/5 informative in >= 8/10 seeds, median noise <= 3",
          std::to_string(recovery_ok) + "/10 seeds, median noise " + fmt(med_noise));
}

// ---- criterion 2 ----------------------------------------------------------

void optimizer_convergence() {
  const auto t0 = Clock::now();
  std::vector<double> sev_sphere, rnd_sphere;
  int rastrigin_wins = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    SevEbConfig c;
    c.pop_size = 30;
    c.max_iters = 500;
    c.seed = seed;
    const FitnessFn sphere = [](std::span<const double> x) { return bench_fn("sphere", x); };
    const FitnessFn rast = [](std::span<const double> x) { return bench_fn("rastrigin", x); };
    sev_sphere.push_back(optimize(sphere, bench_space("sphere", 10), c).f_best);
    rnd_sphere.push_back(random_search(sphere, bench_space("sphere", 10), c).f_best);
    const double a = optimize(rast, bench_space("rastrigin", 5), c).f_best;
    const double b = random_search(rast, bench_space("rastrigin", 5), c).f_best;
    rastrigin_wins += a < b;
  }
  const double secs = seconds_since(t0);
  const double ms = oracle::median(sev_sphere), mr = oracle::median(rnd_sphere);
  const bool ok = ms < 1e-6 && ms * 1e3 <= mr && rastrigin_wins >= 8 && secs < 30.0;
  verdict(2, ok, "sphere d=10 median < 1e-6, >= 1e3 better than random, Rastrigin d=5 >= 8/10",
          "sphere median " + fmt(ms) + " vs random " + fmt(mr) + ", rastrigin " +
              std::to_string(rastrigin_wins) + "/10, " + fmt(secs, 3) + " s");
}

// ---- criterion 4 ----------------------------------------------------------

void gradient_correctness() {
  const auto t0 = Clock::now();
  double worst = 0;
  std::string worst_group;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    for (const auto& [name, e] : gradcheck::check(seed)) {
      if (e.norm_rel > worst) {
        worst = e.norm_rel;
        worst_group = name;
      }
    }
  }
  const double secs = seconds_since(t0);
  verdict(4, worst < 1e-4 && secs < 10.0,
          "every parameter group within 1e-4 of central differences, 5 seeds",
          "worst " + fmt(worst) + " (" + worst_group + "), " + fmt(secs, 3) + " s");
}

// ---- criterion 5 ----------------------------------------------------------

void auc_equivalence() {
  Engine eng = make_engine(555, {});
  double worst = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + uniform_index(eng, 49);
    std::vector<double> s(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = static_cast<double>(uniform_index(eng, 10)) / 10.0;
      y[i] = static_cast<double>(uniform_index(eng, 2));
    }
    y[0] = 0;
    y[1] = 1;
    worst = std::max(worst, std::abs(auc(s, y) - oracle::pairwise_auc(s, y)));
  }
  const double fixed = auc(std::vector<double>{0.1, 0.4, 0.35, 0.8}, std::vector<double>{0, 0, 1, 1});
  verdict(5, worst < 1e-12 && fixed == 0.75,
          "trapezoid AUC equals pairwise oracle on 200 instances, fixed instance 0.75",
          "max diff " + fmt(worst) + ", fixed " + fmt(fixed, 17));
}

// ---- criterion 6 ----------------------------------------------------------

void unit_identities() {
  std::vector<std::string> broken;
  const FeatureScores a{{0.1, 0.7, 0.3}, ScoreSource::Statistical};
  const FeatureScores b{{0.9, 0.2, 0.6}, ScoreSource::Optimal};
  if (blend_scores(a, b, 1.0).s != a.s || blend_scores(a, b, 0.0).s != b.s)
    broken.push_back("blend identity");

  Engine eng = make_engine(66, {});
  for (int i = 0; i < 100; ++i) {
    const double bst = uniform(eng, -10, 10), wst = bst + uniform(eng, 0, 20);
    const double c1 = uniform(eng, bst, wst), c2 = uniform(eng, -100, 100);
    if (std::abs(stability_bound(bst, c1, wst) - stability_bound(bst, c2, wst)) > 1e-12) {
      broken.push_back("stability bound depends on cu");
      break;
    }
  }
  if (stability_bound(4.0, 4.0, 4.0) != 1.0) broken.push_back("degenerate SB != 1");

  Matrix p(1, 1, 0.5), y(1, 1, 1.0);
  if (std::abs(loss(p, y) - std::log(2.0)) > 1e-12) broken.push_back("loss(0.5,1) != ln2");

  SynthSpec spec;
  spec.n = 300;
  const RecordTable t = synth_generate(spec);
  const RecordTable z = apply_normalizer(t, fit_normalizer(t));
  for (std::size_t c = 0; c < z.width(); ++c) {
    const auto col = z.features.column(c);
    if (std::abs(oracle::mean(col)) > 1e-12 || std::abs(oracle::pstd(col) - 1.0) > 1e-12) {
      broken.push_back("normalization moments");
      break;
    }
  }
  std::string detail = broken.empty() ? "all hold" : "";
  for (const auto& s : broken) detail += s + "; ";
  verdict(6, broken.empty(), "blend, stability bound, loss and normalization identities", detail);
}

// ---- criterion 7 ----------------------------------------------------------

void determinism(const fs::path& work) {
  bool same = true;
  std::string detail;
  for (std::size_t threads : {std::size_t{1}, std::size_t{4}}) {
    PipelineConfig c;
    c.seed = 11;
    c.feature_selection.sev_eb.threads = threads;
    std::string files[2][2];
    for (int run = 0; run < 2; ++run) {
      const fs::path dir = work / ("det_t" + std::to_string(threads) + "_" + std::to_string(run));
      fs::remove_all(dir);
      write_train_outputs(run_train(c), dir);
      files[run][0] = oracle::read_text(dir / "metrics.json");
      files[run][1] = oracle::read_text(dir / "model.json");
    }
    const bool ok = files[0][0] == files[1][0] && files[0][1] == files[1][1] &&
                    !files[0][0].empty() && !files[0][1].empty();
    same = same && ok;
    detail += "threads=" + std::to_string(threads) + (ok ? " identical" : " DIFFER") + "; ";
  }
  verdict(7, same, "two train runs give byte-identical metrics.json and model.json", detail);
}

// ---- criterion 8 ----------------------------------------------------------

void stroke_smoke(const fs::path& work, const std::string& stroke_path) {
  if (stroke_path.empty()) {
    report(8, "SKIP", "stroke CSV train + eval with AUC > 0.5",
           "no stroke CSV supplied; pass --stroke PATH or set VALLEYFORGE_STROKE_CSV");
    return;
  }
  try {
    PipelineConfig c;
    c.dataset.path = stroke_path;
    c.dataset.schema = "stroke";
    c.seed = 1;
    const TrainOutcome o = run_train(c);
    write_train_outputs(o, work / "stroke");
    const ModelArtifact a = load_artifact(work / "stroke" / "model.json");
    const MetricsReport r = run_eval(a, o.split.test);
    const double area = r.macro_auc.value_or(0.0);
    verdict(8, area > 0.5, "stroke CSV train + eval with AUC > 0.5",
            "held-out AUC " + fmt(area) + ", macro-F1 " + fmt(r.macro.f1) + ", accuracy " +
                fmt(r.macro.accuracy) + ", rows " + std::to_string(o.load_report.rows_read));
  } catch (const Error& e) {
    verdict(8, false, "stroke CSV train + eval with AUC > 0.5",
            std::string("ERROR ") + std::string(to_string(e.code())) + ": " + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  fs::path work = fs::temp_directory_path() / "valleyforge_acceptance";
  std::string stroke;
  int only = 0;
  if (const char* env = std::getenv("VALLEYFORGE_STROKE_CSV")) stroke = env;
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string flag = argv[i];
    if (flag == "--work") work = argv[i + 1];
    else if (flag == "--stroke") stroke = argv[i + 1];
    else if (flag == "--only") only = std::atoi(argv[i + 1]);
  }
  fs::create_directories(work);

  const auto want = [only](int id) { return only == 0 || only == id; };
  try {
    if (want(1) || want(3)) synthetic_end_to_end();
    if (want(2)) optimizer_convergence();
    if (want(4)) gradient_correctness();
    if (want(5)) auc_equivalence();
    if (want(6)) unit_identities();
    if (want(7)) determinism(work);
    if (want(8)) stroke_smoke(work, stroke);
  } catch (const Error& e) {
    std::cout << "FAIL unexpected ERROR " << to_string(e.code()) << ": " << e.what() << std::endl;
    return 1;
  }
  std::cout << (failures == 0 ? "all criteria met" : std::to_string(failures) + " failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
