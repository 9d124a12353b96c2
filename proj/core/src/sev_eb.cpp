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

#include "valleyforge/sev_eb.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <thread>

#include "valleyforge/error.hpp"
#include "valleyforge/metrics.hpp"
#include "valleyforge/rng.hpp"

namespace valleyforge {

namespace {

constexpr std::uint64_t kInitStream = 0x1a1a;
constexpr std::uint64_t kRandomSearchStream = 0x5a5a;

void clamp_into(std::span<double> x, const SearchSpace& box) {
  for (std::size_t d = 0; d < x.size(); ++d) x[d] = std::clamp(x[d], box.lb[d], box.ub[d]);
}

// Fills pop.fitness; threads only partition the index range, results land
// in fixed slots.
void evaluate(const FitnessFn& fitness, Population& pop, std::size_t threads) {
  const std::size_t p = pop.size();
  pop.fitness.assign(p, 0.0);
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) pop.fitness[i] = fitness(pop.positions.row(i));
  };
  const std::size_t workers = std::min(std::max<std::size_t>(threads, 1), p);
  if (workers <= 1) {
    work(0, p);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (p + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(p, begin + chunk);
      if (begin < end) pool.emplace_back(work, begin, end);
    }
  }
  for (std::size_t i = 0; i < p; ++i) {
    if (!std::isfinite(pop.fitness[i]))
      fail(ErrorCode::NonFiniteFitness,
           "fitness of particle " + std::to_string(i) + " is not finite");
  }
}

std::size_t argmin(const std::vector<double>& v) {
  return static_cast<std::size_t>(std::min_element(v.begin(), v.end()) - v.begin());
}

}  // namespace

SearchSpace SearchSpace::cube(std::size_t dim, double lo, double hi) {
  return {std::vector<double>(dim, lo), std::vector<double>(dim, hi)};
}

void SearchSpace::validate() const {
  if (lb.empty() || lb.size() != ub.size())
    fail(ErrorCode::ConfigInvalid, "search space bounds must be non-empty and equal length");
  for (std::size_t d = 0; d < lb.size(); ++d) {
    if (!(std::isfinite(lb[d]) && std::isfinite(ub[d]) && lb[d] < ub[d]))
      fail(ErrorCode::ConfigInvalid, "search space needs finite lb < ub in dimension " +
                                         std::to_string(d));
  }
}

bool SearchSpace::contains(std::span<const double> x) const {
  if (x.size() != lb.size()) return false;
  for (std::size_t d = 0; d < x.size(); ++d) {
    if (!(x[d] >= lb[d] && x[d] <= ub[d])) return false;
  }
  return true;
}

void SevEbConfig::validate() const {
  auto need = [](bool ok, const char* what) {
    if (!ok) fail(ErrorCode::ConfigInvalid, std::string("sev_eb config: ") + what);
  };
  if (pop_size < 4) fail(ErrorCode::PopulationTooSmall, "population size must be >= 4");
  need(eps > 0.0, "eps must be > 0");
  need(rho0 > 0.0 && rho0 <= 1.0, "rho0 must lie in (0, 1]");
  need(alpha_prob >= 0.0 && alpha_prob <= 1.0, "alpha_prob must lie in [0, 1]");
  need(alpha_frac >= 0.0 && alpha_frac <= 1.0, "alpha_frac must lie in [0, 1]");
  need(min_width > 0.0, "min_width must be > 0");
  need(lambda >= 0.0 && std::isfinite(lambda), "lambda must be >= 0");
}

Population init_population(const SearchSpace& space, std::size_t pop_size, std::uint64_t seed) {
  if (pop_size < 4) fail(ErrorCode::PopulationTooSmall, "population size must be >= 4");
  space.validate();
  Population pop;
  pop.positions = Matrix(pop_size, space.dim());
  for (std::size_t i = 0; i < pop_size; ++i) {
    Engine eng = make_engine(seed, {kInitStream, i});
    auto row = pop.positions.row(i);
    for (std::size_t d = 0; d < space.dim(); ++d) row[d] = uniform(eng, space.lb[d], space.ub[d]);
  }
  return pop;
}

double stability_bound(double bst_fit, double cu_fit, double wst_fit, double eps) {
  if (!std::isfinite(bst_fit) || !std::isfinite(cu_fit) || !std::isfinite(wst_fit))
    fail(ErrorCode::NonFiniteInput, "stability bound needs finite fitness values");
  if (wst_fit == bst_fit) return 1.0;
  // Shift so the best fitness becomes 1; all shifted values are then >= 1.
  const double bst = 1.0;
  const double cu = cu_fit - bst_fit + 1.0;
  const double wst = wst_fit - bst_fit + 1.0;
  return (bst * cu) / (wst * cu + eps);
}

double stability_level(double f, double bst_fit, double wst_fit, double eps) {
  return (f - bst_fit) / (wst_fit - bst_fit + eps);
}

Population update_positions(const Population& pop, const IterationState& state,
                            const SevEbConfig& config) {
  const std::size_t p = pop.size();
  const std::size_t dim = pop.positions.cols();
  std::vector<double> centroid(dim, 0.0);
  for (std::size_t i = 0; i < p; ++i) {
    const auto x = pop.positions.row(i);
    for (std::size_t d = 0; d < dim; ++d) centroid[d] += x[d];
  }
  for (double& c : centroid) c /= static_cast<double>(p);
  std::vector<double> spread(dim, 0.0);
  for (std::size_t i = 0; i < p; ++i) {
    const auto x = pop.positions.row(i);
    for (std::size_t d = 0; d < dim; ++d) spread[d] += (x[d] - centroid[d]) * (x[d] - centroid[d]);
  }
  for (double& s : spread) s = std::sqrt(s / static_cast<double>(p));

  Population next;
  next.positions = pop.positions;
  for (std::size_t i = 0; i < p; ++i) {
    Engine eng = make_engine(config.seed, {state.t, i});
    const auto x = pop.positions.row(i);
    auto out = next.positions.row(i);
    const double sb = stability_bound(state.bst_fit, pop.fitness[i], state.wst_fit, config.eps);
    const double sl = stability_level(pop.fitness[i], state.bst_fit, state.wst_fit, config.eps);
    if (sl > sb) {
      if (uniform01(eng) < config.alpha_prob) {
        // Alpha decay: copy coordinates of the best-so-far position.
        for (std::size_t d = 0; d < dim; ++d) {
          if (uniform01(eng) < config.alpha_frac) out[d] = state.x_best[d];
        }
      } else {
        // Gamma decay: move toward a random other particle.
        std::size_t j = uniform_index(eng, p - 1);
        if (j >= i) ++j;
        const double r = uniform01(eng);
        const auto xj = pop.positions.row(j);
        for (std::size_t d = 0; d < dim; ++d) out[d] = x[d] + r * (xj[d] - x[d]);
      }
    } else {
      // Drift toward the best and the centroid, jittered by the population
      // spread; a converged population has zero spread and stays put.
      const double r1 = uniform01(eng);
      const double r2 = uniform01(eng);
      std::normal_distribution<double> jitter(0.0, 1.0);
      for (std::size_t d = 0; d < dim; ++d) {
        out[d] = x[d] + r1 * (state.x_best[d] - x[d]) + r2 * (centroid[d] - x[d]);
        if (spread[d] > 0.0) out[d] += spread[d] * jitter(eng);
      }
    }
    clamp_into(out, state.bounds);
  }
  next.fitness = pop.fitness;
  return next;
}

SearchSpace shrink_bounds(const SearchSpace& space, std::span<const double> x_best,
                          std::size_t t, std::size_t max_iters, double rho0, double min_width) {
  const double rho =
      rho0 * (1.0 - static_cast<double>(t) / static_cast<double>(std::max<std::size_t>(max_iters, 1)));
  SearchSpace out = space;
  for (std::size_t d = 0; d < space.dim(); ++d) {
    const double span = space.ub[d] - space.lb[d];
    double lo = std::max(space.lb[d], x_best[d] - rho * span);
    double hi = std::min(space.ub[d], x_best[d] + rho * span);
    if (hi - lo < min_width) {
      const double half = 0.5 * std::min(min_width, span);
      lo = x_best[d] - half;
      hi = x_best[d] + half;
      // Slide back inside the original box, keeping the width.
      if (lo < space.lb[d]) {
        hi += space.lb[d] - lo;
        lo = space.lb[d];
      }
      if (hi > space.ub[d]) {
        lo -= hi - space.ub[d];
        hi = space.ub[d];
      }
      lo = std::max(lo, space.lb[d]);
    }
    out.lb[d] = lo;
    out.ub[d] = hi;
  }
  return out;
}

OptResult optimize(const FitnessFn& fitness, const SearchSpace& space, const SevEbConfig& config) {
  config.validate();
  space.validate();

  Population pop = init_population(space, config.pop_size, config.seed);
  evaluate(fitness, pop, config.threads);

  IterationState state;
  state.bounds = space;
  std::size_t best = argmin(pop.fitness);
  state.x_best.assign(pop.positions.row(best).begin(), pop.positions.row(best).end());
  state.f_best = pop.fitness[best];

  OptResult result;
  result.evaluations = pop.size();
  result.history.push_back(state.f_best);

  const auto T = static_cast<long long>(config.max_iters);
  state.t = 1;
  for (state.i_remaining = T - 1; state.i_remaining >= 0; --state.i_remaining, ++state.t) {
    const auto [lo, hi] = std::minmax_element(pop.fitness.begin(), pop.fitness.end());
    state.bst_fit = *lo;
    state.wst_fit = *hi;

    Population moved = update_positions(pop, state, config);
    state.bounds = shrink_bounds(space, state.x_best, state.t, config.max_iters, config.rho0,
                                 config.min_width);
    for (std::size_t i = 0; i < moved.size(); ++i) clamp_into(moved.positions.row(i), state.bounds);
    evaluate(fitness, moved, config.threads);
    result.evaluations += moved.size();

    // A particle keeps its previous position when the move made it worse,
    // unless the shrunken bounds have already excluded that position.
    for (std::size_t i = 0; i < moved.size(); ++i) {
      const auto prev = pop.positions.row(i);
      if (moved.fitness[i] > pop.fitness[i] && state.bounds.contains(prev)) {
        std::ranges::copy(prev, moved.positions.row(i).begin());
        moved.fitness[i] = pop.fitness[i];
      }
    }
    pop = std::move(moved);

    best = argmin(pop.fitness);
    if (pop.fitness[best] < state.f_best) {
      state.f_best = pop.fitness[best];
      state.x_best.assign(pop.positions.row(best).begin(), pop.positions.row(best).end());
    }
    result.history.push_back(state.f_best);
  }

  result.x_best = std::move(state.x_best);
  result.f_best = state.f_best;
  result.final_population = std::move(pop);
  return result;
}

OptResult random_search(const FitnessFn& fitness, const SearchSpace& space,
                        const SevEbConfig& config) {
  config.validate();
  space.validate();
  OptResult result;
  result.f_best = INFINITY;
  for (std::size_t block = 0; block <= config.max_iters; ++block) {
    Population pop;
    pop.positions = Matrix(config.pop_size, space.dim());
    for (std::size_t i = 0; i < config.pop_size; ++i) {
      Engine eng = make_engine(config.seed, {kRandomSearchStream, block, i});
      auto row = pop.positions.row(i);
      for (std::size_t d = 0; d < space.dim(); ++d) row[d] = uniform(eng, space.lb[d], space.ub[d]);
    }
    evaluate(fitness, pop, config.threads);
    result.evaluations += pop.size();
    const std::size_t best = argmin(pop.fitness);
    if (pop.fitness[best] < result.f_best) {
      result.f_best = pop.fitness[best];
      result.x_best.assign(pop.positions.row(best).begin(), pop.positions.row(best).end());
    }
    result.history.push_back(result.f_best);
    if (block == config.max_iters) result.final_population = std::move(pop);
  }
  return result;
}

FeatureMask binarize(std::span<const double> x) {
  FeatureMask mask{std::vector<bool>(x.size())};
  for (std::size_t d = 0; d < x.size(); ++d) mask.m[d] = x[d] > 0.0;
  return mask;
}

double fs_fitness(const FeatureMask& mask, const RecordTable& train, const RecordTable& val,
                  double lambda, std::size_t surrogate_epochs, std::uint64_t seed) {
  if (mask.size() != train.width() || mask.size() != val.width())
    fail(ErrorCode::DimensionMismatch, "feature mask length differs from table width");
  const std::size_t card = mask.cardinality();
  if (card == 0) return 2.0;
  const RecordTable tr = train.select_columns(mask.m);
  const RecordTable va = val.select_columns(mask.m);
  LinearTrainConfig lc;
  lc.epochs = surrogate_epochs;
  lc.seed = seed;
  const LinearModel model = train_linear(tr.features, tr.labels, lc);
  const Matrix prob = model.predict(va.features);
  double f1 = 0.0;
  for (std::size_t k = 0; k < va.heads(); ++k)
    f1 += classification_scores(confusion(prob.column(k), va.labels.column(k))).f1;
  f1 /= static_cast<double>(va.heads());
  return (1.0 - f1) + lambda * static_cast<double>(card) / static_cast<double>(mask.size());
}

double bench_fn(std::string_view name, std::span<const double> x) {
  double s = 0.0;
  if (name == "sphere") {
    for (double v : x) s += v * v;
    return s;
  }
  if (name == "rastrigin") {
    for (double v : x) s += v * v - 10.0 * std::cos(2.0 * std::numbers::pi * v);
    return 10.0 * static_cast<double>(x.size()) + s;
  }
  if (name == "rosenbrock") {
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
      const double a = x[i + 1] - x[i] * x[i];
      const double b = 1.0 - x[i];
      s += 100.0 * a * a + b * b;
    }
    return s;
  }
  fail(ErrorCode::UnknownFunction, "unknown benchmark function '" + std::string(name) + "'");
}

SearchSpace bench_space(std::string_view name, std::size_t dim) {
  if (name == "sphere" || name == "rastrigin") return SearchSpace::cube(dim, -5.12, 5.12);
  if (name == "rosenbrock") return SearchSpace::cube(dim, -5.0, 10.0);
  fail(ErrorCode::UnknownFunction, "unknown benchmark function '" + std::string(name) + "'");
}

}  // namespace valleyforge
