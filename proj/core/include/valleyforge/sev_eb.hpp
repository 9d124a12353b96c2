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

// SEV-EB: Stabilized Energy Valley Optimization with Enhanced Bounds.
//
// A population search for box-constrained minimisation. Every iteration:
//
//  1. The stability bound SB is computed from the best and worst fitness of
//     the population after shifting fitness so the best value is 1:
//         SB = (bst * cu) / (wst * cu + eps)  ==  1 / (wst - bst + 1)
//     The particle's own fitness cu cancels; SB lies in (0, 1].
//  2. Each particle's stability level SL = (f - bst) / (wst - bst + eps)
//     in [0, 1] is compared against SB.
//       SL >  SB  unstable, decays:
//                 alpha decay (p = alpha_prob): each coordinate copied from
//                   the best-so-far position with probability alpha_frac
//                 gamma decay: x += r (x_j - x), j another random particle
//       SL <= SB  stable, drifts: x += r1 (x_best - x) + r2 (centroid - x)
//                 + s * N(0,1) per coordinate, s the population std of that
//                 coordinate
//  3. The search box shrinks linearly around the best-so-far position,
//         rho_t = rho0 (1 - t / T),  half width rho_t (ub - lb),
//     clipped to the original box and never narrower than min_width.
//
// A moved particle whose fitness got worse returns to its previous position
// (when that position is still inside the shrunken box). The best-so-far
// archive is kept separately, so the recorded history never increases.
//
// Randomness for particle i at iteration t comes from a stream keyed on
// (seed, t, i); fitness calls of one iteration may run on several threads
// without changing any output bit.

#ifndef VALLEYFORGE_SEV_EB_HPP_
#define VALLEYFORGE_SEV_EB_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "valleyforge/dataio.hpp"
#include "valleyforge/features.hpp"
#include "valleyforge/matrix.hpp"
#include "valleyforge/network.hpp"

namespace valleyforge {

struct SearchSpace {
  std::vector<double> lb;
  std::vector<double> ub;

  static SearchSpace cube(std::size_t dim, double lo, double hi);
  std::size_t dim() const noexcept { return lb.size(); }
  // Throws ConfigInvalid unless lb_d < ub_d everywhere.
  void validate() const;
  bool contains(std::span<const double> x) const;
  bool operator==(const SearchSpace&) const = default;
};

struct Population {
  Matrix positions;  // P x D
  std::vector<double> fitness;

  std::size_t size() const noexcept { return positions.rows(); }
};

struct IterationState {
  std::size_t t = 0;
  long long i_remaining = 0;  // iterations left after this one; loop runs while >= 0
  double bst_fit = 0.0;
  double wst_fit = 0.0;
  SearchSpace bounds;
  std::vector<double> x_best;
  double f_best = 0.0;
};

struct SevEbConfig {
  std::size_t pop_size = 30;
  std::size_t max_iters = 60;
  std::uint64_t seed = 0;
  double eps = 1e-12;
  double rho0 = 1.0;
  double alpha_prob = 0.5;
  double alpha_frac = 0.3;
  double min_width = 1e-9;
  double lambda = 0.05;
  std::size_t surrogate_epochs = 20;
  std::size_t threads = 1;  // fitness evaluations in flight per iteration

  void validate() const;
  bool operator==(const SevEbConfig&) const = default;
};

struct OptResult {
  std::vector<double> x_best;
  double f_best = 0.0;
  std::vector<double> history;  // best-so-far after each of the T+1 sweeps
  std::size_t evaluations = 0;
  Population final_population;
};

using FitnessFn = std::function<double(std::span<const double>)>;

// Throws PopulationTooSmall when P < 4.
Population init_population(const SearchSpace& space, std::size_t pop_size, std::uint64_t seed);

// Throws NonFiniteInput.
double stability_bound(double bst_fit, double cu_fit, double wst_fit, double eps = 1e-12);

double stability_level(double f, double bst_fit, double wst_fit, double eps = 1e-12);

Population update_positions(const Population& pop, const IterationState& state,
                            const SevEbConfig& config);

SearchSpace shrink_bounds(const SearchSpace& space, std::span<const double> x_best,
                          std::size_t t, std::size_t max_iters, double rho0, double min_width);

// Throws NonFiniteFitness.
OptResult optimize(const FitnessFn& fitness, const SearchSpace& space, const SevEbConfig& config);

// Same evaluation budget as optimize with pop_size * (max_iters + 1) uniform
// samples; history holds the best-so-far after each block of pop_size draws.
OptResult random_search(const FitnessFn& fitness, const SearchSpace& space,
                        const SevEbConfig& config);

// Strict threshold at zero: x_d > 0 selects feature d.
FeatureMask binarize(std::span<const double> x);

// (1 - F1_val) + lambda * |mask| / D of a linear surrogate trained on the
// masked training columns; an empty mask scores 2.0 without training. F1 is
// macro-averaged over label heads.
double fs_fitness(const FeatureMask& mask, const RecordTable& train, const RecordTable& val,
                  double lambda, std::size_t surrogate_epochs, std::uint64_t seed);

// sphere, rastrigin, rosenbrock. Throws UnknownFunction.
double bench_fn(std::string_view name, std::span<const double> x);
SearchSpace bench_space(std::string_view name, std::size_t dim);

}  // namespace valleyforge

#endif  // VALLEYFORGE_SEV_EB_HPP_
