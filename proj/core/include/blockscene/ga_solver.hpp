#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "blockscene/constraints.hpp"
#include "blockscene/geometry.hpp"
#include "blockscene/random.hpp"

namespace blockscene {

/// A candidate translation of the movable object.
struct Genome {
  Vec3 motion;
  friend bool operator==(const Genome&, const Genome&) = default;
};

using Population = std::vector<Genome>;

struct GAConfig {
  int population_size = 64;
  int max_generations = 500;
  int tournament_size = 4;
  int elite_count = 2;
  double crossover_rate = 0.9;
  double mutation_rate = 0.2;
  double mutation_sigma_scale = 0.1;
  double convergence_epsilon = 1e-8;
  int stall_generations = 50;
  std::uint64_t seed = 0;

  /// Throws InputError when a field is out of range.
  void validate() const;
};

nlohmann::json to_json(const GAConfig& config);
/// Fields missing from `j` keep the values already in `base`.
GAConfig ga_config_from_json(const nlohmann::json& j, GAConfig base = {});

struct SolveResult {
  Vec3 best_motion;
  double final_error = 0.0;
  ResidualReport residuals;
  int generations_run = 0;
  bool converged = false;
};

using FitnessFn = std::function<double(const Genome&)>;

/// Per-axis spread used for initialization and, scaled, for mutation.
Vec3 search_sigma(const AABB& ref_bounds, const AABB& mov_bounds);

/// Genome 0 is the zero motion, keeping the proposed position. The rest are
/// drawn per axis from N(0, search_sigma(ref, mov)).
Population heuristic_init(const GAConfig& config, const AABB& ref_bounds, const AABB& mov_bounds,
                          Rng& rng);

std::vector<double> evaluate(const Population& population, const FitnessFn& fitness);

/// One generation step. The elite_count lowest-error genomes are copied
/// first; every other slot is filled by two tournament winners blended gene
/// by gene (child = a*p1 + (1-a)*p2, a ~ U[0,1]) with probability
/// crossover_rate, otherwise a clone of the first winner, then each gene is
/// perturbed by N(0, mutation_sigma_scale * sigma[axis]) with probability
/// mutation_rate.
Population evolve_generation(const Population& population, std::span<const double> errors,
                             const Vec3& sigma, const GAConfig& config, Rng& rng);
Population evolve_generation(const Population& population, const FitnessFn& fitness,
                             const Vec3& sigma, const GAConfig& config, Rng& rng);

/// Places `movable` by minimizing the total squared residual of `constraints`
/// over translations of its bounding box. The first constraint's reference
/// (the strong reference) sets the search spread. Returns the best genome
/// seen in any generation.
///
/// Stops when the best error is <= convergence_epsilon, when it has not
/// improved for stall_generations, or after max_generations (the initial
/// population counts as generation 1). Throws InputError on an empty set and
/// UnknownObjectError for an unresolvable reference.
SolveResult solve(const ConstraintSet& constraints, const BoundsById& ref_bounds_by_id,
                  const ObjectInstance& movable, const GAConfig& config);

/// Like solve(), but calls `on_generation(index, best_error)` after each
/// generation. Used to observe convergence.
SolveResult solve_traced(const ConstraintSet& constraints, const BoundsById& ref_bounds_by_id,
                         const ObjectInstance& movable, const GAConfig& config,
                         const std::function<void(int, double)>& on_generation);

}  // namespace blockscene
