#include "blockscene/ga_solver.hpp"

#include <algorithm>
#include <numeric>

#include "blockscene/error.hpp"
#include "json_fields.hpp"

namespace blockscene {

void GAConfig::validate() const {
  auto fail = [](const char* msg) { throw InputError(std::string("ga config: ") + msg); };
  if (population_size < 1) fail("population_size must be positive");
  if (max_generations < 1) fail("max_generations must be positive");
  if (tournament_size < 1) fail("tournament_size must be positive");
  if (tournament_size > population_size) fail("tournament_size must be <= population_size");
  if (elite_count < 0 || elite_count >= population_size) {
    fail("elite_count must be in [0, population_size)");
  }
  if (!(crossover_rate >= 0.0 && crossover_rate <= 1.0)) fail("crossover_rate must be in [0, 1]");
  if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0)) fail("mutation_rate must be in [0, 1]");
  if (!(mutation_sigma_scale > 0.0) || !std::isfinite(mutation_sigma_scale)) {
    fail("mutation_sigma_scale must be positive");
  }
  if (!(convergence_epsilon >= 0.0)) fail("convergence_epsilon must be >= 0");
  if (stall_generations < 1) fail("stall_generations must be positive");
}

nlohmann::json to_json(const GAConfig& c) {
  return {{"population_size", c.population_size},
          {"max_generations", c.max_generations},
          {"tournament_size", c.tournament_size},
          {"elite_count", c.elite_count},
          {"crossover_rate", c.crossover_rate},
          {"mutation_rate", c.mutation_rate},
          {"mutation_sigma_scale", c.mutation_sigma_scale},
          {"convergence_epsilon", c.convergence_epsilon},
          {"stall_generations", c.stall_generations},
          {"seed", c.seed}};
}

GAConfig ga_config_from_json(const nlohmann::json& j, GAConfig c) {
  using namespace detail;
  const std::string path = "ga";
  expect_object(j, path);
  reject_unknown(j,
                 {"population_size", "max_generations", "tournament_size", "elite_count",
                  "crossover_rate", "mutation_rate", "mutation_sigma_scale",
                  "convergence_epsilon", "stall_generations", "seed"},
                 path);
  auto int_field = [&](const char* key, int& out) {
    if (const auto* v = optional_field(j, key)) {
      out = static_cast<int>(as_integer(*v, join_path(path, key)));
    }
  };
  auto real_field = [&](const char* key, double& out) {
    if (const auto* v = optional_field(j, key)) out = as_number(*v, join_path(path, key));
  };
  int_field("population_size", c.population_size);
  int_field("max_generations", c.max_generations);
  int_field("tournament_size", c.tournament_size);
  int_field("elite_count", c.elite_count);
  real_field("crossover_rate", c.crossover_rate);
  real_field("mutation_rate", c.mutation_rate);
  real_field("mutation_sigma_scale", c.mutation_sigma_scale);
  real_field("convergence_epsilon", c.convergence_epsilon);
  int_field("stall_generations", c.stall_generations);
  if (const auto* v = optional_field(j, "seed")) {
    if (!v->is_number_unsigned() && !v->is_number_integer()) {
      field_error("ga.seed", "expected an integer");
    }
    c.seed = v->is_number_unsigned() ? v->get<std::uint64_t>()
                                     : static_cast<std::uint64_t>(v->get<std::int64_t>());
  }
  c.validate();
  return c;
}

Vec3 search_sigma(const AABB& ref_bounds, const AABB& mov_bounds) {
  return 0.5 * (ref_bounds.size() + mov_bounds.size());
}

Population heuristic_init(const GAConfig& config, const AABB& ref_bounds, const AABB& mov_bounds,
                          Rng& rng) {
  const Vec3 sigma = search_sigma(ref_bounds, mov_bounds);
  Population pop;
  pop.reserve(static_cast<std::size_t>(config.population_size));
  pop.push_back(Genome{});
  while (static_cast<int>(pop.size()) < config.population_size) {
    Genome g;
    for (int axis = 0; axis < 3; ++axis) g.motion[axis] = rng.normal(0.0, sigma[axis]);
    pop.push_back(g);
  }
  return pop;
}

std::vector<double> evaluate(const Population& population, const FitnessFn& fitness) {
  std::vector<double> errors;
  errors.reserve(population.size());
  for (const Genome& g : population) errors.push_back(fitness(g));
  return errors;
}

namespace {

// Indices ordered by (error, index).
std::vector<std::size_t> rank(std::span<const double> errors) {
  std::vector<std::size_t> order(errors.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return errors[a] < errors[b]; });
  return order;
}

std::size_t tournament(std::span<const double> errors, int size, Rng& rng) {
  std::size_t best = rng.below(errors.size());
  for (int i = 1; i < size; ++i) {
    const std::size_t challenger = rng.below(errors.size());
    if (errors[challenger] < errors[best] ||
        (errors[challenger] == errors[best] && challenger < best)) {
      best = challenger;
    }
  }
  return best;
}

}  // namespace

Population evolve_generation(const Population& population, std::span<const double> errors,
                             const Vec3& sigma, const GAConfig& config, Rng& rng) {
  if (population.empty()) throw InputError("evolve_generation: empty population");
  if (errors.size() != population.size()) {
    throw InputError("evolve_generation: one error per genome required");
  }

  Population next;
  next.reserve(population.size());
  const auto order = rank(errors);
  const auto elites = std::min<std::size_t>(static_cast<std::size_t>(config.elite_count),
                                            population.size());
  for (std::size_t i = 0; i < elites; ++i) next.push_back(population[order[i]]);

  const int tsize = std::min<int>(config.tournament_size, static_cast<int>(population.size()));
  while (next.size() < population.size()) {
    const Genome& p1 = population[tournament(errors, tsize, rng)];
    const Genome& p2 = population[tournament(errors, tsize, rng)];
    Genome child = p1;
    if (rng.bernoulli(config.crossover_rate)) {
      for (int axis = 0; axis < 3; ++axis) {
        const double a = rng.uniform01();
        child.motion[axis] = a * p1.motion[axis] + (1.0 - a) * p2.motion[axis];
      }
    }
    for (int axis = 0; axis < 3; ++axis) {
      if (rng.bernoulli(config.mutation_rate)) {
        child.motion[axis] += rng.normal(0.0, config.mutation_sigma_scale * sigma[axis]);
      }
    }
    next.push_back(child);
  }
  return next;
}

Population evolve_generation(const Population& population, const FitnessFn& fitness,
                             const Vec3& sigma, const GAConfig& config, Rng& rng) {
  const auto errors = evaluate(population, fitness);
  return evolve_generation(population, errors, sigma, config, rng);
}

SolveResult solve_traced(const ConstraintSet& constraints, const BoundsById& ref_bounds_by_id,
                         const ObjectInstance& movable, const GAConfig& config,
                         const std::function<void(int, double)>& on_generation) {
  config.validate();
  if (constraints.empty()) throw InputError("solve: empty constraint set");
  for (const Constraint& c : constraints) {
    if (!ref_bounds_by_id.contains(c.reference())) throw UnknownObjectError(c.reference());
    if (c.movable() != movable.id()) {
      throw InputError("solve: constraint targets '" + c.movable() + "' but the movable is '" +
                       movable.id() + "'");
    }
  }

  const AABB start = object_bounds(movable);
  const AABB& strong = ref_bounds_by_id.find(constraints.front().reference())->second;
  const Vec3 sigma = search_sigma(strong, start);
  const FitnessFn fitness = [&](const Genome& g) {
    return total_error(constraints, ref_bounds_by_id, start.translated(g.motion)).total_error;
  };

  Rng rng(config.seed);
  Population pop = heuristic_init(config, strong, start, rng);
  std::vector<double> errors = evaluate(pop, fitness);

  auto best_index = [&] {
    return static_cast<std::size_t>(std::min_element(errors.begin(), errors.end()) -
                                    errors.begin());
  };
  std::size_t bi = best_index();
  Genome best = pop[bi];
  double best_error = errors[bi];
  int generation = 1;
  int stall = 0;
  if (on_generation) on_generation(generation, best_error);

  bool converged = false;
  while (true) {
    if (best_error <= config.convergence_epsilon || stall >= config.stall_generations) {
      converged = true;
      break;
    }
    if (generation >= config.max_generations) break;

    pop = evolve_generation(pop, errors, sigma, config, rng);
    errors = evaluate(pop, fitness);
    ++generation;
    bi = best_index();
    if (errors[bi] < best_error) {
      best = pop[bi];
      best_error = errors[bi];
      stall = 0;
    } else {
      ++stall;
    }
    if (on_generation) on_generation(generation, best_error);
  }

  SolveResult result;
  result.best_motion = best.motion;
  result.residuals = total_error(constraints, ref_bounds_by_id, start.translated(best.motion));
  result.final_error = result.residuals.total_error;
  result.generations_run = generation;
  result.converged = converged;
  return result;
}

SolveResult solve(const ConstraintSet& constraints, const BoundsById& ref_bounds_by_id,
                  const ObjectInstance& movable, const GAConfig& config) {
  return solve_traced(constraints, ref_bounds_by_id, movable, config, {});
}

}  // namespace blockscene
