#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "blockscene/constraints.hpp"
#include "blockscene/ga_solver.hpp"
#include "blockscene/planner_backend.hpp"
#include "blockscene/scene_graph.hpp"

namespace blockscene {

struct RoughRelation {
  std::string reference;
  ConstraintKind kind = ConstraintKind::concentric;
  std::optional<double> distance;
};

struct PlacementTask {
  std::string movable;
  Vec3 proposed_position;  // already applied to the object's geometry
  std::vector<RoughRelation> rough_relations;
};

/// The strong reference's constraints followed by each weak reference's.
struct GatheredConstraints {
  ReferenceConstraints strong;
  std::vector<ReferenceConstraints> weak;

  ConstraintSet flatten() const;
};

/// Throws UnknownObjectError for a missing movable or rough-relation
/// reference, InputError for an empty relation list, BudgetError from the
/// reference queries.
GatheredConstraints gather_references(const SceneGraphStore& store, const PlacementTask& task,
                                      const ConstraintBudget& budget = {});
ConstraintSet gather_constraints(const SceneGraphStore& store, const PlacementTask& task,
                                 const ConstraintBudget& budget = {});

struct CompletionResult {
  GatheredConstraints gathered;
  ConstraintSet constraints;  // gathered.flatten()
  std::vector<std::string> diagnostics;  // one line per dropped suggestion
};

/// Asks the backend once for extra constraints and keeps only those that
/// name a catalog kind, a known reference (the strong one or an adjacent
/// weak one) and fit the budget. Transport errors propagate.
CompletionResult complete_constraints(const GatheredConstraints& partial,
                                      const SceneGraphStore& store, const PlacementTask& task,
                                      PlannerBackend& backend, const ConstraintBudget& budget = {});

using SolverFn = std::function<SolveResult(const ConstraintSet&, const BoundsById&,
                                           const ObjectInstance&, const GAConfig&)>;

inline constexpr double kDefaultPlacementCeiling = 1e-2;

struct PlacementOptions {
  GAConfig ga;
  ConstraintBudget budget;
  double placement_ceiling = kDefaultPlacementCeiling;
  SolverFn solver;  // empty: blockscene::solve
};

struct Placement {
  SolveResult result;
  ConstraintSet constraints;
  std::vector<std::string> diagnostics;
};

/// The solver's best placement still has total error above the ceiling.
class PlacementRejected : public Error {
 public:
  explicit PlacementRejected(Placement placement);
  const Placement& placement() const noexcept { return placement_; }

 private:
  Placement placement_;
};

/// gather -> complete -> solve -> write back. On success the store gains
/// exactly one revision (the placement update); on any failure it is left
/// untouched.
Placement place_object(SceneGraphStore& store, const PlacementTask& task, PlannerBackend& backend,
                       const PlacementOptions& options = {});

/// "kind(reference)  residual" lines for diagnostics.
std::string format_residuals(const ConstraintSet& constraints, const ResidualReport& report);

}  // namespace blockscene
