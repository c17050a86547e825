#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "blockscene/arranger.hpp"
#include "blockscene/planner_backend.hpp"
#include "blockscene/scene_graph.hpp"

namespace blockscene {

struct PlannedObject {
  std::string name;
  std::string description;
};

/// (movable, kind, reference) with optional gap. When strength is not given,
/// the first reference named for a movable is strong and the others weak.
struct PlannedRelation {
  std::string movable;
  ConstraintKind kind = ConstraintKind::concentric;
  std::string reference;
  std::optional<double> distance;
  std::optional<Strength> strength;
  std::optional<GapMode> mode;
};

struct SceneryPlan {
  std::string scene_name;
  std::vector<PlannedObject> objects;
  std::vector<PlannedRelation> relations;

  /// Relations whose movable is `name`, with strength resolved.
  std::vector<PlannedRelation> relations_for(std::string_view name) const;
  /// The strong reference of `name`, if it has relations.
  std::optional<std::string> strong_reference_of(std::string_view name) const;
};

/// A relation between two parts of one object; `reference` is a part name.
struct PartRelation {
  ConstraintKind kind = ConstraintKind::concentric;
  std::string reference;
  double distance = 0.0;
  std::optional<GapMode> mode;
};

struct PartDesign {
  std::string name;
  Extents extents;
  std::vector<PartRelation> relations;
};

struct ObjectDesign {
  std::string name;
  Extents overall_extents;
  std::vector<PartDesign> parts;
};

struct PartViolation {
  std::string part;
  ConstraintKind kind = ConstraintKind::concentric;
  std::string reference;
  double residual = 0.0;
};

struct ManufactureResult {
  ObjectInstance object;  // bounds centered on proposed_position
  Vec3 proposed_position;
  std::vector<PartViolation> part_violations;
};

inline constexpr double kExtentsSanityBand = 0.2;
inline constexpr double kPartRelationTolerance = 0.05;
inline constexpr double kProximityFactor = 2.0;

// Response validators. Each throws StageError with the offending field.
SceneryPlan parse_scene_plan(const nlohmann::json& response, const SceneGraphStore& store);
ObjectDesign parse_object_design(const nlohmann::json& response, std::string_view expected_name);
/// Checks the extents band and proximity; part relations are evaluated and
/// reported, not enforced.
ManufactureResult parse_manufacture(const nlohmann::json& response, const ObjectDesign& design,
                                    const SceneGraphStore& store,
                                    const std::optional<std::string>& strong_reference);

nlohmann::json to_json(const SceneryPlan& plan);
nlohmann::json to_json(const ObjectDesign& design);

SceneryPlan design_scene(std::string_view request, const SceneGraphStore& store,
                         PlannerBackend& backend);
ObjectDesign design_object(std::string_view name, const SceneryPlan& plan,
                           const SceneGraphStore& store, PlannerBackend& backend);
ManufactureResult manufacture_object(const ObjectDesign& design, const SceneGraphStore& store,
                                     PlannerBackend& backend,
                                     const std::optional<std::string>& strong_reference = {});

/// Plan objects ordered so every relation's reference precedes its movable;
/// ties keep plan order. Throws StageError on a cycle.
std::vector<std::string> construction_order(const SceneryPlan& plan);

struct ObjectOutcome {
  std::string name;
  std::optional<Placement> placement;  // empty when the object had no relations
  std::vector<PartViolation> part_violations;
};

struct PipelineReport {
  SceneryPlan plan;
  std::vector<ObjectOutcome> objects;
  std::vector<std::string> diagnostics;
};

/// Why a pipeline run stopped.
enum class PipelineFailure { stage, transport, rejection };

class PipelineError : public Error {
 public:
  PipelineError(PipelineFailure failure, std::string stage, std::string object,
                const std::string& message)
      : Error(message), failure_(failure), stage_(std::move(stage)), object_(std::move(object)) {}

  PipelineFailure failure() const noexcept { return failure_; }
  bool retryable() const noexcept { return failure_ == PipelineFailure::transport; }
  const std::string& stage() const noexcept { return stage_; }
  const std::string& object() const noexcept { return object_; }

 private:
  PipelineFailure failure_;
  std::string stage_;
  std::string object_;
};

/// design_scene, then for each object in construction order: design,
/// manufacture, add to the store with its plan relations, and place. Each
/// object is committed to `store` only after it is placed, so a failure
/// leaves exactly the completed objects behind. Throws PipelineError.
PipelineReport run_pipeline(std::string_view request, SceneGraphStore& store,
                            PlannerBackend& backend, const PlacementOptions& options = {});

}  // namespace blockscene
