#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "blockscene/arranger.hpp"
#include "blockscene/ga_solver.hpp"
#include "blockscene/metrics.hpp"
#include "blockscene/planner_backend.hpp"
#include "blockscene/scene_graph.hpp"

namespace blockscene {

struct BackendChoice {
  enum class Type { scripted, remote };
  Type type = Type::scripted;
  std::filesystem::path fixtures;  // scripted; empty means no fixtures
  RemoteConfig remote;
};

/// "scripted:<dir>" or "remote:<url>". Throws InputError.
BackendChoice parse_backend_spec(std::string_view spec);

struct RunConfig {
  GAConfig ga;
  ConstraintBudget budgets;
  double contact_epsilon = kDefaultContactEpsilon;
  double placement_ceiling = kDefaultPlacementCeiling;
  BackendChoice backend;
  std::uint64_t seed = 0;

  /// Throws InputError for out-of-range values or a missing fixture path.
  void validate() const;
  /// GA settings with `seed` applied, plus budget and ceiling.
  PlacementOptions placement_options() const;
};

/// Fields absent from `j` keep the values in `base`. "seed" at top level
/// wins over "ga.seed".
RunConfig run_config_from_json(const nlohmann::json& j, RunConfig base = {});
nlohmann::json to_json(const RunConfig& config);
RunConfig load_run_config(const std::filesystem::path& path);

using EnvLookup = std::function<std::optional<std::string>(const char*)>;
/// PLANNER_URL and PLANNER_TOKEN override the remote backend's URL and token.
void apply_environment(RunConfig& config, const EnvLookup& env);
std::optional<std::string> process_env(const char* name);

std::unique_ptr<PlannerBackend> make_backend(const BackendChoice& choice);

/// Placement request read by the `solve` command:
///   {"movable": id, "proposed_position": [x,y,z]?,
///    "relations": [{"reference", "kind", "distance"?, "strength"?, "mode"?}]}
/// "strength" defaults to strong.
struct ConstraintsFile {
  std::string movable;
  std::optional<Vec3> proposed_position;
  std::vector<RelationEdge> relations;
};
ConstraintsFile parse_constraints_file(const nlohmann::json& doc);

/// Wavefront OBJ: one "o <name>" group per object in id order, 8 vertices
/// and 12 outward-facing triangles per block, 1-based global indices.
std::string export_obj(const SceneGraphStore& store);

nlohmann::json placement_report(std::string_view movable, const Placement& placement, bool accepted);

std::string read_text_file(const std::filesystem::path& path);
/// Writes via a temporary file and rename.
void write_text_file(const std::filesystem::path& path, std::string_view text);
/// Shortest decimal that round-trips to the same double.
std::string format_number(double v);

}  // namespace blockscene
