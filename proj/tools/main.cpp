// blockscene command-line tool.
//
// Exit codes: 0 success, 1 input or transport error, 2 placement rejected.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "blockscene/arranger.hpp"
#include "blockscene/error.hpp"
#include "blockscene/io.hpp"
#include "blockscene/metrics.hpp"
#include "blockscene/planner.hpp"

namespace fs = std::filesystem;
using namespace blockscene;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitRejected = 2;

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string backend;
  std::string out_dir = ".";
};

void add_common(CLI::App* cmd, CommonOptions& opts, bool with_backend, bool with_out_dir) {
  cmd->add_option("--config", opts.config_path, "JSON run configuration")->check(CLI::ExistingFile);
  cmd->add_option("--seed", opts.seed, "RNG seed (overrides the config)");
  if (with_backend) {
    cmd->add_option("--backend", opts.backend, "scripted:<dir> or remote:<url>");
  }
  if (with_out_dir) cmd->add_option("--out-dir", opts.out_dir, "directory for output files");
}

RunConfig resolve_config(const CommonOptions& opts) {
  RunConfig config = opts.config_path.empty() ? RunConfig{} : load_run_config(opts.config_path);
  if (opts.seed) {
    config.seed = *opts.seed;
    config.ga.seed = *opts.seed;
  }
  if (!opts.backend.empty()) config.backend = parse_backend_spec(opts.backend);
  apply_environment(config, process_env);
  config.validate();
  return config;
}

SceneGraphStore read_scene(const std::string& path) {
  try {
    return SceneGraphStore::load_text(read_text_file(path));
  } catch (const InputError& err) {
    throw InputError(path + ": " + err.what());
  }
}

json read_json(const std::string& path) {
  try {
    return json::parse(read_text_file(path));
  } catch (const json::parse_error& err) {
    throw InputError(path + ": " + err.what());
  }
}

ConstraintsFile read_constraints(const std::string& path) {
  try {
    return parse_constraints_file(read_json(path));
  } catch (const InputError& err) {
    throw InputError(path + ": " + err.what());
  }
}

fs::path ensure_dir(const std::string& dir) {
  fs::path p(dir);
  fs::create_directories(p);
  return p;
}

// --- commands --------------------------------------------------------------

int cmd_show_config(const CommonOptions& opts) {
  std::cout << to_json(resolve_config(opts)).dump(2) << '\n';
  return kExitOk;
}

int cmd_validate(const CommonOptions& opts, const std::string& scene_path,
                 const std::string& constraints_path) {
  resolve_config(opts);
  if (!scene_path.empty()) {
    const SceneGraphStore store = read_scene(scene_path);
    std::cout << scene_path << ": ok (" << store.node_count() << " objects, " << store.edge_count()
              << " relations)\n";
    if (!constraints_path.empty()) {
      const ConstraintsFile cf = read_constraints(constraints_path);
      if (!store.contains(cf.movable)) throw InputError(constraints_path + ": movable: unknown object: " + cf.movable);
      for (std::size_t i = 0; i < cf.relations.size(); ++i) {
        if (!store.contains(cf.relations[i].from)) {
          throw InputError(constraints_path + ": relations[" + std::to_string(i) +
                           "].reference: unknown object: " + cf.relations[i].from);
        }
      }
      std::cout << constraints_path << ": ok (" << cf.relations.size() << " relations)\n";
    }
  } else if (!constraints_path.empty()) {
    read_constraints(constraints_path);
    std::cout << constraints_path << ": ok\n";
  }
  if (!opts.config_path.empty()) std::cout << opts.config_path << ": ok\n";
  return kExitOk;
}

int cmd_solve(const CommonOptions& opts, const std::string& scene_path,
              const std::string& constraints_path) {
  const RunConfig config = resolve_config(opts);
  SceneGraphStore store = read_scene(scene_path);
  const ConstraintsFile cf = read_constraints(constraints_path);
  if (!store.contains(cf.movable)) throw InputError(constraints_path + ": movable: unknown object: " + cf.movable);

  PlacementTask task{cf.movable, object_bounds(store.object(cf.movable)).center(), {}};
  if (cf.proposed_position) {
    store.update_placement(cf.movable, *cf.proposed_position - task.proposed_position);
    task.proposed_position = *cf.proposed_position;
  }
  for (std::size_t i = 0; i < cf.relations.size(); ++i) {
    const RelationEdge& e = cf.relations[i];
    if (!store.contains(e.from)) {
      throw InputError(constraints_path + ": relations[" + std::to_string(i) +
                       "].reference: unknown object: " + e.from);
    }
    store.add_relation(e);
    task.rough_relations.push_back({e.from, e.kind, e.distance});
  }

  auto backend = make_backend(config.backend);
  const fs::path out = ensure_dir(opts.out_dir);
  try {
    const Placement placement = place_object(store, task, *backend, config.placement_options());
    for (const std::string& d : placement.diagnostics) std::cerr << "warning: " << d << '\n';
    write_text_file(out / "scene.json", store.snapshot_text());
    write_text_file(out / "report.json", placement_report(cf.movable, placement, true).dump(2) + "\n");
    std::cout << "placed '" << cf.movable << "': final_error " << placement.result.final_error
              << " after " << placement.result.generations_run << " generations\n";
    return kExitOk;
  } catch (const PlacementRejected& err) {
    write_text_file(out / "report.json",
                    placement_report(cf.movable, err.placement(), false).dump(2) + "\n");
    std::cerr << "error: " << err.what() << '\n';
    return kExitRejected;
  }
}

int cmd_pipeline(const CommonOptions& opts, const std::string& request,
                 const std::string& scene_path) {
  const RunConfig config = resolve_config(opts);
  SceneGraphStore store = scene_path.empty() ? SceneGraphStore{} : read_scene(scene_path);
  auto backend = make_backend(config.backend);

  PipelineReport report;
  try {
    report = run_pipeline(request, store, *backend, config.placement_options());
  } catch (const PipelineError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return err.failure() == PipelineFailure::rejection ? kExitRejected : kExitInput;
  }
  for (const std::string& d : report.diagnostics) std::cerr << "warning: " << d << '\n';

  const SceneMetrics metrics = compute_metrics(store, config.contact_epsilon);
  const fs::path out = ensure_dir(opts.out_dir);
  write_text_file(out / "scene.json", store.snapshot_text());
  write_text_file(out / "metrics.json", to_json(metrics).dump(2) + "\n");
  write_text_file(out / "scene.obj", export_obj(store));
  json placements = json::array();
  for (const ObjectOutcome& o : report.objects) {
    if (o.placement) placements.push_back(placement_report(o.name, *o.placement, true));
  }
  write_text_file(out / "report.json", json{{"scene_name", report.plan.scene_name},
                                            {"placements", std::move(placements)},
                                            {"diagnostics", report.diagnostics}}
                                           .dump(2) + "\n");
  std::cout << "scene '" << report.plan.scene_name << "': " << store.node_count() << " objects\n"
            << format_table(metrics);
  return kExitOk;
}

int cmd_metrics(const CommonOptions& opts, const std::string& scene_path, bool write) {
  const RunConfig config = resolve_config(opts);
  const SceneGraphStore store = read_scene(scene_path);
  const SceneMetrics metrics = compute_metrics(store, config.contact_epsilon);
  std::cout << format_table(metrics);
  if (write) {
    write_text_file(ensure_dir(opts.out_dir) / "metrics.json", to_json(metrics).dump(2) + "\n");
  }
  return kExitOk;
}

int cmd_export(const std::string& scene_path, const std::string& out_path) {
  const SceneGraphStore store = read_scene(scene_path);
  const fs::path out(out_path);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  write_text_file(out, export_obj(store));
  std::cout << "wrote " << out_path << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"blockscene: constraint-driven construction of cuboid-block scenes"};
  app.require_subcommand(0, 1);

  CommonOptions opts;
  bool show_config_flag = false;
  app.add_flag("--show-config", show_config_flag, "print the resolved configuration and exit");
  app.add_option("--config", opts.config_path, "JSON run configuration")->check(CLI::ExistingFile);

  std::string scene_path;
  std::string constraints_path;
  std::string request;
  std::string out_path;
  bool no_write = false;

  auto* show = app.add_subcommand("show-config", "print the resolved configuration");
  add_common(show, opts, true, false);

  auto* validate = app.add_subcommand("validate", "check scene, constraints and config files");
  add_common(validate, opts, true, false);
  validate->add_option("--scene", scene_path, "scene document");
  validate->add_option("--constraints", constraints_path, "placement request");

  auto* solve = app.add_subcommand("solve", "place one object against its constraints");
  add_common(solve, opts, true, true);
  solve->add_option("--scene", scene_path, "scene document")->required();
  solve->add_option("--constraints", constraints_path, "placement request")->required();

  auto* pipeline = app.add_subcommand("pipeline", "build a scene from a text request");
  add_common(pipeline, opts, true, true);
  pipeline->add_option("request", request, "scene request text")->required();
  pipeline->add_option("--scene", scene_path, "existing scene to extend");

  auto* metrics = app.add_subcommand("metrics", "overlap and isolation scores of a scene");
  add_common(metrics, opts, false, true);
  metrics->add_option("--scene", scene_path, "scene document")->required();
  metrics->add_flag("--no-write", no_write, "print only; do not write metrics.json");

  auto* exporter = app.add_subcommand("export", "write the scene as Wavefront OBJ");
  exporter->add_option("--scene", scene_path, "scene document")->required();
  exporter->add_option("--out", out_path, "OBJ file to write")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (show_config_flag || show->parsed()) return cmd_show_config(opts);
    if (validate->parsed()) return cmd_validate(opts, scene_path, constraints_path);
    if (solve->parsed()) return cmd_solve(opts, scene_path, constraints_path);
    if (pipeline->parsed()) return cmd_pipeline(opts, request, scene_path);
    if (metrics->parsed()) return cmd_metrics(opts, scene_path, !no_write);
    if (exporter->parsed()) return cmd_export(scene_path, out_path);
    std::cout << app.help();
    return kExitInput;
  } catch (const TransportError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitInput;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitInput;
  }
}
