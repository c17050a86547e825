#include "blockscene/io.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "blockscene/error.hpp"
#include "json_fields.hpp"

namespace blockscene {

using nlohmann::json;
using namespace detail;

BackendChoice parse_backend_spec(std::string_view spec) {
  BackendChoice choice;
  if (spec.starts_with("scripted:")) {
    choice.type = BackendChoice::Type::scripted;
    choice.fixtures = std::string(spec.substr(9));
  } else if (spec == "scripted") {
    choice.type = BackendChoice::Type::scripted;
  } else if (spec.starts_with("remote:")) {
    choice.type = BackendChoice::Type::remote;
    choice.remote.url = std::string(spec.substr(7));
  } else {
    throw InputError("backend: expected scripted:<dir> or remote:<url>, got '" + std::string(spec) + "'");
  }
  return choice;
}

void RunConfig::validate() const {
  ga.validate();
  budgets.validate();
  if (!(contact_epsilon >= 0.0) || !std::isfinite(contact_epsilon)) {
    throw InputError("contact_epsilon must be a finite number >= 0");
  }
  if (!(placement_ceiling >= 0.0)) throw InputError("placement_ceiling must be >= 0");
  if (backend.type == BackendChoice::Type::scripted && !backend.fixtures.empty() &&
      !std::filesystem::is_directory(backend.fixtures)) {
    throw InputError("backend.path: fixture directory does not exist: " + backend.fixtures.string());
  }
}

PlacementOptions RunConfig::placement_options() const {
  PlacementOptions options;
  options.ga = ga;
  options.ga.seed = seed;
  options.budget = budgets;
  options.placement_ceiling = placement_ceiling;
  return options;
}

RunConfig run_config_from_json(const json& j, RunConfig c) {
  expect_object(j, "");
  reject_unknown(j, {"ga", "budgets", "contact_epsilon", "placement_ceiling", "backend", "seed"}, "");
  if (const json* jg = optional_field(j, "ga")) {
    c.ga = ga_config_from_json(*jg, c.ga);
    c.seed = c.ga.seed;
  }
  if (const json* jb = optional_field(j, "budgets")) {
    expect_object(*jb, "budgets");
    reject_unknown(*jb, {"strong_min", "strong_max", "weak_min", "weak_max"}, "budgets");
    auto field = [&](const char* key, int& out) {
      if (const json* v = optional_field(*jb, key)) out = static_cast<int>(as_integer(*v, join_path("budgets", key)));
    };
    field("strong_min", c.budgets.strong_min);
    field("strong_max", c.budgets.strong_max);
    field("weak_min", c.budgets.weak_min);
    field("weak_max", c.budgets.weak_max);
  }
  if (const json* v = optional_field(j, "contact_epsilon")) c.contact_epsilon = as_number(*v, "contact_epsilon");
  if (const json* v = optional_field(j, "placement_ceiling")) c.placement_ceiling = as_number(*v, "placement_ceiling");
  if (const json* v = optional_field(j, "seed")) {
    if (!v->is_number_integer()) field_error("seed", "expected an integer");
    c.seed = v->is_number_unsigned() ? v->get<std::uint64_t>() : static_cast<std::uint64_t>(v->get<std::int64_t>());
  }
  c.ga.seed = c.seed;
  if (const json* jb = optional_field(j, "backend")) {
    expect_object(*jb, "backend");
    reject_unknown(*jb, {"type", "path", "url", "token", "timeout_seconds", "retries"}, "backend");
    const std::string type = get_string(*jb, "type", "backend");
    if (type == "scripted") {
      c.backend = BackendChoice{};
      if (const json* p = optional_field(*jb, "path")) c.backend.fixtures = as_string(*p, "backend.path");
    } else if (type == "remote") {
      c.backend.type = BackendChoice::Type::remote;
      c.backend.fixtures.clear();
      c.backend.remote.url = get_string(*jb, "url", "backend");
      if (const json* t = optional_field(*jb, "token")) c.backend.remote.token = as_string(*t, "backend.token");
      if (const json* t = optional_field(*jb, "timeout_seconds")) {
        c.backend.remote.timeout_seconds = as_number(*t, "backend.timeout_seconds");
      }
      if (const json* r = optional_field(*jb, "retries")) {
        c.backend.remote.retries = static_cast<int>(as_integer(*r, "backend.retries"));
      }
    } else {
      field_error("backend.type", "expected scripted or remote");
    }
  }
  c.validate();
  return c;
}

json to_json(const RunConfig& c) {
  GAConfig ga = c.ga;
  ga.seed = c.seed;
  json backend;
  if (c.backend.type == BackendChoice::Type::scripted) {
    backend = {{"type", "scripted"}};
    if (!c.backend.fixtures.empty()) backend["path"] = c.backend.fixtures.string();
  } else {
    // The token is never echoed.
    backend = {{"type", "remote"},
               {"url", c.backend.remote.url},
               {"timeout_seconds", c.backend.remote.timeout_seconds},
               {"retries", c.backend.remote.retries}};
  }
  return {{"ga", to_json(ga)},
          {"budgets",
           {{"strong_min", c.budgets.strong_min},
            {"strong_max", c.budgets.strong_max},
            {"weak_min", c.budgets.weak_min},
            {"weak_max", c.budgets.weak_max}}},
          {"contact_epsilon", c.contact_epsilon},
          {"placement_ceiling", c.placement_ceiling},
          {"backend", std::move(backend)},
          {"seed", c.seed}};
}

RunConfig load_run_config(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& err) {
    throw InputError(path.string() + ": " + err.what());
  }
  try {
    return run_config_from_json(doc);
  } catch (const InputError& err) {
    throw InputError(path.string() + ": " + err.what());
  }
}

std::optional<std::string> process_env(const char* name) {
  if (const char* v = std::getenv(name); v && *v) return std::string(v);
  return std::nullopt;
}

void apply_environment(RunConfig& config, const EnvLookup& env) {
  if (config.backend.type != BackendChoice::Type::remote) return;
  if (auto url = env("PLANNER_URL")) config.backend.remote.url = *url;
  if (auto token = env("PLANNER_TOKEN")) config.backend.remote.token = *token;
}

std::unique_ptr<PlannerBackend> make_backend(const BackendChoice& choice) {
  if (choice.type == BackendChoice::Type::remote) {
    if (choice.remote.url.empty()) throw InputError("remote backend: no URL (set PLANNER_URL)");
    return std::make_unique<RemoteBackend>(choice.remote);
  }
  if (choice.fixtures.empty()) return std::make_unique<ScriptedBackend>(std::map<std::string, json>{});
  return std::make_unique<ScriptedBackend>(choice.fixtures);
}

ConstraintsFile parse_constraints_file(const json& doc) {
  expect_object(doc, "");
  reject_unknown(doc, {"movable", "proposed_position", "relations"}, "");
  ConstraintsFile out;
  out.movable = get_string(doc, "movable", "");
  if (const json* p = optional_field(doc, "proposed_position")) out.proposed_position = as_vec3(*p, "proposed_position");
  const json& rels = as_array(require(doc, "relations", ""), "relations");
  if (rels.empty()) field_error("relations", "no relations");
  for (std::size_t i = 0; i < rels.size(); ++i) {
    const std::string path = index_path("relations", i);
    const json& jr = rels[i];
    expect_object(jr, path);
    reject_unknown(jr, {"reference", "kind", "distance", "strength", "mode"}, path);
    RelationEdge e;
    e.from = get_string(jr, "reference", path);
    e.to = out.movable;
    const std::string kind = get_string(jr, "kind", path);
    auto parsed = try_parse_kind(kind);
    if (!parsed) field_error(join_path(path, "kind"), "unknown constraint kind '" + kind + "'");
    e.kind = *parsed;
    if (const json* d = optional_field(jr, "distance")) e.distance = as_number(*d, join_path(path, "distance"));
    if (const json* s = optional_field(jr, "strength")) {
      const std::string text = as_string(*s, join_path(path, "strength"));
      if (text != "strong" && text != "weak") field_error(join_path(path, "strength"), "expected strong or weak");
      e.strength = parse_strength(text);
    }
    if (const json* m = optional_field(jr, "mode")) {
      try {
        e.mode = parse_gap_mode(as_string(*m, join_path(path, "mode")));
      } catch (const InputError& err) {
        field_error(join_path(path, "mode"), err.what());
      }
    }
    try {
      e.to_constraint();
    } catch (const InputError& err) {
      field_error(path, err.what());
    }
    out.relations.push_back(std::move(e));
  }
  return out;
}

std::string format_number(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, end);
}

std::string export_obj(const SceneGraphStore& store) {
  // Corner i has x = max if bit 0, y = max if bit 1, z = max if bit 2.
  static constexpr int kTriangles[12][3] = {
      {0, 4, 6}, {0, 6, 2},  // -x
      {1, 3, 7}, {1, 7, 5},  // +x
      {0, 1, 5}, {0, 5, 4},  // -y
      {2, 6, 7}, {2, 7, 3},  // +y
      {0, 2, 3}, {0, 3, 1},  // -z
      {4, 5, 7}, {4, 7, 6},  // +z
  };
  std::ostringstream out;
  out << "# blockscene OBJ export: " << store.node_count() << " objects\n";
  std::size_t base = 1;
  for (const std::string& id : store.ids()) {
    const ObjectInstance& o = store.object(id);
    std::string group = o.name().empty() ? id : o.name();
    for (char& ch : group) {
      if (ch == ' ' || ch == '\t' || ch == '\n') ch = '_';
    }
    out << "o " << group << '\n';
    for (const Block& b : o.blocks()) {
      const AABB box = aabb_of_block(b);
      for (int corner = 0; corner < 8; ++corner) {
        out << "v " << format_number((corner & 1) ? box.max.x : box.min.x) << ' '
            << format_number((corner & 2) ? box.max.y : box.min.y) << ' '
            << format_number((corner & 4) ? box.max.z : box.min.z) << '\n';
      }
      for (const auto& tri : kTriangles) {
        out << "f " << base + tri[0] << ' ' << base + tri[1] << ' ' << base + tri[2] << '\n';
      }
      base += 8;
    }
  }
  return out.str();
}

json placement_report(std::string_view movable, const Placement& p, bool accepted) {
  json constraints = json::array();
  for (std::size_t i = 0; i < p.constraints.size(); ++i) {
    const Constraint& c = p.constraints[i];
    json jc = {{"reference", c.reference()},
               {"kind", kind_name(c.kind())},
               {"distance", c.distance()},
               {"residual", i < p.result.residuals.residuals.size() ? p.result.residuals.residuals[i] : 0.0}};
    if (uses_distance(c.kind())) jc["mode"] = gap_mode_name(c.mode());
    constraints.push_back(std::move(jc));
  }
  return {{"movable", movable},
          {"accepted", accepted},
          {"best_motion", to_json(p.result.best_motion)},
          {"final_error", p.result.final_error},
          {"generations_run", p.result.generations_run},
          {"converged", p.result.converged},
          {"constraints", std::move(constraints)},
          {"diagnostics", p.diagnostics}};
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string());
  std::stringstream text;
  text << in.rdbuf();
  return text.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw Error("cannot write " + path.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace blockscene
