#include "blockscene/planner.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "blockscene/error.hpp"
#include "json_fields.hpp"

namespace blockscene {

using nlohmann::json;
using namespace detail;

// --- backend plumbing ------------------------------------------------------

std::string_view stage_name(PlannerStage stage) {
  switch (stage) {
    case PlannerStage::scene: return "scene";
    case PlannerStage::object: return "object";
    case PlannerStage::manufacture: return "manufacture";
    case PlannerStage::completion: return "completion";
  }
  return "?";
}

std::string_view stage_schema(PlannerStage stage) {
  switch (stage) {
    case PlannerStage::scene: return "scene-plan/1";
    case PlannerStage::object: return "object-design/1";
    case PlannerStage::manufacture: return "manufacture/1";
    case PlannerStage::completion: return "constraint-completion/1";
  }
  return "?";
}

std::string request_hash(const json& request) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : request.dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ScriptedBackend::ScriptedBackend(std::filesystem::path dir) : dir_(std::move(dir)) {
  if (!std::filesystem::is_directory(dir_)) {
    throw InputError("scripted backend: not a directory: " + dir_.string());
  }
}

ScriptedBackend::ScriptedBackend(std::map<std::string, json> fixtures)
    : fixtures_(std::move(fixtures)) {}

const json* ScriptedBackend::find(const std::string& key) {
  if (auto it = fixtures_.find(key); it != fixtures_.end()) return &it->second;
  if (dir_.empty()) return nullptr;
  const auto path = dir_ / (key + ".json");
  std::ifstream in(path);
  if (!in) return nullptr;
  std::stringstream text;
  text << in.rdbuf();
  json doc;
  try {
    doc = json::parse(text.str());
  } catch (const json::parse_error& err) {
    throw StageError("fixture", "", path.string() + ": " + err.what());
  }
  return &fixtures_.emplace(key, std::move(doc)).first->second;
}

json ScriptedBackend::call(PlannerStage stage, const json& request) {
  if (request.is_object()) {
    if (auto it = request.find("key"); it != request.end() && it->is_string()) {
      if (const json* hit = find(it->get<std::string>())) return *hit;
    }
  }
  if (const json* hit = find(request_hash(request))) return *hit;
  if (stage == PlannerStage::completion) {
    return {{"schema", stage_schema(stage)}, {"add", json::array()}};
  }
  throw StageError(std::string(stage_name(stage)), request.value("key", std::string()),
                   "no scripted fixture for key '" + request.value("key", std::string()) +
                       "' or hash " + request_hash(request));
}

// --- plan ------------------------------------------------------------------

namespace {

// Runs `body`, turning any document error into a StageError for `stage`.
template <typename F>
auto validated(PlannerStage stage, const std::string& object, const json& raw, F&& body) {
  try {
    return body();
  } catch (const StageError&) {
    throw;
  } catch (const InputError& err) {
    throw StageError(std::string(stage_name(stage)), object, err.what(), raw.dump());
  } catch (const json::exception& err) {
    throw StageError(std::string(stage_name(stage)), object,
                     std::string("malformed response: ") + err.what(), raw.dump());
  }
}

void expect_schema(const json& doc, PlannerStage stage) {
  expect_object(doc, "");
  const std::string schema = get_string(doc, "schema", "");
  if (schema != stage_schema(stage)) {
    field_error("schema", "expected '" + std::string(stage_schema(stage)) + "', got '" + schema + "'");
  }
}

ConstraintKind kind_field(const json& obj, const std::string& path) {
  const std::string text = get_string(obj, "kind", path);
  auto kind = try_parse_kind(text);
  if (!kind) field_error(join_path(path, "kind"), "unknown constraint kind '" + text + "'");
  return *kind;
}

std::optional<GapMode> mode_field(const json& obj, const std::string& path) {
  const json* jm = optional_field(obj, "mode");
  if (!jm) return std::nullopt;
  const std::string p = join_path(path, "mode");
  try {
    return parse_gap_mode(as_string(*jm, p));
  } catch (const InputError& err) {
    field_error(p, err.what());
  }
}

double distance_field(const json& obj, const std::string& path) {
  const json* jd = optional_field(obj, "distance");
  return jd ? as_number(*jd, join_path(path, "distance")) : 0.0;
}

json relation_json(const PlannedRelation& r) {
  json j = {{"movable", r.movable}, {"kind", kind_name(r.kind)}, {"reference", r.reference}};
  if (r.distance) j["distance"] = *r.distance;
  if (r.strength) j["strength"] = strength_name(*r.strength);
  if (r.mode) j["mode"] = gap_mode_name(*r.mode);
  return j;
}

json bounds_json(const AABB& b) { return {{"min", to_json(b.min)}, {"max", to_json(b.max)}}; }

std::string axes_label(const std::vector<int>& axes) {
  std::string out;
  for (int a : axes) {
    if (!out.empty()) out += ", ";
    out += "xyz"[a];
  }
  return out;
}

}  // namespace

std::vector<PlannedRelation> SceneryPlan::relations_for(std::string_view name) const {
  std::vector<PlannedRelation> out;
  std::optional<std::string> first;
  for (const PlannedRelation& r : relations) {
    if (r.movable != name) continue;
    if (!first) first = r.reference;
    PlannedRelation resolved = r;
    if (!resolved.strength) resolved.strength = r.reference == *first ? Strength::strong : Strength::weak;
    out.push_back(std::move(resolved));
  }
  return out;
}

std::optional<std::string> SceneryPlan::strong_reference_of(std::string_view name) const {
  for (const PlannedRelation& r : relations_for(name)) {
    if (r.strength == Strength::strong) return r.reference;
  }
  return std::nullopt;
}

json to_json(const SceneryPlan& plan) {
  json objects = json::array();
  for (const auto& o : plan.objects) objects.push_back({{"name", o.name}, {"description", o.description}});
  json relations = json::array();
  for (const auto& r : plan.relations) relations.push_back(relation_json(r));
  return {{"schema", stage_schema(PlannerStage::scene)},
          {"scene_name", plan.scene_name},
          {"objects", std::move(objects)},
          {"relations", std::move(relations)}};
}

json to_json(const ObjectDesign& d) {
  json parts = json::array();
  for (const auto& p : d.parts) {
    json rels = json::array();
    for (const auto& r : p.relations) {
      json jr = {{"kind", kind_name(r.kind)}, {"reference", r.reference}, {"distance", r.distance}};
      if (r.mode) jr["mode"] = gap_mode_name(*r.mode);
      rels.push_back(std::move(jr));
    }
    parts.push_back({{"name", p.name}, {"extents", to_json(p.extents.as_vec())}, {"relations", std::move(rels)}});
  }
  return {{"schema", stage_schema(PlannerStage::object)},
          {"name", d.name},
          {"extents", to_json(d.overall_extents.as_vec())},
          {"parts", std::move(parts)}};
}

std::vector<std::string> construction_order(const SceneryPlan& plan) {
  std::set<std::string> planned;
  for (const auto& o : plan.objects) planned.insert(o.name);
  std::vector<std::string> order;
  std::set<std::string> done;
  while (order.size() < plan.objects.size()) {
    bool progressed = false;
    for (const auto& o : plan.objects) {
      if (done.contains(o.name)) continue;
      const bool ready = std::all_of(plan.relations.begin(), plan.relations.end(), [&](const auto& r) {
        return r.movable != o.name || !planned.contains(r.reference) || done.contains(r.reference);
      });
      if (ready) {
        order.push_back(o.name);
        done.insert(o.name);
        progressed = true;
        break;  // restart so ties keep plan order
      }
    }
    if (!progressed) throw StageError("scene", "", "relations form a cycle between planned objects");
  }
  return order;
}

SceneryPlan parse_scene_plan(const json& response, const SceneGraphStore& store) {
  return validated(PlannerStage::scene, "", response, [&] {
    expect_schema(response, PlannerStage::scene);
    reject_unknown(response, {"schema", "scene_name", "objects", "relations"}, "");
    SceneryPlan plan;
    if (const json* jn = optional_field(response, "scene_name")) plan.scene_name = as_string(*jn, "scene_name");

    const json& objects = as_array(require(response, "objects", ""), "objects");
    if (objects.empty()) field_error("objects", "plan has no objects");
    std::set<std::string> names;
    for (std::size_t i = 0; i < objects.size(); ++i) {
      const std::string path = index_path("objects", i);
      expect_object(objects[i], path);
      reject_unknown(objects[i], {"name", "description"}, path);
      PlannedObject o;
      o.name = get_string(objects[i], "name", path);
      if (o.name.empty()) field_error(join_path(path, "name"), "empty name");
      if (const json* jd = optional_field(objects[i], "description")) {
        o.description = as_string(*jd, join_path(path, "description"));
      }
      if (!names.insert(o.name).second) field_error(join_path(path, "name"), "duplicate object '" + o.name + "'");
      if (store.contains(o.name)) {
        field_error(join_path(path, "name"), "object '" + o.name + "' already exists in the scene");
      }
      plan.objects.push_back(std::move(o));
    }

    const json* jrels = optional_field(response, "relations");
    const json empty = json::array();
    const json& rels = jrels ? as_array(*jrels, "relations") : empty;
    std::set<std::tuple<std::string, std::string, ConstraintKind>> seen;
    for (std::size_t i = 0; i < rels.size(); ++i) {
      const std::string path = index_path("relations", i);
      const json& jr = rels[i];
      expect_object(jr, path);
      reject_unknown(jr, {"movable", "kind", "reference", "distance", "strength", "mode"}, path);
      PlannedRelation r;
      r.movable = get_string(jr, "movable", path);
      r.reference = get_string(jr, "reference", path);
      r.kind = kind_field(jr, path);
      if (optional_field(jr, "distance")) r.distance = distance_field(jr, path);
      if (const json* js = optional_field(jr, "strength")) {
        const std::string s = as_string(*js, join_path(path, "strength"));
        if (s != "strong" && s != "weak") field_error(join_path(path, "strength"), "expected strong or weak");
        r.strength = parse_strength(s);
      }
      r.mode = mode_field(jr, path);
      if (!names.contains(r.movable)) {
        field_error(join_path(path, "movable"), "'" + r.movable + "' is not a planned object");
      }
      if (!names.contains(r.reference) && !store.contains(r.reference)) {
        field_error(join_path(path, "reference"), "unknown object: " + r.reference);
      }
      // Self relations, negative distances, distances on kinds without one.
      try {
        Constraint(r.kind, r.reference, r.movable, r.distance.value_or(0.0), r.mode);
      } catch (const InputError& err) {
        field_error(path, err.what());
      }
      if (!seen.emplace(r.movable, r.reference, r.kind).second) field_error(path, "duplicate relation");
      plan.relations.push_back(std::move(r));
    }
    construction_order(plan);
    return plan;
  });
}

ObjectDesign parse_object_design(const json& response, std::string_view expected_name) {
  const std::string object(expected_name);
  return validated(PlannerStage::object, object, response, [&] {
    expect_schema(response, PlannerStage::object);
    reject_unknown(response, {"schema", "name", "extents", "parts"}, "");
    const std::string name = get_string(response, "name", "");
    if (name != expected_name) field_error("name", "expected '" + object + "', got '" + name + "'");
    const Extents overall = as_extents(require(response, "extents", ""), "extents");

    const json& parts = as_array(require(response, "parts", ""), "parts");
    if (parts.empty()) field_error("parts", "design has no parts");
    std::set<std::string> declared;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      const std::string path = index_path("parts", i);
      expect_object(parts[i], path);
      const std::string part = get_string(parts[i], "name", path);
      if (part.empty()) field_error(join_path(path, "name"), "empty part name");
      if (!declared.insert(part).second) field_error(join_path(path, "name"), "duplicate part '" + part + "'");
    }

    ObjectDesign design{name, overall, {}};
    for (std::size_t i = 0; i < parts.size(); ++i) {
      const std::string path = index_path("parts", i);
      const json& jp = parts[i];
      reject_unknown(jp, {"name", "extents", "relations"}, path);
      PartDesign part{get_string(jp, "name", path),
                      as_extents(require(jp, "extents", path), join_path(path, "extents")), {}};
      if (const json* jrels = optional_field(jp, "relations")) {
        const std::string rpath = join_path(path, "relations");
        as_array(*jrels, rpath);
        for (std::size_t k = 0; k < jrels->size(); ++k) {
          const std::string p = index_path(rpath, k);
          const json& jr = (*jrels)[k];
          expect_object(jr, p);
          reject_unknown(jr, {"kind", "reference", "distance", "mode"}, p);
          PartRelation rel{kind_field(jr, p), get_string(jr, "reference", p), distance_field(jr, p),
                           mode_field(jr, p)};
          if (!declared.contains(rel.reference)) {
            field_error(join_path(p, "reference"), "undeclared part '" + rel.reference + "'");
          }
          try {
            Constraint(rel.kind, rel.reference, part.name, rel.distance, rel.mode);
          } catch (const InputError& err) {
            field_error(p, err.what());
          }
          part.relations.push_back(std::move(rel));
        }
      }
      design.parts.push_back(std::move(part));
    }
    return design;
  });
}

ManufactureResult parse_manufacture(const json& response, const ObjectDesign& design,
                                    const SceneGraphStore& store,
                                    const std::optional<std::string>& strong_reference) {
  return validated(PlannerStage::manufacture, design.name, response, [&] {
    expect_schema(response, PlannerStage::manufacture);
    reject_unknown(response, {"schema", "name", "position", "blocks"}, "");
    const std::string name = get_string(response, "name", "");
    if (name != design.name) field_error("name", "expected '" + design.name + "', got '" + name + "'");
    const Vec3 position = get_vec3(response, "position", "");

    const json& jblocks = as_array(require(response, "blocks", ""), "blocks");
    if (jblocks.empty()) field_error("blocks", "no blocks");
    std::vector<Block> blocks;
    std::vector<std::string> block_part;
    for (std::size_t i = 0; i < jblocks.size(); ++i) {
      const std::string path = index_path("blocks", i);
      expect_object(jblocks[i], path);
      reject_unknown(jblocks[i], {"part", "centroid", "extents"}, path);
      std::string part;
      if (const json* jp = optional_field(jblocks[i], "part")) {
        part = as_string(*jp, join_path(path, "part"));
        const bool declared = std::any_of(design.parts.begin(), design.parts.end(),
                                          [&](const PartDesign& p) { return p.name == part; });
        if (!declared) field_error(join_path(path, "part"), "undeclared part '" + part + "'");
      } else if (i < design.parts.size()) {
        part = design.parts[i].name;
      }
      blocks.emplace_back(get_vec3(jblocks[i], "centroid", path),
                          as_extents(require(jblocks[i], "extents", path), join_path(path, "extents")));
      block_part.push_back(std::move(part));
    }

    auto band_violations = [](const Vec3& produced, const Extents& wanted) {
      std::vector<int> axes;
      for (int a = 0; a < 3; ++a) {
        if (std::abs(produced[a] - wanted[a]) > kExtentsSanityBand * wanted[a]) axes.push_back(a);
      }
      return axes;
    };

    const ObjectInstance local(design.name, design.name, blocks);
    const AABB local_bounds = object_bounds(local);
    if (auto axes = band_violations(local_bounds.size(), design.overall_extents); !axes.empty()) {
      field_error("blocks", "object extents outside the 20% band of the design on axes " + axes_label(axes));
    }

    std::map<std::string, AABB> part_bounds;
    for (const PartDesign& p : design.parts) {
      std::vector<Block> mine;
      for (std::size_t i = 0; i < blocks.size(); ++i) {
        if (block_part[i] == p.name) mine.push_back(blocks[i]);
      }
      if (mine.empty()) field_error("blocks", "part '" + p.name + "' has no blocks");
      const AABB pb = object_bounds(ObjectInstance(p.name, p.name, std::move(mine)));
      if (auto axes = band_violations(pb.size(), p.extents); !axes.empty()) {
        field_error("blocks", "part '" + p.name + "' extents outside the 20% band on axes " + axes_label(axes));
      }
      part_bounds.emplace(p.name, pb);
    }

    if (strong_reference && store.contains(*strong_reference)) {
      const AABB rb = object_bounds(store.object(*strong_reference));
      const Vec3 size = rb.size();
      const double reach = kProximityFactor * std::max({size.x, size.y, size.z});
      const double dist = (position - rb.center()).norm();
      if (dist > reach) {
        char buf[200];
        std::snprintf(buf, sizeof buf,
                      "proposed position is %.6g from strong reference '%s'; limit is %.6g",
                      dist, strong_reference->c_str(), reach);
        field_error("position", buf);
      }
    }

    ManufactureResult result{translate_object(local, position - local_bounds.center()), position, {}};
    for (const PartDesign& p : design.parts) {
      for (const PartRelation& r : p.relations) {
        const Constraint c(r.kind, r.reference, p.name, r.distance, r.mode);
        const double e = residual(c, part_bounds.at(r.reference), part_bounds.at(p.name));
        if (e > kPartRelationTolerance) result.part_violations.push_back({p.name, r.kind, r.reference, e});
      }
    }
    return result;
  });
}

// --- stages ----------------------------------------------------------------

SceneryPlan design_scene(std::string_view request, const SceneGraphStore& store,
                         PlannerBackend& backend) {
  const json req = {{"schema", stage_schema(PlannerStage::scene)},
                    {"key", "scene"},
                    {"request", request},
                    {"scene", store.snapshot()}};
  return parse_scene_plan(backend.call(PlannerStage::scene, req), store);
}

ObjectDesign design_object(std::string_view name, const SceneryPlan& plan,
                           const SceneGraphStore& store, PlannerBackend& backend) {
  auto it = std::find_if(plan.objects.begin(), plan.objects.end(),
                         [&](const PlannedObject& o) { return o.name == name; });
  if (it == plan.objects.end()) {
    throw StageError("object", std::string(name), "object is not part of the plan");
  }
  const json req = {{"schema", stage_schema(PlannerStage::object)},
                    {"key", "object." + it->name},
                    {"name", it->name},
                    {"description", it->description},
                    {"plan", to_json(plan)},
                    {"scene", store.snapshot()}};
  return parse_object_design(backend.call(PlannerStage::object, req), name);
}

ManufactureResult manufacture_object(const ObjectDesign& design, const SceneGraphStore& store,
                                     PlannerBackend& backend,
                                     const std::optional<std::string>& strong_reference) {
  json reference = nullptr;
  if (strong_reference && store.contains(*strong_reference)) {
    reference = {{"id", *strong_reference},
                 {"bounds", bounds_json(object_bounds(store.object(*strong_reference)))}};
  }
  const json req = {{"schema", stage_schema(PlannerStage::manufacture)},
                    {"key", "manufacture." + design.name},
                    {"design", to_json(design)},
                    {"reference", std::move(reference)},
                    {"scene", store.snapshot()}};
  return parse_manufacture(backend.call(PlannerStage::manufacture, req), design, store,
                           strong_reference);
}

PipelineReport run_pipeline(std::string_view request, SceneGraphStore& store,
                            PlannerBackend& backend, const PlacementOptions& options) {
  std::string stage = "scene";
  std::string object;
  auto fail = [&](PipelineFailure kind, const std::string& msg) -> PipelineError {
    std::string text = "pipeline stopped at stage '" + stage + "'";
    if (!object.empty()) text += " for object '" + object + "'";
    return PipelineError(kind, stage, object, text + ": " + msg);
  };

  PipelineReport report;
  try {
    report.plan = design_scene(request, store, backend);
    for (const std::string& name : construction_order(report.plan)) {
      object = name;
      stage = "object";
      const ObjectDesign design = design_object(name, report.plan, store, backend);

      stage = "manufacture";
      const auto strong = report.plan.strong_reference_of(name);
      ManufactureResult made = manufacture_object(design, store, backend, strong);
      for (const PartViolation& v : made.part_violations) {
        char buf[200];
        std::snprintf(buf, sizeof buf, "%s: part '%s' violates %s(%s), residual %.6g", name.c_str(),
                      v.part.c_str(), std::string(kind_name(v.kind)).c_str(), v.reference.c_str(),
                      v.residual);
        report.diagnostics.emplace_back(buf);
      }

      stage = "arranger";
      SceneGraphStore working = store;
      std::vector<std::string> tags;
      if (!report.plan.scene_name.empty()) tags.push_back(report.plan.scene_name);
      working.add_object({made.object, std::move(tags), "manufacturer"});

      PlacementTask task{name, made.proposed_position, {}};
      for (const PlannedRelation& r : report.plan.relations_for(name)) {
        working.add_relation({r.reference, r.movable, r.kind, r.distance.value_or(0.0),
                              r.strength.value_or(Strength::weak), r.mode});
        task.rough_relations.push_back({r.reference, r.kind, r.distance});
      }

      ObjectOutcome outcome{name, std::nullopt, std::move(made.part_violations)};
      if (!task.rough_relations.empty()) {
        Placement placed = place_object(working, task, backend, options);
        for (const std::string& d : placed.diagnostics) report.diagnostics.push_back(name + ": " + d);
        outcome.placement = std::move(placed);
      }
      store = std::move(working);
      report.objects.push_back(std::move(outcome));
    }
  } catch (const TransportError& err) {
    throw fail(PipelineFailure::transport, err.what());
  } catch (const PlacementRejected& err) {
    throw fail(PipelineFailure::rejection, err.what());
  } catch (const PipelineError&) {
    throw;
  } catch (const Error& err) {
    throw fail(PipelineFailure::stage, err.what());
  }
  return report;
}

}  // namespace blockscene
