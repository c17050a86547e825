#include "blockscene/arranger.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "blockscene/error.hpp"
#include "json_fields.hpp"

namespace blockscene {

using nlohmann::json;

namespace {

json bounds_json(const AABB& b) {
  return {{"min", detail::to_json(b.min)}, {"max", detail::to_json(b.max)}};
}

json constraint_json(const Constraint& c) {
  json j = {{"reference", c.reference()}, {"kind", kind_name(c.kind())}, {"distance", c.distance()}};
  if (uses_distance(c.kind())) j["mode"] = gap_mode_name(c.mode());
  return j;
}

bool has_kind(const ConstraintSet& cs, const std::string& ref, ConstraintKind kind) {
  return std::any_of(cs.begin(), cs.end(), [&](const Constraint& c) {
    return c.reference() == ref && c.kind() == kind;
  });
}

json completion_request(const GatheredConstraints& g, const SceneGraphStore& store,
                        const PlacementTask& task, const ConstraintBudget& budget,
                        const std::vector<std::string>& weak_candidates) {
  json refs = json::array();
  refs.push_back({{"id", g.strong.reference},
                  {"role", "strong"},
                  {"bounds", bounds_json(object_bounds(store.object(g.strong.reference)))}});
  for (const std::string& id : weak_candidates) {
    refs.push_back({{"id", id}, {"role", "weak"}, {"bounds", bounds_json(object_bounds(store.object(id)))}});
  }
  json constraints = json::array();
  for (const Constraint& c : g.flatten()) constraints.push_back(constraint_json(c));
  json rough = json::array();
  for (const RoughRelation& r : task.rough_relations) {
    json jr = {{"reference", r.reference}, {"kind", kind_name(r.kind)}};
    if (r.distance) jr["distance"] = *r.distance;
    rough.push_back(std::move(jr));
  }
  json kinds = json::array();
  for (ConstraintKind k : all_kinds()) kinds.push_back(kind_name(k));
  return {{"schema", stage_schema(PlannerStage::completion)},
          {"key", "completion." + task.movable},
          {"movable", task.movable},
          {"movable_bounds", bounds_json(object_bounds(store.object(task.movable)))},
          {"references", std::move(refs)},
          {"constraints", std::move(constraints)},
          {"rough_relations", std::move(rough)},
          {"budget",
           {{"strong_min", budget.strong_min},
            {"strong_max", budget.strong_max},
            {"weak_min", budget.weak_min},
            {"weak_max", budget.weak_max}}},
          {"kinds", std::move(kinds)}};
}

}  // namespace

ConstraintSet GatheredConstraints::flatten() const {
  ConstraintSet out = strong.constraints;
  for (const auto& w : weak) out.insert(out.end(), w.constraints.begin(), w.constraints.end());
  return out;
}

GatheredConstraints gather_references(const SceneGraphStore& store, const PlacementTask& task,
                                      const ConstraintBudget& budget) {
  budget.validate();
  if (!store.contains(task.movable)) throw UnknownObjectError(task.movable);
  if (task.rough_relations.empty()) {
    throw InputError("placement task for '" + task.movable + "' has no rough relations");
  }
  for (const RoughRelation& r : task.rough_relations) {
    if (!store.contains(r.reference)) throw UnknownObjectError(r.reference);
  }
  GatheredConstraints g;
  g.strong = store.strong_reference(task.movable, budget);
  g.weak = store.weak_references(g.strong.reference, task.movable, budget);
  return g;
}

ConstraintSet gather_constraints(const SceneGraphStore& store, const PlacementTask& task,
                                 const ConstraintBudget& budget) {
  return gather_references(store, task, budget).flatten();
}

CompletionResult complete_constraints(const GatheredConstraints& partial,
                                      const SceneGraphStore& store, const PlacementTask& task,
                                      PlannerBackend& backend, const ConstraintBudget& budget) {
  CompletionResult out;
  out.gathered = partial;

  // Weak candidates: neighbors of the strong reference other than the movable.
  std::vector<std::string> weak_candidates;
  for (const std::string& id : store.ids()) {
    if (id != task.movable && id != partial.strong.reference &&
        store.adjacent(id, partial.strong.reference)) {
      weak_candidates.push_back(id);
    }
  }

  const json request = completion_request(partial, store, task, budget, weak_candidates);
  json response;
  try {
    response = backend.call(PlannerStage::completion, request);
  } catch (const StageError& err) {
    out.diagnostics.push_back(std::string("completion unavailable: ") + err.what());
    out.constraints = out.gathered.flatten();
    return out;
  }

  auto drop = [&](std::size_t i, const std::string& why) {
    out.diagnostics.push_back("completion suggestion " + std::to_string(i) + " dropped: " + why);
  };

  const json* add = nullptr;
  if (!response.is_object() || response.value("schema", "") != stage_schema(PlannerStage::completion)) {
    out.diagnostics.push_back("completion response rejected: missing or wrong schema tag");
  } else if (auto it = response.find("add"); it == response.end() || !it->is_array()) {
    out.diagnostics.push_back("completion response rejected: 'add' must be an array");
  } else {
    add = &*it;
  }

  for (std::size_t i = 0; add && i < add->size(); ++i) {
    const json& s = (*add)[i];
    if (!s.is_object() || !s.contains("reference") || !s["reference"].is_string() ||
        !s.contains("kind") || !s["kind"].is_string()) {
      drop(i, "expected {reference, kind} strings");
      continue;
    }
    const std::string ref = s["reference"].get<std::string>();
    const std::string kind_text = s["kind"].get<std::string>();
    const auto kind = try_parse_kind(kind_text);
    if (!kind) {
      drop(i, "unknown kind '" + kind_text + "'");
      continue;
    }
    if (!store.contains(ref)) {
      drop(i, "unknown object: " + ref);
      continue;
    }
    std::optional<Constraint> c;
    try {
      double d = 0.0;
      if (auto jd = s.find("distance"); jd != s.end() && !jd->is_null()) {
        if (!jd->is_number()) throw InputError("distance must be a number");
        d = jd->get<double>();
      }
      std::optional<GapMode> mode;
      if (auto jm = s.find("mode"); jm != s.end() && !jm->is_null()) {
        if (!jm->is_string()) throw InputError("mode must be a string");
        mode = parse_gap_mode(jm->get<std::string>());
      }
      c.emplace(*kind, ref, task.movable, d, mode);
    } catch (const InputError& err) {
      drop(i, err.what());
      continue;
    }

    if (ref == out.gathered.strong.reference) {
      auto& cs = out.gathered.strong.constraints;
      if (has_kind(cs, ref, *kind)) {
        drop(i, "duplicate of an existing constraint");
      } else if (static_cast<int>(cs.size()) >= budget.strong_max) {
        drop(i, "strong reference budget of " + std::to_string(budget.strong_max) + " reached");
      } else {
        cs.push_back(*c);
      }
      continue;
    }
    if (std::find(weak_candidates.begin(), weak_candidates.end(), ref) == weak_candidates.end()) {
      drop(i, "'" + ref + "' is not associated with strong reference '" +
                  out.gathered.strong.reference + "'");
      continue;
    }
    auto& weak = out.gathered.weak;
    auto w = std::find_if(weak.begin(), weak.end(),
                          [&](const ReferenceConstraints& r) { return r.reference == ref; });
    if (w == weak.end()) {
      w = weak.insert(std::upper_bound(weak.begin(), weak.end(), ref,
                                       [](const std::string& id, const ReferenceConstraints& r) {
                                         return id < r.reference;
                                       }),
                      ReferenceConstraints{ref, {}});
    }
    if (has_kind(w->constraints, ref, *kind)) {
      drop(i, "duplicate of an existing constraint");
    } else if (static_cast<int>(w->constraints.size()) >= budget.weak_max) {
      drop(i, "weak reference budget of " + std::to_string(budget.weak_max) + " reached for '" +
                  ref + "'");
    } else {
      w->constraints.push_back(*c);
    }
  }
  std::erase_if(out.gathered.weak, [](const ReferenceConstraints& r) { return r.constraints.empty(); });
  out.constraints = out.gathered.flatten();
  return out;
}

PlacementRejected::PlacementRejected(Placement placement)
    : Error("placement rejected: total error " + std::to_string(placement.result.final_error) +
            " exceeds ceiling\n" + format_residuals(placement.constraints, placement.result.residuals)),
      placement_(std::move(placement)) {}

Placement place_object(SceneGraphStore& store, const PlacementTask& task, PlannerBackend& backend,
                       const PlacementOptions& options) {
  const GatheredConstraints gathered = gather_references(store, task, options.budget);
  CompletionResult completed = complete_constraints(gathered, store, task, backend, options.budget);

  Placement placement;
  placement.constraints = std::move(completed.constraints);
  placement.diagnostics = std::move(completed.diagnostics);

  BoundsById refs;
  for (const Constraint& c : placement.constraints) {
    if (!refs.contains(c.reference())) refs.emplace(c.reference(), object_bounds(store.object(c.reference())));
  }
  const ObjectInstance& movable = store.object(task.movable);
  placement.result = options.solver ? options.solver(placement.constraints, refs, movable, options.ga)
                                    : solve(placement.constraints, refs, movable, options.ga);

  if (!(placement.result.final_error <= options.placement_ceiling)) {
    throw PlacementRejected(std::move(placement));
  }
  if (placement.result.final_error > options.ga.convergence_epsilon) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "placement of '%s' accepted with total error %.6g",
                  task.movable.c_str(), placement.result.final_error);
    placement.diagnostics.emplace_back(buf);
  }
  store.update_placement(task.movable, placement.result.best_motion);
  return placement;
}

std::string format_residuals(const ConstraintSet& constraints, const ResidualReport& report) {
  std::ostringstream out;
  for (std::size_t i = 0; i < constraints.size() && i < report.residuals.size(); ++i) {
    const Constraint& c = constraints[i];
    char line[200];
    std::snprintf(line, sizeof line, "  %-16s %-20s d=%-8g residual=%.6g\n",
                  std::string(kind_name(c.kind())).c_str(), c.reference().c_str(), c.distance(),
                  report.residuals[i]);
    out << line;
  }
  return out.str();
}

}  // namespace blockscene
