#include "blockscene/scene_graph.hpp"

#include <algorithm>
#include <utility>

#include "blockscene/error.hpp"
#include "json_fields.hpp"

namespace blockscene {

using nlohmann::json;
using namespace detail;

std::string_view strength_name(Strength s) { return s == Strength::strong ? "strong" : "weak"; }

Strength parse_strength(std::string_view name) {
  if (name == "strong") return Strength::strong;
  if (name == "weak") return Strength::weak;
  throw InputError("unknown strength '" + std::string(name) + "'; expected strong or weak");
}

void ConstraintBudget::validate() const {
  if (strong_min < 0 || weak_min < 0 || strong_max < strong_min || weak_max < weak_min) {
    throw InputError("constraint budget bounds must satisfy 0 <= min <= max");
  }
}

int trim_priority(ConstraintKind kind) {
  switch (kind_family(kind)) {
    case KindFamily::coplanar: return 0;
    case KindFamily::directional: return 1;
    case KindFamily::aligned: return 2;
    case KindFamily::half_side: return 3;
    case KindFamily::concentric: return 4;
  }
  return 5;
}

SceneGraphStore::Revision SceneGraphStore::add_object(SceneNode node) {
  const std::string id = node.object.id();
  if (nodes_.contains(id)) throw DuplicateObjectError(id);
  nodes_.emplace(id, NodeEntry{std::move(node), next_created_++});
  return ++revision_;
}

SceneGraphStore::Revision SceneGraphStore::add_relation(RelationEdge edge) {
  if (!contains(edge.from)) throw UnknownObjectError(edge.from);
  if (!contains(edge.to)) throw UnknownObjectError(edge.to);
  // Validates self-edges and distance rules.
  const Constraint checked = edge.to_constraint();
  if (!uses_distance(edge.kind) || checked.mode() == default_gap_mode(edge.kind)) {
    edge.mode.reset();
  }
  EdgeKey key{edge.from, edge.to, edge.kind};
  edges_.insert_or_assign(std::move(key), std::move(edge));
  return ++revision_;
}

SceneGraphStore::Revision SceneGraphStore::update_placement(std::string_view id,
                                                            Vec3 translation) {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw UnknownObjectError(std::string(id));
  if (!translation.is_finite()) throw InputError("placement translation is not finite");
  it->second.node.object = translate_object(it->second.node.object, translation);
  return ++revision_;
}

bool SceneGraphStore::contains(std::string_view id) const { return nodes_.find(id) != nodes_.end(); }

const SceneNode& SceneGraphStore::node(std::string_view id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw UnknownObjectError(std::string(id));
  return it->second.node;
}

std::vector<std::string> SceneGraphStore::ids() const {
  std::vector<std::string> out;
  out.reserve(nodes_.size());
  for (const auto& [id, _] : nodes_) out.push_back(id);
  return out;
}

std::vector<std::string> SceneGraphStore::ids_by_creation() const {
  std::vector<std::pair<std::uint64_t, std::string>> order;
  for (const auto& [id, entry] : nodes_) order.emplace_back(entry.created, id);
  std::sort(order.begin(), order.end());
  std::vector<std::string> out;
  for (auto& [_, id] : order) out.push_back(std::move(id));
  return out;
}

std::uint64_t SceneGraphStore::creation_index(std::string_view id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw UnknownObjectError(std::string(id));
  return it->second.created;
}

std::vector<RelationEdge> SceneGraphStore::edges() const {
  std::vector<RelationEdge> out;
  out.reserve(edges_.size());
  for (const auto& [_, e] : edges_) out.push_back(e);
  return out;
}

std::vector<RelationEdge> SceneGraphStore::incoming(std::string_view movable) const {
  std::vector<RelationEdge> out;
  for (const auto& [_, e] : edges_) {
    if (e.to == movable) out.push_back(e);
  }
  return out;
}

bool SceneGraphStore::adjacent(std::string_view a, std::string_view b) const {
  for (const auto& [_, e] : edges_) {
    if ((e.from == a && e.to == b) || (e.from == b && e.to == a)) return true;
  }
  return false;
}

ReferenceConstraints SceneGraphStore::strong_reference(std::string_view movable,
                                                       const ConstraintBudget& budget) const {
  if (!contains(movable)) throw UnknownObjectError(std::string(movable));

  std::map<std::string, ConstraintSet> groups;
  for (const auto& [_, e] : edges_) {
    if (e.to == movable && e.strength == Strength::strong) {
      groups[e.from].push_back(e.to_constraint());
    }
  }
  if (groups.empty()) {
    throw BudgetError("unplaced object has no strong reference: " + std::string(movable));
  }

  auto better = [&](const auto& a, const auto& b) {
    if (a.second.size() != b.second.size()) return a.second.size() > b.second.size();
    const auto ca = creation_index(a.first);
    const auto cb = creation_index(b.first);
    if (ca != cb) return ca < cb;
    return a.first < b.first;
  };
  auto best = groups.begin();
  for (auto it = std::next(groups.begin()); it != groups.end(); ++it) {
    if (better(*it, *best)) best = it;
  }

  const auto count = static_cast<int>(best->second.size());
  if (count < budget.strong_min || count > budget.strong_max) {
    throw BudgetError("strong reference '" + best->first + "' supplies " + std::to_string(count) +
                      " constraints for '" + std::string(movable) + "'; budget is " +
                      std::to_string(budget.strong_min) + ".." +
                      std::to_string(budget.strong_max));
  }
  return {best->first, std::move(best->second)};
}

std::vector<ReferenceConstraints> SceneGraphStore::weak_references(
    std::string_view strong_ref, std::string_view movable, const ConstraintBudget& budget) const {
  if (!contains(strong_ref)) throw UnknownObjectError(std::string(strong_ref));

  std::map<std::string, ConstraintSet> groups;
  for (const auto& [_, e] : edges_) {
    if (e.to != movable || e.strength != Strength::weak || e.from == strong_ref) continue;
    if (!adjacent(e.from, strong_ref)) continue;
    groups[e.from].push_back(e.to_constraint());
  }

  std::vector<ReferenceConstraints> out;
  for (auto& [ref, cs] : groups) {
    std::stable_sort(cs.begin(), cs.end(), [](const Constraint& a, const Constraint& b) {
      return trim_priority(a.kind()) < trim_priority(b.kind());
    });
    if (static_cast<int>(cs.size()) > budget.weak_max) cs.erase(cs.begin() + budget.weak_max, cs.end());
    if (static_cast<int>(cs.size()) < budget.weak_min) {
      throw BudgetError("weak reference '" + ref + "' supplies " + std::to_string(cs.size()) +
                        " constraints; minimum is " + std::to_string(budget.weak_min));
    }
    if (!cs.empty()) out.push_back({ref, std::move(cs)});
  }
  return out;
}

// --- persistence ---------------------------------------------------------

json SceneGraphStore::snapshot() const {
  json nodes = json::array();
  for (const auto& [id, entry] : nodes_) {
    const SceneNode& n = entry.node;
    json blocks = json::array();
    for (const Block& b : n.object.blocks()) {
      blocks.push_back({{"centroid", to_json(b.centroid())},
                        {"extents", to_json(b.extents().as_vec())}});
    }
    nodes.push_back({{"id", id},
                     {"name", n.object.name()},
                     {"tags", n.tags},
                     {"created_by", n.created_by},
                     {"created", entry.created},
                     {"blocks", std::move(blocks)}});
  }
  json edges = json::array();
  for (const auto& [_, e] : edges_) {
    json je = {{"from", e.from},
               {"to", e.to},
               {"kind", kind_name(e.kind)},
               {"distance", e.distance},
               {"strength", strength_name(e.strength)}};
    if (e.mode) je["mode"] = gap_mode_name(*e.mode);
    edges.push_back(std::move(je));
  }
  return {{"version", 1}, {"revision", revision_}, {"nodes", std::move(nodes)},
          {"edges", std::move(edges)}};
}

SceneGraphStore SceneGraphStore::load(const json& doc) {
  expect_object(doc, "");
  reject_unknown(doc, {"version", "revision", "nodes", "edges"}, "");
  if (as_integer(require(doc, "version", ""), "version") != 1) {
    field_error("version", "unsupported version (expected 1)");
  }

  SceneGraphStore store;
  const json& nodes = as_array(require(doc, "nodes", ""), "nodes");
  std::vector<std::pair<std::uint64_t, SceneNode>> pending;
  std::map<std::uint64_t, std::string> seen_created;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::string path = index_path("nodes", i);
    const json& jn = nodes[i];
    expect_object(jn, path);
    reject_unknown(jn, {"id", "name", "tags", "created_by", "created", "blocks"}, path);

    const std::string id = get_string(jn, "id", path);
    if (id.empty()) field_error(join_path(path, "id"), "empty id");
    const std::string name = optional_field(jn, "name")
                                 ? as_string(jn["name"], join_path(path, "name"))
                                 : id;
    std::vector<std::string> tags;
    if (const json* jt = optional_field(jn, "tags")) {
      const std::string tpath = join_path(path, "tags");
      as_array(*jt, tpath);
      for (std::size_t t = 0; t < jt->size(); ++t) {
        tags.push_back(as_string((*jt)[t], index_path(tpath, t)));
      }
    }
    const std::string created_by = optional_field(jn, "created_by")
                                       ? as_string(jn["created_by"], join_path(path, "created_by"))
                                       : std::string();
    std::uint64_t created = i;
    if (const json* jc = optional_field(jn, "created")) {
      const auto c = as_integer(*jc, join_path(path, "created"));
      if (c < 0) field_error(join_path(path, "created"), "must be >= 0");
      created = static_cast<std::uint64_t>(c);
    }
    if (auto [it, fresh] = seen_created.emplace(created, id); !fresh) {
      field_error(join_path(path, "created"),
                  "creation index " + std::to_string(created) + " also used by '" + it->second +
                      "'");
    }

    const std::string bpath = join_path(path, "blocks");
    const json& jb = as_array(require(jn, "blocks", path), bpath);
    if (jb.empty()) field_error(bpath, "object has no blocks");
    std::vector<Block> blocks;
    for (std::size_t b = 0; b < jb.size(); ++b) {
      const std::string p = index_path(bpath, b);
      expect_object(jb[b], p);
      reject_unknown(jb[b], {"centroid", "extents"}, p);
      const Vec3 c = get_vec3(jb[b], "centroid", p);
      const Extents e = as_extents(require(jb[b], "extents", p), join_path(p, "extents"));
      blocks.emplace_back(c, e);
    }
    SceneNode node{ObjectInstance(id, name, std::move(blocks)), std::move(tags), created_by};
    if (store.nodes_.contains(id)) field_error(join_path(path, "id"), "duplicate object: " + id);
    store.nodes_.emplace(id, NodeEntry{std::move(node), created});
    store.next_created_ = std::max(store.next_created_, created + 1);
  }

  const json& edges = as_array(require(doc, "edges", ""), "edges");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::string path = index_path("edges", i);
    const json& je = edges[i];
    expect_object(je, path);
    reject_unknown(je, {"from", "to", "kind", "distance", "strength", "mode"}, path);
    RelationEdge e;
    e.from = get_string(je, "from", path);
    e.to = get_string(je, "to", path);
    if (!store.contains(e.from)) field_error(join_path(path, "from"), "unknown object: " + e.from);
    if (!store.contains(e.to)) field_error(join_path(path, "to"), "unknown object: " + e.to);
    const std::string kind = get_string(je, "kind", path);
    auto parsed = try_parse_kind(kind);
    if (!parsed) field_error(join_path(path, "kind"), "unknown constraint kind '" + kind + "'");
    e.kind = *parsed;
    e.distance = optional_field(je, "distance") ? as_number(je["distance"], join_path(path, "distance"))
                                                : 0.0;
    const std::string strength = get_string(je, "strength", path);
    if (strength != "strong" && strength != "weak") {
      field_error(join_path(path, "strength"), "expected strong or weak");
    }
    e.strength = parse_strength(strength);
    if (const json* jm = optional_field(je, "mode")) {
      try {
        e.mode = parse_gap_mode(as_string(*jm, join_path(path, "mode")));
      } catch (const InputError& err) {
        field_error(join_path(path, "mode"), err.what());
      }
    }
    EdgeKey key{e.from, e.to, e.kind};
    if (store.edges_.contains(key)) field_error(path, "duplicate edge");
    try {
      store.add_relation(std::move(e));
    } catch (const InputError& err) {
      field_error(path, err.what());
    }
  }

  std::uint64_t revision = store.nodes_.size() + store.edges_.size();
  if (const json* jr = optional_field(doc, "revision")) {
    const auto r = as_integer(*jr, "revision");
    if (r < 0) field_error("revision", "must be >= 0");
    revision = static_cast<std::uint64_t>(r);
  }
  store.revision_ = revision;
  return store;
}

std::string SceneGraphStore::snapshot_text() const { return snapshot().dump(2) + "\n"; }

SceneGraphStore SceneGraphStore::load_text(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& err) {
    throw InputError(std::string("malformed scene document: ") + err.what());
  }
  return load(doc);
}

}  // namespace blockscene
