#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "blockscene/constraints.hpp"
#include "blockscene/geometry.hpp"

namespace blockscene {

enum class Strength { strong, weak };

std::string_view strength_name(Strength s);
Strength parse_strength(std::string_view name);

struct SceneNode {
  ObjectInstance object;
  std::vector<std::string> tags;
  std::string created_by;
};

/// Directed relation: `from` is the reference, `to` the movable object.
struct RelationEdge {
  std::string from;
  std::string to;
  ConstraintKind kind = ConstraintKind::concentric;
  double distance = 0.0;
  Strength strength = Strength::strong;
  std::optional<GapMode> mode;

  Constraint to_constraint() const { return Constraint(kind, from, to, distance, mode); }
};

/// How many constraints a placement may draw from its strong reference and
/// from each weak reference.
struct ConstraintBudget {
  int strong_min = 1;
  int strong_max = 3;
  int weak_min = 0;
  int weak_max = 2;

  /// Throws InputError on negative or inverted bounds.
  void validate() const;
};

struct ReferenceConstraints {
  std::string reference;
  ConstraintSet constraints;
};

/// Objects plus reference->movable relation edges. A plain value: copying
/// gives an independent snapshot, which is how readers get a stable view
/// while one writer mutates.
class SceneGraphStore {
 public:
  using Revision = std::uint64_t;

  Revision revision() const noexcept { return revision_; }
  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  /// Throws DuplicateObjectError if the id exists.
  Revision add_object(SceneNode node);
  /// Replaces an existing (from, to, kind) edge. Throws UnknownObjectError
  /// naming a missing endpoint and InputError on a self-edge.
  Revision add_relation(RelationEdge edge);
  /// Translates every block of the object. Throws UnknownObjectError.
  Revision update_placement(std::string_view id, Vec3 translation);

  bool contains(std::string_view id) const;
  /// Throws UnknownObjectError.
  const SceneNode& node(std::string_view id) const;
  const ObjectInstance& object(std::string_view id) const { return node(id).object; }
  /// Node ids sorted lexicographically.
  std::vector<std::string> ids() const;
  /// Node ids in creation order.
  std::vector<std::string> ids_by_creation() const;
  std::uint64_t creation_index(std::string_view id) const;

  /// All edges sorted by (from, to, kind).
  std::vector<RelationEdge> edges() const;
  std::vector<RelationEdge> incoming(std::string_view movable) const;
  /// True if any edge joins the two objects, in either direction.
  bool adjacent(std::string_view a, std::string_view b) const;

  /// The single strong reference for `movable` and its constraints. Among
  /// several candidates the one supplying the most strong constraints wins,
  /// then the earliest-created, then the smallest id. Throws BudgetError if
  /// there is no strong edge or the winner's count lies outside the budget.
  ReferenceConstraints strong_reference(std::string_view movable,
                                        const ConstraintBudget& budget = {}) const;

  /// Weak references of `movable` that share an edge with `strong_ref`,
  /// sorted by id. Each is trimmed to budget.weak_max constraints, keeping
  /// coplanar, then directional, aligned, half-side and concentric kinds.
  std::vector<ReferenceConstraints> weak_references(std::string_view strong_ref,
                                                    std::string_view movable,
                                                    const ConstraintBudget& budget = {}) const;

  /// Canonical document: nodes sorted by id, edges by (from, to, kind).
  nlohmann::json snapshot() const;
  /// Throws InputError with a field path on any schema or integrity error.
  static SceneGraphStore load(const nlohmann::json& doc);

  /// snapshot() serialized with stable formatting and a trailing newline.
  std::string snapshot_text() const;
  /// Parses and loads; parse errors report line and column.
  static SceneGraphStore load_text(std::string_view text);

 private:
  struct NodeEntry {
    SceneNode node;
    std::uint64_t created = 0;
  };
  using EdgeKey = std::tuple<std::string, std::string, ConstraintKind>;

  std::map<std::string, NodeEntry, std::less<>> nodes_;
  std::map<EdgeKey, RelationEdge> edges_;
  Revision revision_ = 0;
  std::uint64_t next_created_ = 0;
};

/// Ordering used when trimming weak constraints; lower ranks are kept first.
int trim_priority(ConstraintKind kind);

}  // namespace blockscene
