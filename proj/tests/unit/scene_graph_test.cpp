#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "blockscene/error.hpp"
#include "blockscene/scene_graph.hpp"
#include "support/scenes.hpp"

using namespace blockscene;
using blockscene::testing::cube_object;
using blockscene::testing::make_node;
using ::testing::HasSubstr;

namespace {

RelationEdge edge(std::string from, std::string to, ConstraintKind kind, Strength s = Strength::strong,
                  double d = 0.0) {
  RelationEdge e;
  e.from = std::move(from);
  e.to = std::move(to);
  e.kind = kind;
  e.distance = d;
  e.strength = s;
  return e;
}

SceneGraphStore store_with(std::initializer_list<const char*> ids) {
  SceneGraphStore s;
  double x = 0;
  for (const char* id : ids) s.add_object(make_node(cube_object(id, {x++ * 2, 0, 0})));
  return s;
}

std::set<ConstraintKind> kinds_of(const ConstraintSet& cs) {
  std::set<ConstraintKind> out;
  for (const auto& c : cs) out.insert(c.kind());
  return out;
}

}  // namespace

TEST(SceneGraph, AddObject) {
  SceneGraphStore s;
  s.add_object(make_node(cube_object("desk", {0, 0, 0})));
  EXPECT_EQ(s.node_count(), 1u);
  EXPECT_TRUE(s.contains("desk"));
  try {
    s.add_object(make_node(cube_object("desk", {1, 0, 0})));
    FAIL();
  } catch (const DuplicateObjectError& e) {
    EXPECT_THAT(e.what(), HasSubstr("duplicate object"));
  }
  EXPECT_EQ(s.node_count(), 1u);
}

TEST(SceneGraph, RevisionCountsMutations) {
  SceneGraphStore s;
  const auto r0 = s.revision();
  for (int i = 0; i < 100; ++i) s.add_object(make_node(cube_object("o" + std::to_string(i), {0, 0, 0})));
  EXPECT_EQ(s.revision(), r0 + 100);
  // Queries and failed mutations leave it alone.
  (void)s.ids();
  (void)s.snapshot();
  EXPECT_THROW(s.add_object(make_node(cube_object("o1", {0, 0, 0}))), DuplicateObjectError);
  EXPECT_THROW(s.add_relation(edge("o1", "ghost", ConstraintKind::above)), UnknownObjectError);
  EXPECT_EQ(s.revision(), r0 + 100);
}

TEST(SceneGraph, AddRelation) {
  SceneGraphStore s = store_with({"desk", "lamp"});
  s.add_relation(edge("desk", "lamp", ConstraintKind::above));
  EXPECT_EQ(s.edge_count(), 1u);
  try {
    s.add_relation(edge("desk", "ghost", ConstraintKind::above));
    FAIL();
  } catch (const UnknownObjectError& e) {
    EXPECT_STREQ(e.what(), "unknown object: ghost");
  }
  EXPECT_THROW(s.add_relation(edge("desk", "desk", ConstraintKind::above)), InputError);
}

TEST(SceneGraph, RelationReplaceKeepsLatestDistance) {
  SceneGraphStore s = store_with({"desk", "lamp"});
  s.add_relation(edge("desk", "lamp", ConstraintKind::above, Strength::strong, 0.1));
  s.add_relation(edge("desk", "lamp", ConstraintKind::above, Strength::strong, 0.4));
  ASSERT_EQ(s.edge_count(), 1u);
  EXPECT_EQ(s.edges()[0].distance, 0.4);
}

TEST(SceneGraph, StrongReference) {
  SceneGraphStore s = store_with({"desk", "lamp"});
  s.add_relation(edge("desk", "lamp", ConstraintKind::above));
  s.add_relation(edge("desk", "lamp", ConstraintKind::x_aligned));
  const auto sr = s.strong_reference("lamp");
  EXPECT_EQ(sr.reference, "desk");
  EXPECT_EQ(sr.constraints.size(), 2u);

  s.add_relation(edge("desk", "lamp", ConstraintKind::y_aligned));
  s.add_relation(edge("desk", "lamp", ConstraintKind::coplanar_back));
  EXPECT_THROW(s.strong_reference("lamp"), BudgetError);
}

TEST(SceneGraph, NoStrongReference) {
  SceneGraphStore s = store_with({"desk", "lamp"});
  s.add_relation(edge("desk", "lamp", ConstraintKind::above, Strength::weak));
  try {
    s.strong_reference("lamp");
    FAIL();
  } catch (const BudgetError& e) {
    EXPECT_THAT(e.what(), HasSubstr("unplaced object has no strong reference"));
  }
}

// Selection does not depend on the order edges were inserted.
TEST(SceneGraph, StrongSelectionIsOrderIndependent) {
  auto build = [](bool a_first, int a_count, int b_count) {
    SceneGraphStore s = store_with({"bravo", "alpha", "mov"});
    const ConstraintKind ks[] = {ConstraintKind::above, ConstraintKind::x_aligned, ConstraintKind::y_aligned};
    auto add = [&](const char* ref, int n) {
      for (int i = 0; i < n; ++i) s.add_relation(edge(ref, "mov", ks[i]));
    };
    if (a_first) {
      add("alpha", a_count);
      add("bravo", b_count);
    } else {
      add("bravo", b_count);
      add("alpha", a_count);
    }
    return s.strong_reference("mov").reference;
  };
  // More constraints wins.
  EXPECT_EQ(build(true, 2, 1), "alpha");
  EXPECT_EQ(build(false, 2, 1), "alpha");
  EXPECT_EQ(build(true, 1, 3), "bravo");
  EXPECT_EQ(build(false, 1, 3), "bravo");
  // Tie: bravo was created first.
  EXPECT_EQ(build(true, 2, 2), "bravo");
  EXPECT_EQ(build(false, 2, 2), "bravo");
}

// Creation order outranks the id, and survives a round trip.
TEST(SceneGraph, StrongTiePrefersEarliestCreated) {
  SceneGraphStore s = store_with({"zeta", "alpha", "mov"});
  s.add_relation(edge("alpha", "mov", ConstraintKind::above));
  s.add_relation(edge("zeta", "mov", ConstraintKind::above));
  EXPECT_EQ(s.strong_reference("mov").reference, "zeta");
  EXPECT_EQ(SceneGraphStore::load(s.snapshot()).strong_reference("mov").reference, "zeta");
}

TEST(SceneGraph, WeakReferences) {
  SceneGraphStore s = store_with({"desk", "wall", "lamp", "rug"});
  s.add_relation(edge("desk", "lamp", ConstraintKind::above));
  EXPECT_TRUE(s.weak_references("desk", "lamp").empty());

  s.add_relation(edge("wall", "desk", ConstraintKind::coplanar_back));
  s.add_relation(edge("wall", "lamp", ConstraintKind::coplanar_back, Strength::weak));
  // rug is not adjacent to desk, so it is ignored.
  s.add_relation(edge("rug", "lamp", ConstraintKind::x_aligned, Strength::weak));
  const auto weak = s.weak_references("desk", "lamp");
  ASSERT_EQ(weak.size(), 1u);
  EXPECT_EQ(weak[0].reference, "wall");
  EXPECT_EQ(weak[0].constraints.size(), 1u);
}

TEST(SceneGraph, WeakTrimKeepsHighestPriority) {
  SceneGraphStore s = store_with({"desk", "wall", "lamp"});
  s.add_relation(edge("desk", "lamp", ConstraintKind::above));
  s.add_relation(edge("desk", "wall", ConstraintKind::left));
  s.add_relation(edge("wall", "lamp", ConstraintKind::concentric, Strength::weak));
  s.add_relation(edge("wall", "lamp", ConstraintKind::front_half, Strength::weak));
  s.add_relation(edge("wall", "lamp", ConstraintKind::z_aligned, Strength::weak));
  s.add_relation(edge("wall", "lamp", ConstraintKind::coplanar_top, Strength::weak));
  s.add_relation(edge("wall", "lamp", ConstraintKind::right, Strength::weak, 0.1));
  const auto weak = s.weak_references("desk", "lamp");
  ASSERT_EQ(weak.size(), 1u);
  EXPECT_EQ(kinds_of(weak[0].constraints),
            (std::set<ConstraintKind>{ConstraintKind::coplanar_top, ConstraintKind::right}));

  // Independent check: the kept kinds are the two of lowest rank in the
  // fixed family order.
  const KindFamily order[] = {KindFamily::coplanar, KindFamily::directional, KindFamily::aligned,
                              KindFamily::half_side, KindFamily::concentric};
  auto rank = [&](ConstraintKind k) {
    return static_cast<int>(std::find(std::begin(order), std::end(order), kind_family(k)) - std::begin(order));
  };
  for (ConstraintKind k : all_kinds()) EXPECT_EQ(trim_priority(k), rank(k)) << kind_name(k);
}

TEST(SceneGraph, UpdatePlacement) {
  SceneGraphStore s = store_with({"lamp"});
  const AABB before = object_bounds(s.object("lamp"));
  const auto r = s.revision();
  s.update_placement("lamp", {0, 0, 0});
  EXPECT_EQ(s.revision(), r + 1);
  EXPECT_EQ(object_bounds(s.object("lamp")), before);
  s.update_placement("lamp", {1, 2, 3});
  EXPECT_EQ(object_bounds(s.object("lamp")), before.translated({1, 2, 3}));
  EXPECT_THROW(s.update_placement("ghost", {1, 0, 0}), UnknownObjectError);
}

TEST(SceneGraph, UpdatesAccumulate) {
  Rng rng(42);
  SceneGraphStore s = store_with({"a", "b"});
  s.add_relation(edge("a", "b", ConstraintKind::above));
  const Vec3 start = s.object("b").blocks()[0].centroid();
  Vec3 sum{};
  for (int i = 0; i < 50; ++i) {
    const Vec3 v{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    sum = sum + v;
    s.update_placement("b", v);
  }
  const Vec3 end = s.object("b").blocks()[0].centroid();
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(end[k], start[k] + sum[k], 1e-12);
  EXPECT_EQ(s.edge_count(), 1u);
}

TEST(SceneGraph, EmptySnapshot) {
  const nlohmann::json doc = SceneGraphStore{}.snapshot();
  EXPECT_EQ(doc["version"], 1);
  EXPECT_TRUE(doc["nodes"].empty());
  EXPECT_TRUE(doc["edges"].empty());
  EXPECT_EQ(SceneGraphStore::load(doc).node_count(), 0u);
}

TEST(SceneGraph, SnapshotRoundTripPreservesQueries) {
  Rng rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    const SceneGraphStore s = blockscene::testing::random_store(rng);
    const std::string text = s.snapshot_text();
    const SceneGraphStore t = SceneGraphStore::load_text(text);
    EXPECT_EQ(t.snapshot_text(), text);
    EXPECT_EQ(t.revision(), s.revision());
    EXPECT_EQ(t.ids(), s.ids());
    EXPECT_EQ(t.ids_by_creation(), s.ids_by_creation());
    for (const auto& id : s.ids()) {
      EXPECT_EQ(t.node(id).object, s.node(id).object);
      EXPECT_EQ(t.node(id).tags, s.node(id).tags);
      EXPECT_EQ(t.node(id).created_by, s.node(id).created_by);
      std::string expected;
      std::string actual;
      try {
        expected = s.strong_reference(id).reference;
      } catch (const BudgetError&) {
        expected = "<budget>";
      }
      try {
        actual = t.strong_reference(id).reference;
      } catch (const BudgetError&) {
        actual = "<budget>";
      }
      EXPECT_EQ(actual, expected);
    }
    ASSERT_EQ(t.edges().size(), s.edges().size());
    for (std::size_t i = 0; i < s.edges().size(); ++i) {
      EXPECT_EQ(t.edges()[i].to_constraint(), s.edges()[i].to_constraint());
      EXPECT_EQ(t.edges()[i].strength, s.edges()[i].strength);
    }
  }
}

TEST(SceneGraph, LoadRejectsDanglingEdge) {
  SceneGraphStore s = store_with({"desk", "lamp"});
  s.add_relation(edge("desk", "lamp", ConstraintKind::above));
  nlohmann::json doc = s.snapshot();
  doc["edges"][0]["from"] = "ghost";
  try {
    SceneGraphStore::load(doc);
    FAIL();
  } catch (const InputError& e) {
    EXPECT_THAT(e.what(), HasSubstr("edges[0].from"));
    EXPECT_THAT(e.what(), HasSubstr("ghost"));
  }
}

TEST(SceneGraph, LoadRejectsUnknownKind) {
  SceneGraphStore s = store_with({"desk", "lamp"});
  s.add_relation(edge("desk", "lamp", ConstraintKind::above));
  nlohmann::json doc = s.snapshot();
  doc["edges"][0]["kind"] = "hovering";
  EXPECT_THROW(SceneGraphStore::load(doc), InputError);
}

TEST(SceneGraph, LoadTextReportsParsePosition) {
  try {
    SceneGraphStore::load_text("{\n  \"version\": 1,\n  \"nodes\": [\n");
    FAIL();
  } catch (const InputError& e) {
    EXPECT_THAT(e.what(), HasSubstr("line"));
  }
}

TEST(SceneGraph, RandomOperationsKeepIntegrity) {
  Rng rng(5150);
  for (int trial = 0; trial < 20; ++trial) {
    SceneGraphStore s;
    std::vector<std::string> known;
    auto last = s.revision();
    for (int step = 0; step < 200; ++step) {
      const auto op = rng.below(4);
      const std::string id = "o" + std::to_string(rng.below(12));
      try {
        if (op == 0) {
          s.add_object(make_node(cube_object(id, {rng.uniform(-3, 3), 0, 0})));
          known.push_back(id);
        } else if (op == 1 || op == 2) {
          const std::string other = "o" + std::to_string(rng.below(12));
          s.add_relation(edge(id, other, all_kinds()[rng.below(kConstraintKindCount)],
                              rng.bernoulli(0.5) ? Strength::strong : Strength::weak));
        } else {
          s.update_placement(id, {rng.uniform(-1, 1), 0, 0});
        }
        EXPECT_GT(s.revision(), last);
      } catch (const Error&) {
        EXPECT_EQ(s.revision(), last);
      }
      last = s.revision();
      for (const auto& e : s.edges()) {
        EXPECT_TRUE(s.contains(e.from));
        EXPECT_TRUE(s.contains(e.to));
        EXPECT_NE(e.from, e.to);
      }
    }
  }
}
