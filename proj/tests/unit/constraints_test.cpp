#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include <cmath>

#include "blockscene/constraints.hpp"
#include "blockscene/error.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

using namespace blockscene;
using ::testing::HasSubstr;

namespace {

// Box from its center and full size.
AABB box(Vec3 c, Vec3 size = {1, 1, 1}) { return {c - 0.5 * size, c + 0.5 * size}; }

// Box with the given bottom and top z, unit footprint at the origin.
AABB slab(double bottom, double top) { return {{-0.5, -0.5, bottom}, {0.5, 0.5, top}}; }

Constraint make(ConstraintKind k, double d = 0.0, std::optional<GapMode> mode = {}) {
  return Constraint(k, "ref", "mov", d, mode);
}

}  // namespace

TEST(ConstraintResidual, Concentric) {
  EXPECT_EQ(residual(make(ConstraintKind::concentric), box({0, 0, 0}), box({0, 0, 0})), 0.0);
  EXPECT_DOUBLE_EQ(residual(make(ConstraintKind::concentric), box({0, 0, 0}), box({3, 4, 0})), 5.0);
}

TEST(ConstraintResidual, AboveIsClearanceByDefault) {
  const Constraint above = make(ConstraintKind::above, 0.2);
  EXPECT_EQ(above.mode(), GapMode::clearance);
  EXPECT_EQ(residual(above, slab(0, 1.0), slab(1.5, 2.0)), 0.0);
  EXPECT_NEAR(residual(above, slab(0, 1.0), slab(1.05, 2.0)), 0.15, 1e-15);
  // Exact mode penalizes the surplus gap too.
  EXPECT_NEAR(residual(make(ConstraintKind::above, 0.2, GapMode::exact), slab(0, 1.0), slab(1.5, 2.0)), 0.3,
              1e-15);
}

TEST(ConstraintResidual, UpperHalfHinge) {
  const Constraint c = make(ConstraintKind::upper_half);
  EXPECT_EQ(residual(c, box({0, 0, 3}), box({0, 0, 2})), 1.0);
  EXPECT_EQ(residual(c, box({0, 0, 2}), box({0, 0, 3})), 0.0);
}

TEST(ConstraintResidual, CoplanarTop) {
  EXPECT_EQ(residual(make(ConstraintKind::coplanar_top), slab(0, 2), slab(1.5, 2)), 0.0);
  EXPECT_EQ(residual(make(ConstraintKind::coplanar_top), slab(0, 2), slab(1.5, 2.25)), 0.25);
}

TEST(ConstraintSatisfied, Examples) {
  EXPECT_TRUE(satisfied(make(ConstraintKind::x_aligned), box({1, 0, 0}), box({1, 5, -2}), 0.0));
  // below: ref bottom 0, movable top -0.5, d 0.5
  EXPECT_TRUE(satisfied(make(ConstraintKind::below, 0.5), slab(0, 1), slab(-1, -0.5), 1e-9));
  EXPECT_FALSE(satisfied(make(ConstraintKind::below, 0.5), slab(0, 1), slab(-1, -0.25), 1e-9));
}

// The half-side kinds are movable-relative: front_half holds when the
// movable center has the larger x. The opposite reading (reference center in
// front) disagrees on every pair with distinct centers.
TEST(ConstraintSatisfied, FrontHalfDirection) {
  EXPECT_FALSE(satisfied(make(ConstraintKind::front_half), box({2, 0, 0}), box({1, 0, 0}), 0.0));
  EXPECT_TRUE(satisfied(make(ConstraintKind::front_half), box({1, 0, 0}), box({2, 0, 0}), 0.0));

  Rng rng(101);
  int movable_reading = 0;
  int reference_reading = 0;
  for (int i = 0; i < 100; ++i) {
    const AABB r = box({rng.uniform(-3, 3), 0, 0}, {rng.uniform(0.1, 2), 1, 1});
    const AABB m = box({rng.uniform(-3, 3), 0, 0}, {rng.uniform(0.1, 2), 1, 1});
    const bool holds = satisfied(make(ConstraintKind::front_half), r, m, 0.0);
    movable_reading += holds == (m.center().x >= r.center().x);
    reference_reading += holds == (r.center().x > m.center().x);
  }
  EXPECT_EQ(movable_reading, 100);
  EXPECT_EQ(reference_reading, 0);
}

TEST(ConstraintResidual, DirectionalSides) {
  const AABB r{{0, 0, 0}, {1, 1, 1}};
  // 0.25 of clear space on each side.
  EXPECT_EQ(residual(make(ConstraintKind::front, 0.25), r, r.translated({1.25, 0, 0})), 0.0);
  EXPECT_EQ(residual(make(ConstraintKind::back, 0.25), r, r.translated({-1.25, 0, 0})), 0.0);
  EXPECT_EQ(residual(make(ConstraintKind::right, 0.25), r, r.translated({0, 1.25, 0})), 0.0);
  EXPECT_EQ(residual(make(ConstraintKind::left, 0.25), r, r.translated({0, -1.25, 0})), 0.0);
  EXPECT_EQ(residual(make(ConstraintKind::above, 0.25), r, r.translated({0, 0, 1.25})), 0.0);
  EXPECT_EQ(residual(make(ConstraintKind::below, 0.25), r, r.translated({0, 0, -1.25})), 0.0);
  // Wrong side: the gap is negative.
  EXPECT_EQ(residual(make(ConstraintKind::front, 0.25), r, r.translated({-1.25, 0, 0})), 2.5);
}

TEST(ConstraintResidual, MatchesOracleForEveryKind) {
  Rng rng(2024);
  for (ConstraintKind k : all_kinds()) {
    for (int i = 0; i < 300; ++i) {
      const auto kc = blockscene::testing::random_kind_case(rng, k);
      const Constraint c = make(k, kc.distance, kc.mode);
      const double e = residual(c, kc.ref, kc.mov);
      EXPECT_GE(e, 0.0);
      EXPECT_NEAR(e, blockscene::testing::oracle_residual(k, kc.ref, kc.mov, kc.distance, kc.mode), 1e-12)
          << kind_name(k);
      EXPECT_EQ(satisfied(c, kc.ref, kc.mov, 1e-9),
                blockscene::testing::predicate_holds(k, kc.ref, kc.mov, kc.distance, kc.mode, 1e-9))
          << kind_name(k) << " case " << i;
    }
  }
}

TEST(ConstraintResidual, LipschitzInMovableTranslation) {
  Rng rng(7);
  for (ConstraintKind k : all_kinds()) {
    for (int i = 0; i < 200; ++i) {
      const auto kc = blockscene::testing::random_kind_case(rng, k);
      const Constraint c = make(k, kc.distance, kc.mode);
      const Vec3 delta{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
      const double l1 = std::fabs(delta.x) + std::fabs(delta.y) + std::fabs(delta.z);
      EXPECT_LE(std::fabs(residual(c, kc.ref, kc.mov.translated(delta)) - residual(c, kc.ref, kc.mov)),
                l1 + 1e-12)
          << kind_name(k);
    }
  }
}

TEST(ConstraintResidual, TranslationEquivariance) {
  Rng rng(9);
  for (ConstraintKind k : all_kinds()) {
    for (int i = 0; i < 100; ++i) {
      const auto kc = blockscene::testing::random_kind_case(rng, k);
      const Constraint c = make(k, kc.distance, kc.mode);
      const Vec3 v{rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-10, 10)};
      EXPECT_NEAR(residual(c, kc.ref.translated(v), kc.mov.translated(v)), residual(c, kc.ref, kc.mov), 1e-12)
          << kind_name(k);
    }
  }
  // Power-of-two shifts are exact, so the residual is bit-identical.
  const Constraint c = make(ConstraintKind::front, 0.5);
  const AABB r{{0.25, 0, 0}, {1, 1, 1}};
  const AABB m{{1.75, 0.5, 0}, {2, 1, 1}};
  EXPECT_EQ(residual(c, r.translated({4, -8, 2}), m.translated({4, -8, 2})), residual(c, r, m));
}

TEST(ConstraintResidual, EqualityKindsScaleLinearly) {
  Rng rng(13);
  auto scaled = [](const AABB& b, double s) { return AABB{s * b.min, s * b.max}; };
  for (ConstraintKind k : all_kinds()) {
    if (kind_family(k) == KindFamily::half_side) continue;
    for (int i = 0; i < 100; ++i) {
      auto kc = blockscene::testing::random_kind_case(rng, k);
      kc.mode = GapMode::exact;
      const double s = rng.uniform(0.1, 10);
      const double base = residual(make(k, kc.distance, kc.mode), kc.ref, kc.mov);
      const double big = residual(make(k, s * kc.distance, kc.mode), scaled(kc.ref, s), scaled(kc.mov, s));
      EXPECT_NEAR(big, s * base, 1e-10 * (1 + s)) << kind_name(k);
    }
  }
}

TEST(ConstraintTotalError, Examples) {
  const BoundsById refs{{"ref", box({0, 0, 0})}};
  const ConstraintSet cs{make(ConstraintKind::x_aligned), make(ConstraintKind::y_aligned)};
  const ResidualReport rep = total_error(cs, refs, box({0.1, 0.2, 0}));
  ASSERT_EQ(rep.residuals.size(), 2u);
  EXPECT_NEAR(rep.residuals[0], 0.1, 1e-15);
  EXPECT_NEAR(rep.residuals[1], 0.2, 1e-15);
  EXPECT_NEAR(rep.total_error, 0.05, 1e-15);
  EXPECT_EQ(total_error(cs, refs, box({0, 0, 9})).total_error, 0.0);
}

TEST(ConstraintTotalError, MissingReferenceNamesIt) {
  const ConstraintSet cs{Constraint(ConstraintKind::concentric, "ghost", "mov")};
  try {
    total_error(cs, {}, box({0, 0, 0}));
    FAIL();
  } catch (const UnknownObjectError& e) {
    EXPECT_THAT(e.what(), HasSubstr("ghost"));
  }
}

TEST(ConstraintTotalError, EqualsIndependentResummation) {
  Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const auto p = blockscene::testing::make_feasible_problem(rng, 9, 2.0);
    const AABB m = object_bounds(p.movable);
    const ResidualReport rep = total_error(p.constraints, p.references, m);
    double sum = 0.0;
    bool all_zero = true;
    for (std::size_t i = 0; i < p.constraints.size(); ++i) {
      const Constraint& c = p.constraints[i];
      const double e = blockscene::testing::oracle_residual(c.kind(), p.references.at(c.reference()), m, c.distance(),
                                                c.mode());
      sum += e * e;
      all_zero = all_zero && rep.residuals[i] == 0.0;
    }
    EXPECT_NEAR(rep.total_error, sum, 1e-12 * (1 + sum));
    EXPECT_EQ(rep.total_error == 0.0, all_zero);
  }
}

TEST(ConstraintKinds, CatalogHas22RoundTrippingNames) {
  EXPECT_EQ(all_kinds().size(), 22u);
  for (ConstraintKind k : all_kinds()) {
    EXPECT_EQ(parse_kind(kind_name(k)), k);
    std::string spaced(kind_name(k));
    std::replace(spaced.begin(), spaced.end(), '_', ' ');
    EXPECT_EQ(parse_kind(spaced), k);
  }
}

TEST(ConstraintKinds, ParseExamples) {
  EXPECT_EQ(parse_kind("coplanar top"), ConstraintKind::coplanar_top);
  EXPECT_EQ(parse_kind("UPPER_HALF"), ConstraintKind::upper_half);
  EXPECT_FALSE(try_parse_kind("floating"));
  try {
    parse_kind("floating");
    FAIL();
  } catch (const InputError& e) {
    const std::string msg = e.what();
    EXPECT_THAT(msg, HasSubstr("floating"));
    for (ConstraintKind k : all_kinds()) EXPECT_THAT(msg, HasSubstr(std::string(kind_name(k))));
  }
}

TEST(ConstraintKinds, Families) {
  int counts[5] = {};
  for (ConstraintKind k : all_kinds()) ++counts[static_cast<int>(kind_family(k))];
  EXPECT_EQ(counts[static_cast<int>(KindFamily::concentric)], 1);
  EXPECT_EQ(counts[static_cast<int>(KindFamily::aligned)], 3);
  EXPECT_EQ(counts[static_cast<int>(KindFamily::half_side)], 6);
  EXPECT_EQ(counts[static_cast<int>(KindFamily::directional)], 6);
  EXPECT_EQ(counts[static_cast<int>(KindFamily::coplanar)], 6);
  for (ConstraintKind k : all_kinds()) EXPECT_EQ(uses_distance(k), kind_family(k) == KindFamily::directional);
}

TEST(ConstraintValidation, RejectsBadConstraints) {
  EXPECT_THROW(Constraint(ConstraintKind::above, "a", "a"), InputError);
  EXPECT_THROW(Constraint(ConstraintKind::above, "a", "b", -0.1), InputError);
  EXPECT_THROW(Constraint(ConstraintKind::above, "a", "b", NAN), InputError);
  EXPECT_THROW(Constraint(ConstraintKind::x_aligned, "a", "b", 0.3), InputError);
  EXPECT_NO_THROW(Constraint(ConstraintKind::left, "a", "b", 0.3));
}

TEST(ConstraintValidation, RejectsNonFiniteBoxes) {
  const AABB bad{{0, 0, 0}, {NAN, 1, 1}};
  EXPECT_THROW(residual(make(ConstraintKind::concentric), bad, box({0, 0, 0})), InputError);
}

TEST(ConstraintGapMode, DefaultsAndParsing) {
  EXPECT_EQ(default_gap_mode(ConstraintKind::above), GapMode::clearance);
  for (ConstraintKind k : {ConstraintKind::below, ConstraintKind::left, ConstraintKind::right,
                           ConstraintKind::front, ConstraintKind::back}) {
    EXPECT_EQ(default_gap_mode(k), GapMode::exact);
  }
  EXPECT_EQ(parse_gap_mode("clearance"), GapMode::clearance);
  EXPECT_EQ(parse_gap_mode(gap_mode_name(GapMode::exact)), GapMode::exact);
  EXPECT_THROW(parse_gap_mode("loose"), InputError);
}
