#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "blockscene/geometry.hpp"

namespace blockscene {

/// The closed catalog of spatial relations between a reference object and a
/// movable object. Grouped by level: center, axis, surface.
enum class ConstraintKind {
  concentric,
  x_aligned,
  y_aligned,
  z_aligned,
  left_half,
  right_half,
  upper_half,
  lower_half,
  front_half,
  back_half,
  left,
  right,
  above,
  below,
  front,
  back,
  coplanar_top,
  coplanar_bottom,
  coplanar_left,
  coplanar_right,
  coplanar_front,
  coplanar_back,
};

inline constexpr std::size_t kConstraintKindCount = 22;

enum class KindFamily { concentric, aligned, half_side, directional, coplanar };

const std::array<ConstraintKind, kConstraintKindCount>& all_kinds();
std::string_view kind_name(ConstraintKind kind);
KindFamily kind_family(ConstraintKind kind);
/// True for the six directional surface kinds, which take a gap distance.
bool uses_distance(ConstraintKind kind);

/// Case-insensitive; spaces and underscores are interchangeable.
/// Throws InputError listing the valid names on an unknown kind.
ConstraintKind parse_kind(std::string_view name);
std::optional<ConstraintKind> try_parse_kind(std::string_view name);

/// How a directional surface kind treats its gap distance d.
///   exact:     gap == d     residual |gap - d|
///   clearance: gap >= d     residual max(0, d - gap)
enum class GapMode { exact, clearance };

/// `above` is a clearance relation; the other directional kinds are exact.
GapMode default_gap_mode(ConstraintKind kind);
std::string_view gap_mode_name(GapMode mode);
GapMode parse_gap_mode(std::string_view name);

/// One relation instance between a reference and a movable object.
class Constraint {
 public:
  /// Throws InputError if reference == movable, distance is negative or
  /// non-finite, or a non-zero distance is given for a kind without one.
  Constraint(ConstraintKind kind, std::string reference, std::string movable,
             double distance = 0.0, std::optional<GapMode> mode = std::nullopt);

  ConstraintKind kind() const noexcept { return kind_; }
  const std::string& reference() const noexcept { return reference_; }
  const std::string& movable() const noexcept { return movable_; }
  double distance() const noexcept { return distance_; }
  GapMode mode() const noexcept { return mode_; }

  friend bool operator==(const Constraint&, const Constraint&) = default;

 private:
  ConstraintKind kind_;
  std::string reference_;
  std::string movable_;
  double distance_;
  GapMode mode_;
};

/// Constraints that all share one movable object, in solver order.
using ConstraintSet = std::vector<Constraint>;

struct ResidualReport {
  std::vector<double> residuals;
  double total_error = 0.0;
};

inline constexpr double kDefaultTolerance = 1e-9;

/// Non-negative violation magnitude of `c`, evaluated on whole-object boxes.
/// Zero exactly on the kind's feasible set. Throws InputError on non-finite
/// boxes.
double residual(const Constraint& c, const AABB& ref_bounds, const AABB& mov_bounds);

bool satisfied(const Constraint& c, const AABB& ref_bounds, const AABB& mov_bounds,
               double tol = kDefaultTolerance);

using BoundsById = std::map<std::string, AABB, std::less<>>;

/// Residuals in constraint order plus E = sum of squared residuals.
/// Throws UnknownObjectError if a reference id is missing from the map.
ResidualReport total_error(const ConstraintSet& cs, const BoundsById& ref_bounds_by_id,
                           const AABB& mov_bounds);

}  // namespace blockscene
