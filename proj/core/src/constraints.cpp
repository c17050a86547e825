#include "blockscene/constraints.hpp"

#include <algorithm>
#include <cctype>
#include <utility>

#include "blockscene/error.hpp"

namespace blockscene {

namespace {

constexpr std::array<ConstraintKind, kConstraintKindCount> kKinds = {
    ConstraintKind::concentric,     ConstraintKind::x_aligned,     ConstraintKind::y_aligned,
    ConstraintKind::z_aligned,      ConstraintKind::left_half,     ConstraintKind::right_half,
    ConstraintKind::upper_half,     ConstraintKind::lower_half,    ConstraintKind::front_half,
    ConstraintKind::back_half,      ConstraintKind::left,          ConstraintKind::right,
    ConstraintKind::above,          ConstraintKind::below,         ConstraintKind::front,
    ConstraintKind::back,           ConstraintKind::coplanar_top,  ConstraintKind::coplanar_bottom,
    ConstraintKind::coplanar_left,  ConstraintKind::coplanar_right, ConstraintKind::coplanar_front,
    ConstraintKind::coplanar_back,
};

constexpr std::array<std::string_view, kConstraintKindCount> kNames = {
    "concentric",     "x_aligned",     "y_aligned",      "z_aligned",     "left_half",
    "right_half",     "upper_half",    "lower_half",     "front_half",    "back_half",
    "left",           "right",         "above",          "below",         "front",
    "back",           "coplanar_top",  "coplanar_bottom", "coplanar_left", "coplanar_right",
    "coplanar_front", "coplanar_back",
};

std::string normalize(std::string_view name) {
  std::string out;
  out.reserve(name.size());
  bool pending_sep = false;
  for (char ch : name) {
    if (ch == ' ' || ch == '_' || ch == '\t') {
      pending_sep = !out.empty();
      continue;
    }
    if (pending_sep) out.push_back('_');
    pending_sep = false;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  }
  return out;
}

// Gap between the movable and reference boxes along the kind's direction;
// positive when they are separated on the named side.
double directional_gap(ConstraintKind kind, const AABB& r, const AABB& m) {
  switch (kind) {
    case ConstraintKind::left: return r.min.y - m.max.y;
    case ConstraintKind::right: return m.min.y - r.max.y;
    case ConstraintKind::above: return m.min.z - r.max.z;
    case ConstraintKind::below: return r.min.z - m.max.z;
    case ConstraintKind::front: return m.min.x - r.max.x;
    case ConstraintKind::back: return r.min.x - m.max.x;
    default: return 0.0;
  }
}

Face coplanar_face(ConstraintKind kind) {
  switch (kind) {
    case ConstraintKind::coplanar_top: return Face::top;
    case ConstraintKind::coplanar_bottom: return Face::bottom;
    case ConstraintKind::coplanar_left: return Face::left;
    case ConstraintKind::coplanar_right: return Face::right;
    case ConstraintKind::coplanar_front: return Face::front;
    default: return Face::back;
  }
}

bool finite_box(const AABB& b) { return b.min.is_finite() && b.max.is_finite(); }

}  // namespace

const std::array<ConstraintKind, kConstraintKindCount>& all_kinds() { return kKinds; }

std::string_view kind_name(ConstraintKind kind) { return kNames[static_cast<std::size_t>(kind)]; }

KindFamily kind_family(ConstraintKind kind) {
  const auto i = static_cast<int>(kind);
  if (i == 0) return KindFamily::concentric;
  if (i <= 3) return KindFamily::aligned;
  if (i <= 9) return KindFamily::half_side;
  if (i <= 15) return KindFamily::directional;
  return KindFamily::coplanar;
}

bool uses_distance(ConstraintKind kind) { return kind_family(kind) == KindFamily::directional; }

std::optional<ConstraintKind> try_parse_kind(std::string_view name) {
  const std::string key = normalize(name);
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (kNames[i] == key) return kKinds[i];
  }
  return std::nullopt;
}

ConstraintKind parse_kind(std::string_view name) {
  if (auto kind = try_parse_kind(name)) return *kind;
  std::string msg = "unknown constraint kind '" + std::string(name) + "'; valid kinds:";
  for (std::string_view n : kNames) {
    msg += ' ';
    msg += n;
  }
  throw InputError(msg);
}

GapMode default_gap_mode(ConstraintKind kind) {
  return kind == ConstraintKind::above ? GapMode::clearance : GapMode::exact;
}

std::string_view gap_mode_name(GapMode mode) {
  return mode == GapMode::exact ? "exact" : "clearance";
}

GapMode parse_gap_mode(std::string_view name) {
  const std::string key = normalize(name);
  if (key == "exact") return GapMode::exact;
  if (key == "clearance") return GapMode::clearance;
  throw InputError("unknown gap mode '" + std::string(name) + "'; expected exact or clearance");
}

Constraint::Constraint(ConstraintKind kind, std::string reference, std::string movable,
                       double distance, std::optional<GapMode> mode)
    : kind_(kind),
      reference_(std::move(reference)),
      movable_(std::move(movable)),
      distance_(distance),
      mode_(mode.value_or(default_gap_mode(kind))) {
  if (reference_ == movable_) {
    throw InputError("constraint " + std::string(kind_name(kind_)) +
                     " relates object '" + movable_ + "' to itself");
  }
  if (!std::isfinite(distance_) || distance_ < 0.0) {
    throw InputError("constraint distance must be finite and >= 0");
  }
  if (!uses_distance(kind_)) {
    if (distance_ != 0.0) {
      throw InputError("constraint kind " + std::string(kind_name(kind_)) +
                       " does not take a distance");
    }
    mode_ = GapMode::exact;
  }
}

double residual(const Constraint& c, const AABB& r, const AABB& m) {
  if (!finite_box(r) || !finite_box(m)) throw InputError("residual: non-finite bounds");

  const Vec3 rc = r.center();
  const Vec3 mc = m.center();
  switch (kind_family(c.kind())) {
    case KindFamily::concentric:
      return (mc - rc).norm();
    case KindFamily::aligned: {
      const int axis = static_cast<int>(c.kind()) - static_cast<int>(ConstraintKind::x_aligned);
      return std::abs(mc[axis] - rc[axis]);
    }
    case KindFamily::half_side:
      // Movable center relative to reference center.
      switch (c.kind()) {
        case ConstraintKind::left_half: return std::max(0.0, mc.y - rc.y);
        case ConstraintKind::right_half: return std::max(0.0, rc.y - mc.y);
        case ConstraintKind::upper_half: return std::max(0.0, rc.z - mc.z);
        case ConstraintKind::lower_half: return std::max(0.0, mc.z - rc.z);
        case ConstraintKind::front_half: return std::max(0.0, rc.x - mc.x);
        default: return std::max(0.0, mc.x - rc.x);
      }
    case KindFamily::directional: {
      const double gap = directional_gap(c.kind(), r, m);
      if (c.mode() == GapMode::clearance) return std::max(0.0, c.distance() - gap);
      return std::abs(gap - c.distance());
    }
    case KindFamily::coplanar: {
      const Face f = coplanar_face(c.kind());
      return std::abs(face_coordinate(m, f) - face_coordinate(r, f));
    }
  }
  return 0.0;
}

bool satisfied(const Constraint& c, const AABB& ref_bounds, const AABB& mov_bounds, double tol) {
  return residual(c, ref_bounds, mov_bounds) <= tol;
}

ResidualReport total_error(const ConstraintSet& cs, const BoundsById& ref_bounds_by_id,
                           const AABB& mov_bounds) {
  ResidualReport report;
  report.residuals.reserve(cs.size());
  for (const Constraint& c : cs) {
    auto it = ref_bounds_by_id.find(c.reference());
    if (it == ref_bounds_by_id.end()) throw UnknownObjectError(c.reference());
    const double e = residual(c, it->second, mov_bounds);
    report.residuals.push_back(e);
    report.total_error += e * e;
  }
  return report;
}

}  // namespace blockscene
