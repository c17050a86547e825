#include "blockscene/geometry.hpp"

#include <algorithm>
#include <limits>
#include <utility>

#include "blockscene/error.hpp"

namespace blockscene {

Extents::Extents(double dx, double dy, double dz) : lengths_{dx, dy, dz} {
  for (int axis = 0; axis < 3; ++axis) {
    const double len = lengths_[axis];
    if (!std::isfinite(len) || len <= 0.0) {
      throw InputError("non-positive extent on axis " + std::string(1, "xyz"[axis]));
    }
  }
}

double AABB::volume() const {
  const Vec3 s = size();
  return std::max(0.0, s.x) * std::max(0.0, s.y) * std::max(0.0, s.z);
}

AABB AABB::expanded(double margin) const {
  const Vec3 m{margin, margin, margin};
  return {min - m, max + m};
}

bool AABB::touches(const AABB& other) const {
  for (int axis = 0; axis < 3; ++axis) {
    if (min[axis] > other.max[axis] || other.min[axis] > max[axis]) return false;
  }
  return true;
}

bool AABB::contains(const AABB& other) const {
  for (int axis = 0; axis < 3; ++axis) {
    if (other.min[axis] < min[axis] || other.max[axis] > max[axis]) return false;
  }
  return true;
}

Block::Block(Vec3 centroid, Extents extents) : centroid_(centroid), extents_(extents) {
  if (!centroid_.is_finite()) throw InputError("block centroid is not finite");
}

ObjectInstance::ObjectInstance(std::string id, std::string name, std::vector<Block> blocks)
    : id_(std::move(id)), name_(std::move(name)), blocks_(std::move(blocks)) {
  if (id_.empty()) throw InputError("object id is empty");
  if (blocks_.empty()) throw InputError("object '" + id_ + "' has no blocks");
}

std::string_view face_name(Face f) {
  switch (f) {
    case Face::front: return "front";
    case Face::back: return "back";
    case Face::top: return "top";
    case Face::bottom: return "bottom";
    case Face::left: return "left";
    case Face::right: return "right";
  }
  return "?";
}

int face_axis(Face f) {
  switch (f) {
    case Face::front:
    case Face::back: return 0;
    case Face::left:
    case Face::right: return 1;
    case Face::top:
    case Face::bottom: return 2;
  }
  return 0;
}

bool face_is_max(Face f) { return f == Face::front || f == Face::right || f == Face::top; }

AABB aabb_of_block(const Block& b) {
  const Vec3 h = b.extents().half();
  return {b.centroid() - h, b.centroid() + h};
}

AABB object_bounds(const ObjectInstance& o) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  AABB out{{inf, inf, inf}, {-inf, -inf, -inf}};
  for (const Block& b : o.blocks()) {
    const AABB box = aabb_of_block(b);
    for (int axis = 0; axis < 3; ++axis) {
      out.min[axis] = std::min(out.min[axis], box.min[axis]);
      out.max[axis] = std::max(out.max[axis], box.max[axis]);
    }
  }
  return out;
}

ObjectInstance translate_object(const ObjectInstance& o, Vec3 v) {
  std::vector<Block> moved;
  moved.reserve(o.blocks().size());
  for (const Block& b : o.blocks()) moved.emplace_back(b.centroid() + v, b.extents());
  return ObjectInstance(o.id(), o.name(), std::move(moved));
}

double intersection_volume(const AABB& a, const AABB& b) {
  double vol = 1.0;
  for (int axis = 0; axis < 3; ++axis) {
    const double lo = std::max(a.min[axis], b.min[axis]);
    const double hi = std::min(a.max[axis], b.max[axis]);
    if (hi <= lo) return 0.0;
    vol *= hi - lo;
  }
  return vol;
}

double face_coordinate(const AABB& box, Face f) {
  const int axis = face_axis(f);
  return face_is_max(f) ? box.max[axis] : box.min[axis];
}

}  // namespace blockscene
