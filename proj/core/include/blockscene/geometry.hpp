#pragma once

#include <array>
#include <cmath>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace blockscene {

/// Point or displacement in scene units (meters by convention).
struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr double operator[](int axis) const { return axis == 0 ? x : (axis == 1 ? y : z); }
  constexpr double& operator[](int axis) { return axis == 0 ? x : (axis == 1 ? y : z); }

  friend constexpr Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend constexpr Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend constexpr Vec3 operator-(Vec3 a) { return {-a.x, -a.y, -a.z}; }
  friend constexpr Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
  friend constexpr bool operator==(const Vec3&, const Vec3&) = default;

  bool is_finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
  double norm() const { return std::sqrt(x * x + y * y + z * z); }
};

/// Full edge lengths along x, y and z. All strictly positive.
class Extents {
 public:
  /// Throws InputError unless every length is finite and > 0.
  Extents(double dx, double dy, double dz);
  explicit Extents(Vec3 lengths) : Extents(lengths.x, lengths.y, lengths.z) {}

  double dx() const noexcept { return lengths_.x; }
  double dy() const noexcept { return lengths_.y; }
  double dz() const noexcept { return lengths_.z; }
  double operator[](int axis) const noexcept { return lengths_[axis]; }
  const Vec3& as_vec() const noexcept { return lengths_; }
  Vec3 half() const noexcept { return 0.5 * lengths_; }
  double volume() const noexcept { return lengths_.x * lengths_.y * lengths_.z; }

  friend bool operator==(const Extents&, const Extents&) = default;

 private:
  Vec3 lengths_;
};

/// Axis-aligned box given by its min and max corners.
struct AABB {
  Vec3 min;
  Vec3 max;

  Vec3 center() const { return 0.5 * (min + max); }
  Vec3 size() const { return max - min; }
  double volume() const;
  AABB translated(Vec3 v) const { return {min + v, max + v}; }
  /// Grows the box by `margin` on every face.
  AABB expanded(double margin) const;
  /// Closed-interval test: boxes that only share a face still intersect.
  bool touches(const AABB& other) const;
  bool contains(const AABB& other) const;

  friend bool operator==(const AABB&, const AABB&) = default;
};

/// One axis-aligned cuboid.
class Block {
 public:
  /// Throws InputError if the centroid is not finite.
  Block(Vec3 centroid, Extents extents);

  const Vec3& centroid() const noexcept { return centroid_; }
  const Extents& extents() const noexcept { return extents_; }
  double volume() const noexcept { return extents_.volume(); }

  friend bool operator==(const Block&, const Block&) = default;

 private:
  Vec3 centroid_;
  Extents extents_;
};

/// A named, non-empty composition of blocks.
class ObjectInstance {
 public:
  /// Throws InputError on an empty id or an empty block list.
  ObjectInstance(std::string id, std::string name, std::vector<Block> blocks);

  const std::string& id() const noexcept { return id_; }
  const std::string& name() const noexcept { return name_; }
  std::span<const Block> blocks() const noexcept { return blocks_; }

  friend bool operator==(const ObjectInstance&, const ObjectInstance&) = default;

 private:
  std::string id_;
  std::string name_;
  std::vector<Block> blocks_;
};

/// Box faces. The world frame is fixed:
///   x: back (min) -> front (max)
///   y: left (min) -> right (max)
///   z: bottom (min) -> top (max)
enum class Face { front, back, top, bottom, left, right };

inline constexpr std::array<Face, 6> kAllFaces = {Face::front, Face::back,   Face::top,
                                                  Face::bottom, Face::left, Face::right};

std::string_view face_name(Face f);
/// Axis index (0 = x, 1 = y, 2 = z) the face is perpendicular to.
int face_axis(Face f);
/// True if the face sits on the max side of its axis.
bool face_is_max(Face f);

AABB aabb_of_block(const Block& b);
AABB object_bounds(const ObjectInstance& o);
ObjectInstance translate_object(const ObjectInstance& o, Vec3 v);
double intersection_volume(const AABB& a, const AABB& b);
double face_coordinate(const AABB& box, Face f);

}  // namespace blockscene
