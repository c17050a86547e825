#pragma once

// Checked accessors for JSON documents. Every failure throws InputError
// prefixed with the field path, e.g. "nodes[2].blocks[0].extents: ...".

#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "blockscene/error.hpp"
#include "blockscene/geometry.hpp"

namespace blockscene::detail {

using nlohmann::json;

[[noreturn]] inline void field_error(const std::string& path, const std::string& msg) {
  throw InputError(path + ": " + msg);
}

inline std::string join_path(const std::string& parent, std::string_view key) {
  if (parent.empty()) return std::string(key);
  return parent + "." + std::string(key);
}

inline std::string index_path(const std::string& parent, std::size_t i) {
  return parent + "[" + std::to_string(i) + "]";
}

inline void expect_object(const json& j, const std::string& path) {
  if (!j.is_object()) field_error(path.empty() ? "document" : path, "expected an object");
}

inline const json& require(const json& obj, std::string_view key, const std::string& path) {
  expect_object(obj, path);
  auto it = obj.find(key);
  if (it == obj.end()) field_error(join_path(path, key), "missing required field");
  return *it;
}

inline const json* optional_field(const json& obj, std::string_view key) {
  auto it = obj.find(key);
  return it == obj.end() || it->is_null() ? nullptr : &*it;
}

inline void reject_unknown(const json& obj, std::initializer_list<std::string_view> allowed,
                           const std::string& path) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (std::string_view k : allowed) known = known || k == it.key();
    if (!known) field_error(join_path(path, it.key()), "unknown field");
  }
}

inline std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) field_error(path, "expected a string");
  return j.get<std::string>();
}

inline std::string get_string(const json& obj, std::string_view key, const std::string& path) {
  return as_string(require(obj, key, path), join_path(path, key));
}

inline double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) field_error(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) field_error(path, "expected a finite number");
  return v;
}

inline double get_number(const json& obj, std::string_view key, const std::string& path) {
  return as_number(require(obj, key, path), join_path(path, key));
}

inline std::int64_t as_integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) field_error(path, "expected an integer");
  return j.get<std::int64_t>();
}

inline const json& as_array(const json& j, const std::string& path) {
  if (!j.is_array()) field_error(path, "expected an array");
  return j;
}

inline Vec3 as_vec3(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) field_error(path, "expected an array of 3 numbers");
  return {as_number(j[0], index_path(path, 0)), as_number(j[1], index_path(path, 1)),
          as_number(j[2], index_path(path, 2))};
}

inline Vec3 get_vec3(const json& obj, std::string_view key, const std::string& path) {
  return as_vec3(require(obj, key, path), join_path(path, key));
}

inline Extents as_extents(const json& j, const std::string& path) {
  const Vec3 v = as_vec3(j, path);
  for (int axis = 0; axis < 3; ++axis) {
    if (v[axis] <= 0.0) field_error(index_path(path, axis), "non-positive extent");
  }
  return Extents(v);
}

inline json to_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

}  // namespace blockscene::detail
