#include <httplib.h>

#include "blockscene/planner_backend.hpp"

namespace blockscene {

using nlohmann::json;

namespace {

constexpr std::string_view kCatalog =
    "Relations use exactly these kind names: concentric, x_aligned, y_aligned, z_aligned, "
    "left_half, right_half, upper_half, lower_half, front_half, back_half, left, right, above, "
    "below, front, back, coplanar_top, coplanar_bottom, coplanar_left, coplanar_right, "
    "coplanar_front, coplanar_back. The world frame is x back->front, y left->right, "
    "z bottom->top; all lengths are full extents in meters.";

}  // namespace

std::string RemoteBackend::system_prompt(PlannerStage stage) {
  std::string role;
  switch (stage) {
    case PlannerStage::scene:
      role = "You are the scenery designer. From the user request and the current scene, list the "
             "main objects to add and the rough spatial relations between them. Never reuse an "
             "existing object name and never relate to objects that do not exist.";
      break;
    case PlannerStage::object:
      role = "You are the object designer. Design the named object as a set of cuboid parts with "
             "sizes that fit the existing reference objects, and relate parts to each other.";
      break;
    case PlannerStage::manufacture:
      role = "You are the object manufacturer. Produce concrete blocks (centroid and extents) for "
             "the design, and a position for the object's center close to its main reference.";
      break;
    case PlannerStage::completion:
      role = "You are the arranger. Suggest missing constraints between the movable object and "
             "the listed references, respecting the budget.";
      break;
  }
  return role + " " + std::string(kCatalog) + " Answer with a single JSON document whose "
         "\"schema\" field is \"" + std::string(stage_schema(stage)) + "\".";
}

RemoteBackend::RemoteBackend(RemoteConfig config) : config_(std::move(config)) {
  const std::string& url = config_.url;
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos || url.substr(0, scheme_end) != "http") {
    throw InputError("remote backend: expected an http:// URL, got '" + url + "'");
  }
  const auto path_start = url.find('/', scheme_end + 3);
  origin_ = url.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/" : url.substr(path_start);
  if (origin_.size() <= scheme_end + 3) throw InputError("remote backend: URL has no host");
  if (config_.retries < 0) throw InputError("remote backend: retries must be >= 0");
  if (!(config_.timeout_seconds > 0.0)) throw InputError("remote backend: timeout must be > 0");
}

json RemoteBackend::call(PlannerStage stage, const json& request) {
  httplib::Client client(origin_);
  const auto timeout = std::chrono::duration<double>(config_.timeout_seconds);
  const auto usec = std::chrono::duration_cast<std::chrono::microseconds>(timeout);
  client.set_connection_timeout(usec);
  client.set_read_timeout(usec);
  client.set_write_timeout(usec);
  if (!config_.token.empty()) client.set_bearer_token_auth(config_.token);

  const std::string body = json{{"system", system_prompt(stage)}, {"request", request}}.dump();
  std::string last_error;
  for (int attempt = 0; attempt <= config_.retries; ++attempt) {
    auto res = client.Post(path_, body, "application/json");
    if (!res) {
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw StageError(std::string(stage_name(stage)), request.value("key", std::string()),
                       "backend answered HTTP " + std::to_string(res->status), res->body);
    }
    try {
      return json::parse(res->body);
    } catch (const json::parse_error& err) {
      throw StageError(std::string(stage_name(stage)), request.value("key", std::string()),
                       std::string("response is not JSON: ") + err.what(), res->body);
    }
  }
  throw TransportError("planner backend " + config_.url + " unreachable after " +
                       std::to_string(config_.retries + 1) + " attempt(s): " + last_error);
}

}  // namespace blockscene
