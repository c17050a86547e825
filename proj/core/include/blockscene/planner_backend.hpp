#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "blockscene/error.hpp"

namespace blockscene {

/// The four request/response exchanges of the planning pipeline.
enum class PlannerStage { scene, object, manufacture, completion };

std::string_view stage_name(PlannerStage stage);
/// Versioned schema tag carried by request and response documents,
/// e.g. "scene-plan/1".
std::string_view stage_schema(PlannerStage stage);

/// A stage produced nothing usable: missing fixture, schema-invalid
/// response, or a response that fails validation.
class StageError : public Error {
 public:
  StageError(std::string stage, std::string object, const std::string& message,
             std::string raw_response = {})
      : Error(format(stage, object, message)),
        stage_(std::move(stage)),
        object_(std::move(object)),
        raw_response_(std::move(raw_response)) {}

  const std::string& stage() const noexcept { return stage_; }
  const std::string& object() const noexcept { return object_; }
  const std::string& raw_response() const noexcept { return raw_response_; }

 private:
  static std::string format(const std::string& stage, const std::string& object,
                            const std::string& message) {
    std::string out = "stage '" + stage + "'";
    if (!object.empty()) out += " (object '" + object + "')";
    return out + ": " + message;
  }

  std::string stage_;
  std::string object_;
  std::string raw_response_;
};

/// One request document in, one response document out. Every request
/// carries "schema" and an explicit "key" such as "object.lamp".
class PlannerBackend {
 public:
  virtual ~PlannerBackend() = default;
  /// Throws TransportError (retryable) when the backend is unreachable and
  /// StageError when it has no answer for the request.
  virtual nlohmann::json call(PlannerStage stage, const nlohmann::json& request) = 0;
};

/// FNV-1a 64 of the compact request dump, as 16 hex digits.
std::string request_hash(const nlohmann::json& request);

/// Replays fixture documents. A request is answered by the fixture named by
/// its "key", else by the fixture named by its request_hash(). Completion
/// requests without a fixture get an empty suggestion list.
class ScriptedBackend : public PlannerBackend {
 public:
  /// Fixtures are files "<dir>/<key>.json". Throws InputError if `dir` is
  /// not a directory.
  explicit ScriptedBackend(std::filesystem::path dir);
  /// In-memory fixtures keyed the same way (without the ".json").
  explicit ScriptedBackend(std::map<std::string, nlohmann::json> fixtures);

  nlohmann::json call(PlannerStage stage, const nlohmann::json& request) override;

 private:
  const nlohmann::json* find(const std::string& key);

  std::filesystem::path dir_;
  std::map<std::string, nlohmann::json> fixtures_;
};

struct RemoteConfig {
  std::string url;  // http://host[:port][/path]
  std::string token;
  double timeout_seconds = 30.0;
  int retries = 2;
};

/// POSTs {"system": <stage instructions>, "request": <request>} as JSON and
/// expects the response document as the JSON body. Transport failures and
/// 5xx statuses are retried `retries` times, then raised as TransportError.
class RemoteBackend : public PlannerBackend {
 public:
  explicit RemoteBackend(RemoteConfig config);
  nlohmann::json call(PlannerStage stage, const nlohmann::json& request) override;

  /// The instruction text sent with each request of `stage`.
  static std::string system_prompt(PlannerStage stage);

 private:
  RemoteConfig config_;
  std::string origin_;  // scheme://host:port
  std::string path_;
};

}  // namespace blockscene
