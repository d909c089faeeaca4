#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "reforacle/prompting.hpp"
#include "reforacle/transcript_store.hpp"

namespace reforacle {

/// Endpoint used for `"endpoint": "local"`: an OpenAI-compatible server on
/// the default Ollama port.
inline constexpr const char* kLocalEndpoint = "http://localhost:11434/v1/chat/completions";

struct BackendConfig {
  std::string name;               // model identifier sent to the provider
  std::string endpoint = "mock";  // "mock", "replay", "local" or an http(s) URL
  std::string auth_env;           // environment variable holding the API key
  std::optional<double> temperature;  // nullopt: provider default
  int max_attempts = 3;
  std::chrono::milliseconds timeout{300'000};
  std::chrono::milliseconds backoff{1'000};  // first retry delay, doubled per retry
  std::string reasoning_effort;               // passed through verbatim when set
  double price_in_per_mtok = 0.0;             // currency per 10^6 input tokens
  double price_out_per_mtok = 0.0;
  /// Mock endpoint only: response per instance id ("*" is the default).
  std::map<std::string, std::string> mock_responses;

  /// Name used in request keys: `name` or `name@t=<temperature>`.
  std::string effective_name() const;
  /// Throws std::invalid_argument on out-of-range fields.
  void validate() const;
  bool is_remote() const;
};

BackendConfig backend_from_json(const nlohmann::json& j);

/// Reads `{"backends": [...]}` (or a bare array) from a JSON file.
std::vector<BackendConfig> load_backend_configs(const std::filesystem::path& path);

class ModelError : public std::runtime_error {
 public:
  enum class Kind { AuthMissing, Timeout, TransportFailure, ProviderRefusal, ReplayMiss };
  ModelError(Kind kind, RequestKey key, const std::string& what)
      : std::runtime_error(what + " [" + key.str() + "]"), kind_(kind), key_(std::move(key)) {}
  Kind kind() const { return kind_; }
  const RequestKey& key() const { return key_; }

 private:
  Kind kind_;
  RequestKey key_;
};

std::string_view to_string(ModelError::Kind kind);

class ModelBackend {
 public:
  virtual ~ModelBackend() = default;
  virtual RawModelResponse complete(const RenderedPrompt& prompt, const RequestKey& key) = 0;
  /// True when every call is answered without network access.
  virtual bool offline() const { return false; }
};

/// Deterministic stand-in. The responder sees the prompt and request key.
class MockBackend : public ModelBackend {
 public:
  using Responder = std::function<std::string(const RenderedPrompt&, const RequestKey&)>;
  explicit MockBackend(Responder responder, std::string backend_name = "mock");
  /// Responds from `cfg.mock_responses`.
  explicit MockBackend(const BackendConfig& cfg);

  RawModelResponse complete(const RenderedPrompt& prompt, const RequestKey& key) override;
  bool offline() const override { return true; }

 private:
  Responder responder_;
  std::string backend_name_;
};

/// Answers only from a transcript store; unknown keys raise ReplayMiss.
class ReplayBackend : public ModelBackend {
 public:
  explicit ReplayBackend(const TranscriptStore& store) : store_(store) {}
  RawModelResponse complete(const RenderedPrompt& prompt, const RequestKey& key) override;
  bool offline() const override { return true; }

 private:
  const TranscriptStore& store_;
};

/// Serves recorded keys from the store and records everything else.
class RecordingBackend : public ModelBackend {
 public:
  RecordingBackend(ModelBackend& inner, TranscriptStore& store) : inner_(inner), store_(store) {}
  RawModelResponse complete(const RenderedPrompt& prompt, const RequestKey& key) override;
  bool offline() const override { return inner_.offline(); }

 private:
  ModelBackend& inner_;
  TranscriptStore& store_;
};

/// OpenAI-style chat-completion client over HTTP(S).
class HttpChatBackend : public ModelBackend {
 public:
  explicit HttpChatBackend(BackendConfig cfg);
  RawModelResponse complete(const RenderedPrompt& prompt, const RequestKey& key) override;

  /// Request body for `prompt`; exposed for tests.
  nlohmann::json request_body(const RenderedPrompt& prompt) const;

 private:
  BackendConfig cfg_;
};

/// Backend for `cfg.endpoint`. `store` is required for "replay".
std::unique_ptr<ModelBackend> make_backend(const BackendConfig& cfg,
                                           const TranscriptStore* store = nullptr);

/// Key for one call of `cfg` on `prompt`.
RequestKey make_request_key(const BackendConfig& cfg, const RenderedPrompt& prompt,
                            int attempt_index);

/// Issues one call and fills attempt/backend/cost fields.
RawModelResponse query(ModelBackend& backend, const BackendConfig& cfg,
                       const RenderedPrompt& prompt, int attempt_index);

std::optional<double> estimate_cost(const BackendConfig& cfg, const RawModelResponse& resp);

struct TelemetrySummary {
  long calls = 0;
  double total_latency_s = 0.0;
  double mean_latency_s = 0.0;
  double median_latency_s = 0.0;
  double min_latency_s = 0.0;
  double max_latency_s = 0.0;
  long tokens_in = 0;
  long tokens_out = 0;
  long tokens_reasoning = 0;
  double cost = 0.0;
  long calls_with_cost = 0;
};

TelemetrySummary summarize_telemetry(const std::vector<RawModelResponse>& responses);

}  // namespace reforacle
