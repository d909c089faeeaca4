#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace reforacle {

/// Identifies one model call.
struct RequestKey {
  std::string backend;
  std::string instance_id;
  std::string variant_tag;  // empty for unmodified instances
  int attempt_index = 1;
  std::string prompt_hash;

  /// `backend|instance|variant|attempt|prompt_hash`, variant "-" when empty.
  std::string str() const;
  bool operator==(const RequestKey&) const = default;
};

nlohmann::json to_json(const RequestKey& key);
RequestKey request_key_from_json(const nlohmann::json& j);

struct RawModelResponse {
  std::string text;
  double latency_s = 0.0;
  std::optional<long> tokens_in;
  std::optional<long> tokens_out;
  std::optional<long> tokens_reasoning;
  std::optional<double> cost_estimate;
  int attempt_index = 1;
  std::string backend_name;
  std::string created_at;  // ISO-8601 UTC

  bool operator==(const RawModelResponse&) const = default;
};

nlohmann::json to_json(const RawModelResponse& resp);
RawModelResponse response_from_json(const nlohmann::json& j);

/// Current UTC time as `YYYY-MM-DDTHH:MM:SS.mmmZ`.
std::string utc_timestamp();

class StoreError : public std::runtime_error {
 public:
  enum class Kind { DuplicateKey, Corrupt, Io };
  StoreError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Recorded model responses, persisted as JSON lines
/// (`{"key": {...}, "response": {...}}`). When a key appears on several
/// lines the last one wins. Writes are serialized and flushed per record.
class TranscriptStore {
 public:
  /// In-memory store.
  TranscriptStore() = default;

  /// Loads `path` if it exists; later records append to it.
  static TranscriptStore open(const std::filesystem::path& path);

  TranscriptStore(TranscriptStore&& other) noexcept;
  TranscriptStore& operator=(TranscriptStore&&) = delete;

  bool contains(const RequestKey& key) const;
  std::optional<RawModelResponse> get(const RequestKey& key) const;

  /// Throws DuplicateKey when the key exists and `overwrite` is false.
  void record(const RequestKey& key, const RawModelResponse& resp, bool overwrite = false);

  std::size_t size() const;
  std::vector<RequestKey> keys() const;
  const std::optional<std::filesystem::path>& path() const { return path_; }

 private:
  mutable std::mutex mu_;
  std::optional<std::filesystem::path> path_;
  std::ofstream out_;
  std::map<std::string, std::pair<RequestKey, RawModelResponse>> records_;
};

}  // namespace reforacle
