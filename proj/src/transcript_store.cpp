#include "reforacle/transcript_store.hpp"

#include <chrono>
#include <ctime>
#include <cstdio>

namespace reforacle {

using nlohmann::json;

namespace {

json opt(const std::optional<long>& v) { return v ? json(*v) : json(nullptr); }
json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

template <typename T>
std::optional<T> read_opt(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<T>();
}

}  // namespace

std::string RequestKey::str() const {
  return backend + "|" + instance_id + "|" + (variant_tag.empty() ? "-" : variant_tag) + "|" +
         std::to_string(attempt_index) + "|" + prompt_hash;
}

json to_json(const RequestKey& key) {
  return {{"backend", key.backend},         {"instance_id", key.instance_id},
          {"variant_tag", key.variant_tag}, {"attempt_index", key.attempt_index},
          {"prompt_hash", key.prompt_hash}};
}

RequestKey request_key_from_json(const json& j) {
  RequestKey k;
  k.backend = j.at("backend").get<std::string>();
  k.instance_id = j.at("instance_id").get<std::string>();
  k.variant_tag = j.value("variant_tag", "");
  k.attempt_index = j.at("attempt_index").get<int>();
  k.prompt_hash = j.at("prompt_hash").get<std::string>();
  return k;
}

json to_json(const RawModelResponse& r) {
  return {{"text", r.text},
          {"latency_s", r.latency_s},
          {"tokens_in", opt(r.tokens_in)},
          {"tokens_out", opt(r.tokens_out)},
          {"tokens_reasoning", opt(r.tokens_reasoning)},
          {"cost_estimate", opt(r.cost_estimate)},
          {"attempt_index", r.attempt_index},
          {"backend_name", r.backend_name},
          {"created_at", r.created_at}};
}

RawModelResponse response_from_json(const json& j) {
  RawModelResponse r;
  r.text = j.at("text").get<std::string>();
  r.latency_s = j.value("latency_s", 0.0);
  r.tokens_in = read_opt<long>(j, "tokens_in");
  r.tokens_out = read_opt<long>(j, "tokens_out");
  r.tokens_reasoning = read_opt<long>(j, "tokens_reasoning");
  r.cost_estimate = read_opt<double>(j, "cost_estimate");
  r.attempt_index = j.value("attempt_index", 1);
  r.backend_name = j.value("backend_name", "");
  r.created_at = j.value("created_at", "");
  return r;
}

std::string utc_timestamp() {
  using namespace std::chrono;
  const auto now = system_clock::now();
  const std::time_t t = system_clock::to_time_t(now);
  const auto ms = duration_cast<milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[96];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900,
                tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec,
                static_cast<int>(ms));
  return buf;
}

TranscriptStore TranscriptStore::open(const std::filesystem::path& path) {
  TranscriptStore store;
  store.path_ = path;
  if (std::filesystem::exists(path)) {
    std::ifstream in(path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        const json j = json::parse(line);
        RequestKey key = request_key_from_json(j.at("key"));
        RawModelResponse resp = response_from_json(j.at("response"));
        const std::string k = key.str();
        store.records_[k] = {std::move(key), std::move(resp)};
      } catch (const json::exception& e) {
        throw StoreError(StoreError::Kind::Corrupt, path.string() + ":" +
                                                        std::to_string(lineno) + ": " + e.what());
      }
    }
  } else if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  store.out_.open(path, std::ios::app);
  if (!store.out_) {
    throw StoreError(StoreError::Kind::Io, "cannot open transcript store " + path.string());
  }
  return store;
}

TranscriptStore::TranscriptStore(TranscriptStore&& other) noexcept
    : path_(std::move(other.path_)),
      out_(std::move(other.out_)),
      records_(std::move(other.records_)) {}

bool TranscriptStore::contains(const RequestKey& key) const {
  std::lock_guard lock(mu_);
  return records_.count(key.str()) != 0;
}

std::optional<RawModelResponse> TranscriptStore::get(const RequestKey& key) const {
  std::lock_guard lock(mu_);
  auto it = records_.find(key.str());
  if (it == records_.end()) return std::nullopt;
  return it->second.second;
}

void TranscriptStore::record(const RequestKey& key, const RawModelResponse& resp,
                             bool overwrite) {
  std::lock_guard lock(mu_);
  const std::string k = key.str();
  if (!overwrite && records_.count(k)) {
    throw StoreError(StoreError::Kind::DuplicateKey, "transcript already holds " + k);
  }
  records_[k] = {key, resp};
  if (out_.is_open()) {
    out_ << json{{"key", to_json(key)}, {"response", to_json(resp)}}.dump() << '\n';
    out_.flush();
    if (!out_) throw StoreError(StoreError::Kind::Io, "write failed for " + path_->string());
  }
}

std::size_t TranscriptStore::size() const {
  std::lock_guard lock(mu_);
  return records_.size();
}

std::vector<RequestKey> TranscriptStore::keys() const {
  std::lock_guard lock(mu_);
  std::vector<RequestKey> out;
  for (const auto& [k, v] : records_) out.push_back(v.first);
  return out;
}

}  // namespace reforacle
