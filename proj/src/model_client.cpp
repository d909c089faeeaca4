#include "reforacle/model_client.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <sstream>
#include <thread>

#include "httplib.h"

namespace reforacle {

using nlohmann::json;

std::string_view to_string(ModelError::Kind kind) {
  switch (kind) {
    case ModelError::Kind::AuthMissing: return "AuthMissing";
    case ModelError::Kind::Timeout: return "Timeout";
    case ModelError::Kind::TransportFailure: return "TransportFailure";
    case ModelError::Kind::ProviderRefusal: return "ProviderRefusal";
    case ModelError::Kind::ReplayMiss: return "ReplayMiss";
  }
  return "?";
}

std::string BackendConfig::effective_name() const {
  if (!temperature) return name;
  std::ostringstream os;
  os << name << "@t=" << *temperature;
  return os.str();
}

namespace {

struct Url {
  std::string scheme_host_port;
  std::string host;
  std::string path;
};

std::optional<Url> parse_url(const std::string& url) {
  static const std::regex re(R"(^(https?)://([^/:]+)(:\d+)?(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, re)) return std::nullopt;
  Url u;
  u.host = m[2].str();
  u.scheme_host_port = m[1].str() + "://" + u.host + m[3].str();
  u.path = m[4].matched ? m[4].str() : "/";
  return u;
}

std::string resolved_endpoint(const BackendConfig& cfg) {
  return cfg.endpoint == "local" ? std::string(kLocalEndpoint) : cfg.endpoint;
}

}  // namespace

bool BackendConfig::is_remote() const {
  if (endpoint == "mock" || endpoint == "replay" || endpoint == "local") return false;
  const auto url = parse_url(endpoint);
  if (!url) return true;
  return url->host != "localhost" && url->host != "127.0.0.1" && url->host != "::1";
}

void BackendConfig::validate() const {
  if (name.empty()) throw std::invalid_argument("backend name is empty");
  if (temperature && !(*temperature >= 0.0 && *temperature <= 1.0)) {
    throw std::invalid_argument("backend " + name + ": temperature must lie in [0, 1]");
  }
  if (timeout.count() <= 0) throw std::invalid_argument("backend " + name + ": timeout must be > 0");
  if (max_attempts < 1) throw std::invalid_argument("backend " + name + ": max_attempts must be >= 1");
  if (price_in_per_mtok < 0 || price_out_per_mtok < 0) {
    throw std::invalid_argument("backend " + name + ": prices must be non-negative");
  }
  if (endpoint != "mock" && endpoint != "replay" && !parse_url(resolved_endpoint(*this))) {
    throw std::invalid_argument("backend " + name + ": unsupported endpoint " + endpoint);
  }
}

BackendConfig backend_from_json(const json& j) {
  BackendConfig c;
  c.name = j.at("name").get<std::string>();
  c.endpoint = j.value("endpoint", "mock");
  c.auth_env = j.value("auth_env", "");
  if (auto it = j.find("temperature"); it != j.end() && it->is_number()) {
    c.temperature = it->get<double>();
  }
  c.max_attempts = j.value("max_attempts", c.max_attempts);
  if (j.contains("timeout_s")) {
    c.timeout = std::chrono::milliseconds(
        static_cast<long>(std::llround(j.at("timeout_s").get<double>() * 1000)));
  }
  if (j.contains("backoff_s")) {
    c.backoff = std::chrono::milliseconds(
        static_cast<long>(std::llround(j.at("backoff_s").get<double>() * 1000)));
  }
  c.reasoning_effort = j.value("reasoning_effort", "");
  if (j.contains("price")) {
    c.price_in_per_mtok = j.at("price").value("input_per_mtok", 0.0);
    c.price_out_per_mtok = j.at("price").value("output_per_mtok", 0.0);
  }
  if (j.contains("mock_responses")) {
    c.mock_responses = j.at("mock_responses").get<std::map<std::string, std::string>>();
  }
  c.validate();
  return c;
}

std::vector<BackendConfig> load_backend_configs(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read backend config " + path.string());
  const json doc = json::parse(in);
  const json& list = doc.is_array() ? doc : doc.at("backends");
  std::vector<BackendConfig> out;
  for (const json& b : list) out.push_back(backend_from_json(b));
  return out;
}

// ---------------------------------------------------------------------------

MockBackend::MockBackend(Responder responder, std::string backend_name)
    : responder_(std::move(responder)), backend_name_(std::move(backend_name)) {}

MockBackend::MockBackend(const BackendConfig& cfg) : backend_name_(cfg.effective_name()) {
  responder_ = [responses = cfg.mock_responses](const RenderedPrompt&, const RequestKey& key) {
    if (auto it = responses.find(key.instance_id + "#" + std::to_string(key.attempt_index));
        it != responses.end()) {
      return it->second;
    }
    if (auto it = responses.find(key.instance_id); it != responses.end()) return it->second;
    if (auto it = responses.find("*"); it != responses.end()) return it->second;
    return std::string(R"({"verdict": "YES", "explanation": "mock", "junit_test": null})");
  };
}

RawModelResponse MockBackend::complete(const RenderedPrompt& prompt, const RequestKey& key) {
  const auto start = std::chrono::steady_clock::now();
  RawModelResponse r;
  r.text = responder_(prompt, key);
  r.latency_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  r.backend_name = backend_name_;
  r.attempt_index = key.attempt_index;
  r.created_at = utc_timestamp();
  return r;
}

RawModelResponse ReplayBackend::complete(const RenderedPrompt&, const RequestKey& key) {
  auto hit = store_.get(key);
  if (!hit) throw ModelError(ModelError::Kind::ReplayMiss, key, "no recorded response");
  return *hit;
}

RawModelResponse RecordingBackend::complete(const RenderedPrompt& prompt, const RequestKey& key) {
  if (auto hit = store_.get(key)) return *hit;
  RawModelResponse r = inner_.complete(prompt, key);
  store_.record(key, r, /*overwrite=*/true);
  return r;
}

// ---------------------------------------------------------------------------

HttpChatBackend::HttpChatBackend(BackendConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

json HttpChatBackend::request_body(const RenderedPrompt& prompt) const {
  json body = {{"model", cfg_.name},
               {"messages", json::array({{{"role", "user"}, {"content", prompt.text}}})}};
  if (cfg_.temperature) body["temperature"] = *cfg_.temperature;
  if (!cfg_.reasoning_effort.empty()) body["reasoning_effort"] = cfg_.reasoning_effort;
  return body;
}

RawModelResponse HttpChatBackend::complete(const RenderedPrompt& prompt, const RequestKey& key) {
  using Kind = ModelError::Kind;
  std::string api_key;
  if (!cfg_.auth_env.empty()) {
    const char* v = std::getenv(cfg_.auth_env.c_str());
    if (v == nullptr || *v == '\0') {
      throw ModelError(Kind::AuthMissing, key,
                       "environment variable " + cfg_.auth_env + " is not set");
    }
    api_key = v;
  } else if (cfg_.is_remote()) {
    throw ModelError(Kind::AuthMissing, key,
                     "remote backend " + cfg_.name + " has no auth_env configured");
  }

  const auto url = parse_url(resolved_endpoint(cfg_));
  if (!url) throw ModelError(Kind::TransportFailure, key, "bad endpoint " + cfg_.endpoint);

  httplib::Client client(url->scheme_host_port);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(cfg_.timeout);
  const auto usecs =
      std::chrono::duration_cast<std::chrono::microseconds>(cfg_.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());
  httplib::Headers headers;
  if (!api_key.empty()) headers.emplace("Authorization", "Bearer " + api_key);
  const std::string body = request_body(prompt).dump();

  Kind last_kind = Kind::TransportFailure;
  std::string last_error;
  for (int attempt = 1; attempt <= cfg_.max_attempts; ++attempt) {
    if (attempt > 1) {
      std::this_thread::sleep_for(cfg_.backoff * (1L << std::min(attempt - 2, 16)));
    }
    const auto start = std::chrono::steady_clock::now();
    auto res = client.Post(url->path, headers, body, "application/json");
    const double latency =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!res) {
      const httplib::Error err = res.error();
      last_kind = (err == httplib::Error::Read || err == httplib::Error::Write ||
                   err == httplib::Error::ConnectionTimeout)
                      ? Kind::Timeout
                      : Kind::TransportFailure;
      last_error = httplib::to_string(err);
      continue;
    }
    if (res->status == 429 || res->status >= 500) {
      last_kind = Kind::TransportFailure;
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw ModelError(Kind::ProviderRefusal, key,
                       "HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 300));
    }
    json doc = json::parse(res->body, nullptr, false);
    if (doc.is_discarded() || !doc.contains("choices") || !doc["choices"].is_array() ||
        doc["choices"].empty()) {
      last_kind = Kind::TransportFailure;
      last_error = "malformed completion body";
      continue;
    }
    const json& choice = doc["choices"][0];
    if (choice.value("finish_reason", "") == "content_filter") {
      throw ModelError(Kind::ProviderRefusal, key, "response blocked by content filter");
    }
    const json content = choice.contains("message") ? choice["message"].value("content", json())
                                                    : json();
    if (!content.is_string()) {
      throw ModelError(Kind::ProviderRefusal, key, "completion carries no message content");
    }
    RawModelResponse r;
    r.text = content.get<std::string>();
    r.latency_s = latency;
    r.attempt_index = key.attempt_index;
    r.backend_name = cfg_.effective_name();
    r.created_at = utc_timestamp();
    if (doc.contains("usage") && doc["usage"].is_object()) {
      const json& u = doc["usage"];
      if (u.contains("prompt_tokens") && u["prompt_tokens"].is_number()) {
        r.tokens_in = u["prompt_tokens"].get<long>();
      }
      if (u.contains("completion_tokens") && u["completion_tokens"].is_number()) {
        r.tokens_out = u["completion_tokens"].get<long>();
      }
      if (u.contains("completion_tokens_details") &&
          u["completion_tokens_details"].is_object() &&
          u["completion_tokens_details"].contains("reasoning_tokens") &&
          u["completion_tokens_details"]["reasoning_tokens"].is_number()) {
        r.tokens_reasoning = u["completion_tokens_details"]["reasoning_tokens"].get<long>();
      }
    }
    return r;
  }
  throw ModelError(last_kind, key,
                   "giving up after " + std::to_string(cfg_.max_attempts) +
                       " attempt(s): " + last_error);
}

// ---------------------------------------------------------------------------

std::unique_ptr<ModelBackend> make_backend(const BackendConfig& cfg, const TranscriptStore* store) {
  if (cfg.endpoint == "mock") return std::make_unique<MockBackend>(cfg);
  if (cfg.endpoint == "replay") {
    if (store == nullptr) throw std::invalid_argument("replay backend needs a transcript store");
    return std::make_unique<ReplayBackend>(*store);
  }
  return std::make_unique<HttpChatBackend>(cfg);
}

RequestKey make_request_key(const BackendConfig& cfg, const RenderedPrompt& prompt,
                            int attempt_index) {
  return RequestKey{cfg.effective_name(), prompt.instance_id,
                    prompt.variant_tag.value_or(""), attempt_index, prompt.hash()};
}

std::optional<double> estimate_cost(const BackendConfig& cfg, const RawModelResponse& resp) {
  if (cfg.price_in_per_mtok == 0.0 && cfg.price_out_per_mtok == 0.0) return std::nullopt;
  if (!resp.tokens_in && !resp.tokens_out) return std::nullopt;
  return resp.tokens_in.value_or(0) * cfg.price_in_per_mtok / 1e6 +
         resp.tokens_out.value_or(0) * cfg.price_out_per_mtok / 1e6;
}

RawModelResponse query(ModelBackend& backend, const BackendConfig& cfg,
                       const RenderedPrompt& prompt, int attempt_index) {
  if (attempt_index < 1) throw std::invalid_argument("attempt_index must be >= 1");
  RawModelResponse r = backend.complete(prompt, make_request_key(cfg, prompt, attempt_index));
  if (!r.cost_estimate) r.cost_estimate = estimate_cost(cfg, r);
  return r;
}

TelemetrySummary summarize_telemetry(const std::vector<RawModelResponse>& responses) {
  TelemetrySummary s;
  if (responses.empty()) return s;
  std::vector<double> lat;
  for (const RawModelResponse& r : responses) {
    lat.push_back(r.latency_s);
    s.total_latency_s += r.latency_s;
    s.tokens_in += r.tokens_in.value_or(0);
    s.tokens_out += r.tokens_out.value_or(0);
    s.tokens_reasoning += r.tokens_reasoning.value_or(0);
    if (r.cost_estimate) {
      s.cost += *r.cost_estimate;
      ++s.calls_with_cost;
    }
  }
  std::sort(lat.begin(), lat.end());
  s.calls = static_cast<long>(lat.size());
  s.mean_latency_s = s.total_latency_s / s.calls;
  s.min_latency_s = lat.front();
  s.max_latency_s = lat.back();
  const std::size_t mid = lat.size() / 2;
  s.median_latency_s = lat.size() % 2 ? lat[mid] : (lat[mid - 1] + lat[mid]) / 2;
  return s;
}

}  // namespace reforacle
