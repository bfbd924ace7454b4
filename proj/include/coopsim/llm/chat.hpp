#pragma once

// Chat-completion client: request/response types, the wire format, and the
// retrying `complete` call. The HTTP layer sits behind HttpTransport so tests
// can script failures without a network.

#include <chrono>
#include <functional>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "../errors.hpp"
#include "../kernel/config.hpp"
#include "../kernel/digest.hpp"

namespace coopsim::llm {

struct SamplingParams {
  double temperature = 0.7;
  int max_tokens = 256;
  double top_p = 1.0;
};

// Per-scenario defaults from the GPT-4 settings table.
inline SamplingParams default_sampling(ScenarioId scenario) {
  switch (scenario) {
    case ScenarioId::KBC: return {0.7, 256, 1.0};
    case ScenarioId::BC: return {0.7, 128, 1.0};
    case ScenarioId::EE: return {0.0, 512, 1.0};
  }
  return {};
}

inline void validate(const SamplingParams& s) {
  if (!(s.temperature >= 0.0)) throw ConfigError("temperature must be >= 0");
  if (s.max_tokens < 1) throw ConfigError("max_tokens must be positive");
  if (!(s.top_p > 0.0 && s.top_p <= 1.0)) throw ConfigError("top_p must be in (0, 1]");
}

struct ChatMessage {
  std::string role;  // system | user | assistant
  std::string content;
};

struct ChatRequest {
  std::string model;
  std::vector<ChatMessage> messages;
  SamplingParams sampling;
};

struct AttemptRecord {
  int attempt = 0;
  int status = 0;  // HTTP status, 0 for transport failure
  std::string error;
  double latency_ms = 0.0;
};

struct ChatResponse {
  std::string content;
  std::string finish_reason;
  int prompt_tokens = 0;
  int completion_tokens = 0;
  std::vector<AttemptRecord> attempts;
};

inline json messages_to_json(const std::vector<ChatMessage>& msgs) {
  json arr = json::array();
  for (const auto& m : msgs) arr.push_back({{"role", m.role}, {"content", m.content}});
  return arr;
}

inline json to_wire(const ChatRequest& req) {
  return json{{"model", req.model},
              {"messages", messages_to_json(req.messages)},
              {"temperature", req.sampling.temperature},
              {"max_tokens", req.sampling.max_tokens},
              {"top_p", req.sampling.top_p}};
}

inline std::string request_digest(const ChatRequest& req) { return sha256_hex(to_wire(req).dump()); }

inline ChatResponse parse_wire_response(const std::string& body) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("response is not JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("choices") || !j["choices"].is_array() || j["choices"].empty()) {
    throw ProtocolError("response has no choices");
  }
  const auto& choice = j["choices"][0];
  if (!choice.is_object() || !choice.contains("message") || !choice["message"].is_object() ||
      !choice["message"].contains("content") || !choice["message"]["content"].is_string()) {
    throw ProtocolError("response choice has no message content");
  }
  ChatResponse r;
  r.content = choice["message"]["content"].get<std::string>();
  if (choice.contains("finish_reason") && choice["finish_reason"].is_string()) {
    r.finish_reason = choice["finish_reason"].get<std::string>();
  }
  if (j.contains("usage") && j["usage"].is_object()) {
    r.prompt_tokens = j["usage"].value("prompt_tokens", 0);
    r.completion_tokens = j["usage"].value("completion_tokens", 0);
  }
  return r;
}

struct HttpResult {
  int status = 0;  // 0 when the request never got a response
  std::string body;
  std::string error;
};

class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual HttpResult post_json(const std::string& body) = 0;
};

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{1000};
  double backoff_factor = 2.0;
  std::chrono::milliseconds max_backoff{30000};
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

inline Sleeper real_sleeper() {
  return [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

inline bool is_retryable(const HttpResult& r) { return r.status == 0 || r.status == 429 || r.status >= 500; }

// First successful response. Transport errors, 429 and 5xx are retried with
// exponential backoff; every attempt goes to `on_attempt`.
inline ChatResponse complete(const ChatRequest& req, const RetryPolicy& policy, HttpTransport& transport,
                             const Sleeper& sleep = real_sleeper(),
                             const std::function<void(const AttemptRecord&)>& on_attempt = {}) {
  if (req.messages.empty()) throw std::invalid_argument("chat request has no messages");
  const std::string body = to_wire(req).dump();
  std::vector<AttemptRecord> attempts;
  auto backoff = policy.initial_backoff;
  const int max_attempts = std::max(1, policy.max_attempts);
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    const auto t0 = std::chrono::steady_clock::now();
    HttpResult res = transport.post_json(body);
    AttemptRecord rec;
    rec.attempt = attempt;
    rec.status = res.status;
    rec.latency_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    if (res.status >= 200 && res.status < 300) {
      attempts.push_back(rec);
      if (on_attempt) on_attempt(rec);
      ChatResponse out = parse_wire_response(res.body);
      out.attempts = std::move(attempts);
      return out;
    }
    rec.error = res.status == 0 ? res.error : "HTTP " + std::to_string(res.status);
    attempts.push_back(rec);
    if (on_attempt) on_attempt(rec);
    if (!is_retryable(res)) {
      throw BackendUnavailable("chat endpoint rejected request: " + rec.error, attempt);
    }
    if (attempt < max_attempts) {
      sleep(backoff);
      backoff = std::min(policy.max_backoff,
                         std::chrono::milliseconds(static_cast<long long>(backoff.count() * policy.backoff_factor)));
    }
  }
  throw BackendUnavailable("chat endpoint unavailable after " + std::to_string(max_attempts) +
                               " attempts: " + attempts.back().error,
                           max_attempts);
}

// What an LLM-backed agent talks to: a live endpoint, a mock model, or a transcript.
class ChatCompleter {
 public:
  virtual ~ChatCompleter() = default;
  virtual ChatResponse complete(const ChatRequest& req) = 0;
};

class HttpChatCompleter : public ChatCompleter {
 public:
  HttpChatCompleter(std::shared_ptr<HttpTransport> transport, RetryPolicy policy, Sleeper sleep = real_sleeper())
      : transport_(std::move(transport)), policy_(policy), sleep_(std::move(sleep)) {}

  ChatResponse complete(const ChatRequest& req) override { return llm::complete(req, policy_, *transport_, sleep_); }

 private:
  std::shared_ptr<HttpTransport> transport_;
  RetryPolicy policy_;
  Sleeper sleep_;
};

struct LlmSettings {
  std::string endpoint = "https://api.openai.com/v1/chat/completions";
  std::string model = "gpt-4-0314";
  SamplingParams sampling;
  RetryPolicy retry;
  int timeout_seconds = 60;
};

inline LlmSettings llm_settings_from_json(const json& j, ScenarioId scenario) {
  LlmSettings s;
  s.sampling = default_sampling(scenario);
  s.endpoint = j.value("endpoint", s.endpoint);
  s.model = j.value("model", s.model);
  s.sampling.temperature = j.value("temperature", s.sampling.temperature);
  s.sampling.max_tokens = j.value("max_tokens", s.sampling.max_tokens);
  s.sampling.top_p = j.value("top_p", s.sampling.top_p);
  s.timeout_seconds = j.value("timeout_seconds", s.timeout_seconds);
  if (j.contains("retry")) {
    const auto& r = j["retry"];
    s.retry.max_attempts = r.value("max_attempts", s.retry.max_attempts);
    s.retry.initial_backoff = std::chrono::milliseconds(r.value("initial_backoff_ms", 1000));
    s.retry.backoff_factor = r.value("backoff_factor", s.retry.backoff_factor);
    s.retry.max_backoff = std::chrono::milliseconds(r.value("max_backoff_ms", 30000));
  }
  validate(s.sampling);
  return s;
}

}  // namespace coopsim::llm
