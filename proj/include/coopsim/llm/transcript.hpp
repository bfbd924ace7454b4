#pragma once

#include <deque>
#include <filesystem>
#include <fstream>
#include <map>

#include "chat.hpp"

namespace coopsim::llm {

struct TranscriptRecord {
  std::string run_id;
  int round = 0;
  Phase phase = Phase::Communication;
  AgentId agent_id;
  std::string request_digest;
  json prompt = json::array();  // the request messages
  std::string response;
  int attempts = 1;
  double latency_ms = 0.0;
};

inline json to_json(const TranscriptRecord& r) {
  return json{{"run_id", r.run_id},
              {"round", r.round},
              {"phase", coopsim::to_string(r.phase)},
              {"agent_id", r.agent_id},
              {"request_digest", r.request_digest},
              {"prompt", r.prompt},
              {"response", r.response},
              {"attempts", r.attempts},
              {"latency_ms", r.latency_ms}};
}

inline TranscriptRecord transcript_from_json(const json& j) {
  TranscriptRecord r;
  r.run_id = j.at("run_id").get<std::string>();
  r.round = j.at("round").get<int>();
  r.phase = parse_phase(j.at("phase").get<std::string>());
  r.agent_id = j.at("agent_id").get<std::string>();
  r.request_digest = j.at("request_digest").get<std::string>();
  r.prompt = j.at("prompt");
  r.response = j.at("response").get<std::string>();
  r.attempts = j.at("attempts").get<int>();
  r.latency_ms = j.at("latency_ms").get<double>();
  return r;
}

inline std::vector<TranscriptRecord> read_transcripts(const std::filesystem::path& path) {
  std::vector<TranscriptRecord> out;
  if (!std::filesystem::exists(path)) return out;
  std::ifstream in(path, std::ios::binary);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(transcript_from_json(json::parse(line)));
  }
  return out;
}

struct CallInfo {
  int round = 0;
  Phase phase = Phase::Communication;
  AgentId agent_id;
  const ChatRequest* request = nullptr;
  const ChatResponse* response = nullptr;
};

// Receives every completed model call, in call order.
class CallRecorder {
 public:
  virtual ~CallRecorder() = default;
  virtual void record(const CallInfo& call) = 0;
};

inline double total_latency(const ChatResponse& r) {
  double sum = 0.0;
  for (const auto& a : r.attempts) sum += a.latency_ms;
  return sum;
}

// Re-emits one agent's recorded responses in order. A request whose digest
// differs from the recorded one means the run has diverged.
class ReplayCompleter : public ChatCompleter {
 public:
  explicit ReplayCompleter(std::vector<TranscriptRecord> records) : records_(records.begin(), records.end()) {}

  ChatResponse complete(const ChatRequest& req) override {
    if (records_.empty()) throw ReplayRefused("transcript exhausted: run issued more calls than were recorded");
    TranscriptRecord rec = std::move(records_.front());
    records_.pop_front();
    const std::string digest = request_digest(req);
    if (digest != rec.request_digest) {
      throw ReplayRefused("request digest mismatch for agent '" + rec.agent_id + "' in round " +
                          std::to_string(rec.round) + " (" + coopsim::to_string(rec.phase) + ")");
    }
    ChatResponse out;
    out.content = rec.response;
    out.finish_reason = "stop";
    for (int i = 1; i <= rec.attempts; ++i) {
      out.attempts.push_back({i, i == rec.attempts ? 200 : 0, {}, i == rec.attempts ? rec.latency_ms : 0.0});
    }
    return out;
  }

  std::size_t remaining() const { return records_.size(); }

 private:
  std::deque<TranscriptRecord> records_;
};

inline std::map<AgentId, std::vector<TranscriptRecord>> split_by_agent(const std::vector<TranscriptRecord>& all) {
  std::map<AgentId, std::vector<TranscriptRecord>> out;
  for (const auto& r : all) out[r.agent_id].push_back(r);
  return out;
}

}  // namespace coopsim::llm
