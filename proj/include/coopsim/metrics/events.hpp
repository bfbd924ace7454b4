#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "../kernel/config.hpp"

namespace coopsim {

enum class EventKind { Message, Strategy, Action, Update, LlmCall };

namespace detail {
inline constexpr std::array<std::pair<EventKind, const char*>, 5> kEventKindNames{
    {{EventKind::Message, "message"},
     {EventKind::Strategy, "strategy"},
     {EventKind::Action, "action"},
     {EventKind::Update, "update"},
     {EventKind::LlmCall, "llm_call"}}};
}
inline const char* to_string(EventKind k) { return detail::enum_name(k, detail::kEventKindNames); }
inline EventKind parse_event_kind(std::string_view s) {
  return detail::parse_enum(s, detail::kEventKindNames, "event kind");
}

struct EventRecord {
  std::string run_id;
  int round = 0;
  Phase phase = Phase::Update;
  AgentId agent_id;
  EventKind kind = EventKind::Update;
  json payload = json::object();
  std::uint64_t sequence_no = 0;

  bool operator==(const EventRecord& o) const {
    return run_id == o.run_id && round == o.round && phase == o.phase && agent_id == o.agent_id &&
           kind == o.kind && payload == o.payload && sequence_no == o.sequence_no;
  }
};

inline json to_json(const EventRecord& e) {
  return json{{"seq", e.sequence_no}, {"run_id", e.run_id},   {"round", e.round},
              {"phase", to_string(e.phase)}, {"agent_id", e.agent_id}, {"kind", to_string(e.kind)},
              {"payload", e.payload}};
}

inline EventRecord event_from_json(const json& j) {
  EventRecord e;
  e.sequence_no = j.at("seq").get<std::uint64_t>();
  e.run_id = j.at("run_id").get<std::string>();
  e.round = j.at("round").get<int>();
  e.phase = parse_phase(j.at("phase").get<std::string>());
  e.agent_id = j.at("agent_id").get<std::string>();
  e.kind = parse_event_kind(j.at("kind").get<std::string>());
  e.payload = j.at("payload");
  return e;
}

// Assigns sequence numbers; subclasses decide where records go.
class EventSink {
 public:
  virtual ~EventSink() = default;

  std::uint64_t append(EventRecord rec) {
    rec.sequence_no = ++last_seq_;
    write(rec);
    return rec.sequence_no;
  }
  virtual void end_round(int /*round*/) {}
  std::uint64_t last_sequence_no() const { return last_seq_; }

 protected:
  virtual void write(const EventRecord& rec) = 0;

 private:
  std::uint64_t last_seq_ = 0;
};

inline std::uint64_t append_event(EventSink& sink, EventRecord rec) { return sink.append(std::move(rec)); }

class MemoryEventSink : public EventSink {
 public:
  const std::vector<EventRecord>& events() const { return events_; }

 protected:
  void write(const EventRecord& rec) override { events_.push_back(rec); }

 private:
  std::vector<EventRecord> events_;
};

// events.jsonl writer: one JSON object per line, LF, flushed at round boundaries.
class JsonlEventSink : public EventSink {
 public:
  explicit JsonlEventSink(const std::filesystem::path& path) : out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw std::runtime_error("cannot open event log " + path.string());
  }

  void end_round(int /*round*/) override {
    out_.flush();
    if (!out_) throw std::runtime_error("event log write failed");
  }

 protected:
  void write(const EventRecord& rec) override {
    out_ << to_json(rec).dump() << '\n';
    if (!out_) throw std::runtime_error("event log write failed");
  }

 private:
  std::ofstream out_;
};

inline std::vector<json> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<json> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(json::parse(line));
  }
  return out;
}

inline std::vector<EventRecord> read_events(const std::filesystem::path& path) {
  std::vector<EventRecord> out;
  for (const auto& j : read_jsonl(path)) out.push_back(event_from_json(j));
  return out;
}

}  // namespace coopsim
