#include <gtest/gtest.h>

#include <fstream>

#include "coopsim/metrics/events.hpp"
#include "support.hpp"

using namespace coopsim;

namespace {

EventRecord message(int round, const std::string& agent, const std::string& text) {
  EventRecord e;
  e.run_id = "run";
  e.round = round;
  e.phase = Phase::Communication;
  e.agent_id = agent;
  e.kind = EventKind::Message;
  e.payload = json{{"text", text}, {"audience", {"b", "c"}}};
  return e;
}

}  // namespace

TEST(Events, SequenceNumbersStartAtOne) {
  MemoryEventSink sink;
  EXPECT_EQ(append_event(sink, message(1, "a", "x")), 1u);
  EXPECT_EQ(append_event(sink, message(1, "b", "y")), 2u);
  EXPECT_EQ(sink.events()[1].sequence_no, 2u);
}

TEST(Events, MessagePayloadRoundTrips) {
  EventRecord e = message(3, "a", "Let's \"cooperate\" é\n");
  e.sequence_no = 9;
  const json j = to_json(e);
  const EventRecord back = event_from_json(json::parse(j.dump()));
  EXPECT_EQ(back.run_id, e.run_id);
  EXPECT_EQ(back.round, 3);
  EXPECT_EQ(back.phase, Phase::Communication);
  EXPECT_EQ(back.kind, EventKind::Message);
  EXPECT_EQ(back.payload, e.payload);
  EXPECT_EQ(back.sequence_no, 9u);
  EXPECT_EQ(to_json(back).dump(), j.dump());
}

TEST(Events, KindNames) {
  EXPECT_STREQ(to_string(EventKind::LlmCall), "llm_call");
  EXPECT_EQ(parse_event_kind("update"), EventKind::Update);
  EXPECT_THROW(parse_event_kind("noise"), ConfigError);
}

TEST(Events, JsonlSinkWritesOneLinePerEvent) {
  const auto dir = test::fresh_dir("events_many");
  std::filesystem::create_directories(dir);
  const auto path = dir / "events.jsonl";
  {
    JsonlEventSink sink(path);
    for (int i = 0; i < 100000; ++i) {
      append_event(sink, message(1 + i / 1000, "a", "m"));
      if (i % 1000 == 999) sink.end_round(1 + i / 1000);
    }
  }
  std::ifstream in(path, std::ios::binary);
  std::string content((std::istreambuf_iterator<char>(in)), {});
  EXPECT_EQ(std::count(content.begin(), content.end(), '\n'), 100000);
  EXPECT_EQ(content.find('\r'), std::string::npos);
  const auto events = read_events(path);
  EXPECT_EQ(events.back().sequence_no, 100000u);
}

TEST(Events, FlushedAtRoundBoundaries) {
  const auto dir = test::fresh_dir("events_flush");
  std::filesystem::create_directories(dir);
  const auto path = dir / "events.jsonl";
  JsonlEventSink sink(path);
  append_event(sink, message(1, "a", "x"));
  sink.end_round(1);
  EXPECT_EQ(read_events(path).size(), 1u);
}

TEST(Events, UnwritableLogThrows) {
  EXPECT_THROW(JsonlEventSink("/nonexistent-dir/for/sure/events.jsonl"), std::runtime_error);
  EXPECT_THROW(read_events("/nonexistent-dir/events.jsonl"), std::runtime_error);
}
