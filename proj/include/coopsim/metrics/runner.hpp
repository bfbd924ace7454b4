#pragma once

// Executes one configured run into a run directory and replays recorded runs.
//
// Layout of a run directory:
//   manifest.json      config copy, config hash, seed, engine version, references, timestamps
//   events.jsonl       one EventRecord per line
//   transcripts.jsonl  one model call per line (llm, mock and replay agents)
//   metrics.csv        scenario row schema, see export.hpp
//   snapshots/         EE grid frames, when enabled

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <memory>

#include "../agents/llm_agent.hpp"
#include "../bc/bc.hpp"
#include "../ee/ee.hpp"
#include "../kbc/kbc.hpp"
#include "../kernel/kernel.hpp"
#include "../llm/http_transport.hpp"
#include "../llm/mock_model.hpp"
#include "../version.hpp"
#include "export.hpp"

namespace coopsim {

namespace fs = std::filesystem;

inline std::unique_ptr<Scenario> make_scenario(const RunConfig& cfg) {
  switch (cfg.scenario) {
    case ScenarioId::KBC: return std::make_unique<kbc::KbcScenario>(cfg);
    case ScenarioId::BC: return std::make_unique<bc::BcScenario>(cfg);
    case ScenarioId::EE: return std::make_unique<ee::EeScenario>(cfg);
  }
  throw ConfigError("unknown scenario");
}

inline std::string default_run_id(const RunConfig& cfg) {
  return (cfg.label.empty() ? std::string(to_string(cfg.scenario)) : cfg.label) + "_seed" + std::to_string(cfg.seed);
}

inline bool needs_api_key(const RunConfig& cfg) {
  return std::any_of(cfg.roster.begin(), cfg.roster.end(), [](const AgentSpec& a) { return a.backend == Backend::LLM; });
}

inline std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct RunOptions {
  std::string run_id;  // empty: default_run_id
  std::string api_key;
  // Transport for llm agents; defaults to an HTTP client on the configured endpoint.
  std::shared_ptr<llm::HttpTransport> transport;
  llm::Sleeper sleeper;
  // Recorded calls per agent; when set, every non-scripted agent replays them.
  std::optional<std::map<AgentId, std::vector<llm::TranscriptRecord>>> replay;
  std::string replay_of;
};

struct RunOutcome {
  std::string run_id;
  fs::path dir;
  RunResult result;
  json manifest;
};

namespace detail {

inline void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

// Writes a transcript line and the matching llm_call event for every model call.
class RunRecorder : public llm::CallRecorder {
 public:
  RunRecorder(std::string run_id, const fs::path& transcripts, EventSink& sink)
      : run_id_(std::move(run_id)), out_(transcripts, std::ios::binary | std::ios::trunc), sink_(sink) {
    if (!out_) throw std::runtime_error("cannot open " + transcripts.string());
  }

  void record(const llm::CallInfo& call) override {
    llm::TranscriptRecord t;
    t.run_id = run_id_;
    t.round = call.round;
    t.phase = call.phase;
    t.agent_id = call.agent_id;
    t.request_digest = llm::request_digest(*call.request);
    t.prompt = llm::messages_to_json(call.request->messages);
    t.response = call.response->content;
    t.attempts = std::max<int>(1, static_cast<int>(call.response->attempts.size()));
    t.latency_ms = llm::total_latency(*call.response);
    out_ << llm::to_json(t).dump() << '\n';
    out_.flush();
    if (!out_) throw std::runtime_error("transcript write failed");

    // Latency stays out of the event log so replays are byte-identical.
    EventRecord e;
    e.run_id = run_id_;
    e.round = call.round;
    e.phase = call.phase;
    e.agent_id = call.agent_id;
    e.kind = EventKind::LlmCall;
    e.payload = json{{"request_digest", t.request_digest}, {"response", t.response}, {"attempts", t.attempts}};
    sink_.append(std::move(e));
  }

 private:
  std::string run_id_;
  std::ofstream out_;
  EventSink& sink_;
};

inline std::uint64_t mock_seed(std::uint64_t run_seed, std::size_t agent_index) {
  return splitmix64(run_seed ^ splitmix64(agent_index + 1));
}

}  // namespace detail

struct BuiltRoster {
  std::vector<std::unique_ptr<Agent>> owned;
  std::vector<std::shared_ptr<llm::ReplayCompleter>> replayers;
  AgentSet set;
};

inline BuiltRoster build_roster(const RunConfig& cfg, const RunOptions& opt, llm::CallRecorder* recorder) {
  BuiltRoster out;
  const auto settings = llm::llm_settings_from_json(cfg.llm, cfg.scenario);
  std::shared_ptr<llm::ChatCompleter> http;
  for (std::size_t i = 0; i < cfg.roster.size(); ++i) {
    const AgentSpec& spec = cfg.roster[i];
    std::unique_ptr<Agent> agent;
    if (spec.backend == Backend::Scripted) {
      agent = make_scripted_agent(spec, cfg.scenario);
    } else if (opt.replay || spec.backend == Backend::Replay) {
      if (!opt.replay) throw ConfigError("agent '" + spec.id + "' uses the replay backend; use the replay command");
      auto it = opt.replay->find(spec.id);
      auto completer = std::make_shared<llm::ReplayCompleter>(it == opt.replay->end() ? std::vector<llm::TranscriptRecord>{}
                                                                                      : it->second);
      out.replayers.push_back(completer);
      agent = std::make_unique<LlmAgent>(spec, completer, settings, recorder);
    } else if (spec.backend == Backend::Mock) {
      auto completer = std::make_shared<llm::MockChatModel>(detail::mock_seed(cfg.seed, i),
                                                            cfg.llm.value("mock_garble_rate", 0.0));
      agent = std::make_unique<LlmAgent>(spec, completer, settings, recorder);
    } else {
      if (!http) {
        auto transport = opt.transport;
        if (!transport) {
          if (opt.api_key.empty()) throw ConfigError("LLM_API_KEY is not set; the llm backend needs it");
          transport = std::make_shared<llm::HttplibTransport>(settings.endpoint, opt.api_key, settings.timeout_seconds);
        }
        http = std::make_shared<llm::HttpChatCompleter>(transport, settings.retry,
                                                        opt.sleeper ? opt.sleeper : llm::real_sleeper());
      }
      agent = std::make_unique<LlmAgent>(spec, http, settings, recorder);
    }
    out.set[spec.id] = agent.get();
    out.owned.push_back(std::move(agent));
  }
  return out;
}

// Runs `cfg` into `dir`. The manifest is written first with complete=false and
// rewritten at the end; a failed run keeps complete=false, records the error
// and rethrows.
inline RunOutcome execute_run(const RunConfig& cfg, const fs::path& dir, const RunOptions& opt = {}) {
  validate(cfg);
  RunOutcome outcome;
  outcome.run_id = opt.run_id.empty() ? default_run_id(cfg) : opt.run_id;
  outcome.dir = dir;
  fs::create_directories(dir);

  auto scenario = make_scenario(cfg);
  json manifest{{"run_id", outcome.run_id},
                {"engine", kEngineName},
                {"engine_version", kEngineVersion},
                {"scenario", to_string(cfg.scenario)},
                {"seed", cfg.seed},
                {"config", to_json(cfg)},
                {"config_hash", config_hash(cfg)},
                {"references", scenario->references()},
                {"started_at", utc_timestamp()},
                {"finished_at", nullptr},
                {"complete", false},
                {"rounds_executed", 0}};
  if (!opt.replay_of.empty()) manifest["replay_of"] = opt.replay_of;
  const fs::path manifest_path = dir / "manifest.json";
  detail::write_text(manifest_path, manifest.dump(2) + "\n");

  JsonlEventSink sink(dir / "events.jsonl");
  detail::RunRecorder recorder(outcome.run_id, dir / "transcripts.jsonl", sink);

  auto finish = [&](const std::optional<std::string>& error) {
    manifest["finished_at"] = utc_timestamp();
    manifest["complete"] = !error.has_value();
    manifest["rounds_executed"] = outcome.result.rounds_executed;
    if (error) {
      manifest["error"] = *error;
    } else {
      manifest["termination_reason"] = to_string(outcome.result.termination_reason);
      manifest["final_metrics"] = outcome.result.final_metrics;
    }
    detail::write_text(manifest_path, manifest.dump(2) + "\n");
    outcome.manifest = manifest;
  };

  int completed = 0;
  try {
    auto roster = build_roster(cfg, opt, &recorder);
    outcome.result = run_simulation(cfg, *scenario, roster.set, sink, outcome.run_id, &completed);
    for (const auto& r : roster.replayers) {
      if (r->remaining() != 0) throw ReplayRefused("recorded transcript has calls the replayed run never made");
    }
  } catch (const std::exception& e) {
    outcome.result.rounds_executed = completed;
    finish(std::string(e.what()));
    throw;
  }

  if (const auto* evac = dynamic_cast<const ee::EeScenario*>(scenario.get()); evac && !evac->frames().empty()) {
    fs::create_directories(dir / "snapshots");
    for (const auto& [round, frame] : evac->frames()) {
      char name[32];
      std::snprintf(name, sizeof name, "round_%03d.txt", round);
      detail::write_text(dir / "snapshots" / name, frame);
    }
  }
  finish(std::nullopt);
  export_csv(dir);
  return outcome;
}

// Re-executes a recorded run into `out_dir`, feeding each agent its recorded
// model outputs. Scripted agents simply run again.
inline RunOutcome replay(const fs::path& run_dir, const fs::path& out_dir) {
  const fs::path manifest_path = run_dir / "manifest.json";
  if (!fs::exists(manifest_path)) throw ReplayRefused("no manifest.json in " + run_dir.string());
  json manifest;
  {
    std::ifstream in(manifest_path);
    manifest = json::parse(in);
  }
  const RunConfig cfg = run_config_from_json(manifest.at("config"));
  if (config_hash(cfg) != manifest.at("config_hash").get<std::string>()) {
    throw ReplayRefused("config does not match the recorded config hash");
  }
  const bool needs_transcripts = std::any_of(cfg.roster.begin(), cfg.roster.end(),
                                             [](const AgentSpec& a) { return a.backend != Backend::Scripted; });
  const fs::path transcripts = run_dir / "transcripts.jsonl";
  if (needs_transcripts && !fs::exists(transcripts)) throw ReplayRefused("no transcripts.jsonl in " + run_dir.string());

  const std::string run_id = manifest.at("run_id").get<std::string>();
  const auto records = llm::read_transcripts(transcripts);
  for (const auto& r : records) {
    if (r.run_id != run_id) throw ReplayRefused("transcript belongs to run '" + r.run_id + "'");
  }
  if (fs::exists(out_dir) && fs::equivalent(out_dir, run_dir)) throw ReplayRefused("replay output must differ from the source run");

  RunOptions opt;
  opt.run_id = run_id;
  opt.replay = llm::split_by_agent(records);
  opt.replay_of = run_dir.string();
  return execute_run(cfg, out_dir, opt);
}

}  // namespace coopsim
