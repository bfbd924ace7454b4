#pragma once

// Round loop shared by every scenario. Each round: derive the round's random
// stream, shuffle the speaking order, let the scenario draw its per-agent gates,
// then run the configured phases in order. A run is single-threaded and strictly
// ordered because later speakers see earlier messages.

#include <map>
#include <set>
#include <stdexcept>
#include <utility>

#include "../agents/agent.hpp"
#include "../metrics/events.hpp"
#include "rng.hpp"

namespace coopsim {

struct UpdateOutput {
  std::vector<std::pair<AgentId, json>> per_agent;
  json summary = json::object();
};

class Scenario {
 public:
  virtual ~Scenario() = default;

  virtual ScenarioId id() const = 0;
  // Round-0 setup (e.g. initial positions), drawn from the round-0 stream.
  virtual void initialize(RngStream& /*rng*/) {}
  // Agents still in play, in roster order.
  virtual std::vector<AgentId> active_agents() const = 0;
  // Per-agent random gates for the round, drawn right after the shuffle.
  virtual void begin_round(int /*round*/, const Ordering& /*order*/, RngStream& /*rng*/) {}
  // Number of passes over the speaking order for `phase`; 0 skips the phase.
  virtual int turns(Phase /*phase*/, int /*round*/) const { return 1; }
  virtual bool participates(const AgentId& /*agent*/, Phase /*phase*/, int /*round*/) const { return true; }
  virtual AgentContext context(const AgentId& agent, Phase phase, int round, int turn, RngStream& rng) = 0;

  // Record agent output; the returned JSON becomes the event payload.
  virtual json on_message(const AgentId& agent, int round, int turn, const std::string& text) = 0;
  virtual json on_strategy(const AgentId& agent, int round, const std::string& text) = 0;
  // Must store a legal action: illegal ones are replaced by the scenario fallback.
  virtual json on_action(const AgentId& agent, int round, const AgentAction& action) = 0;
  virtual UpdateOutput update(int round, const Ordering& order) = 0;

  virtual TerminationDecision check_termination(int round, const RunConfig& config) const = 0;
  virtual MetricMap final_metrics() const { return {}; }
  // Values recorded in the run manifest (e.g. reference prices).
  virtual json references() const { return json::object(); }
};

inline Ordering shuffle_order(int round, std::vector<AgentId> active_agents, RngStream& rng) {
  if (active_agents.empty()) throw std::invalid_argument("shuffle_order needs at least one agent");
  rng.shuffle(active_agents);
  return {round, std::move(active_agents)};
}

inline TerminationDecision check_termination(const Scenario& scenario, int round, const RunConfig& config) {
  return scenario.check_termination(round, config);
}

using AgentSet = std::map<AgentId, Agent*>;

inline RunResult run_simulation(const RunConfig& config, Scenario& scenario, const AgentSet& roster,
                                EventSink& sink, const std::string& run_id, int* rounds_completed = nullptr) {
  validate(config);
  if (scenario.id() != config.scenario) throw ConfigError("scenario does not match config");
  for (const auto& a : config.roster) {
    if (!roster.count(a.id) || roster.at(a.id) == nullptr) throw ConfigError("no agent bound for '" + a.id + "'");
  }

  auto emit = [&](int round, Phase phase, const AgentId& agent, EventKind kind, json payload) {
    EventRecord rec;
    rec.run_id = run_id;
    rec.round = round;
    rec.phase = phase;
    rec.agent_id = agent;
    rec.kind = kind;
    rec.payload = std::move(payload);
    sink.append(std::move(rec));
  };

  RngStream setup = RngStream::for_round(config.seed, 0);
  scenario.initialize(setup);

  RunResult result;
  for (int round = 1; round <= config.max_rounds; ++round) {
    const auto active = scenario.active_agents();
    if (active.empty()) break;
    RngStream rng = RngStream::for_round(config.seed, static_cast<std::uint64_t>(round));
    const Ordering order = shuffle_order(round, active, rng);
    scenario.begin_round(round, order, rng);

    try {
      for (Phase phase : config.phase_order) {
        if (phase == Phase::Update) {
          if (scenario.turns(phase, round) == 0) continue;
          UpdateOutput out = scenario.update(round, order);
          for (auto& [agent, payload] : out.per_agent) emit(round, phase, agent, EventKind::Update, std::move(payload));
          emit(round, phase, "", EventKind::Update, std::move(out.summary));
          continue;
        }
        const int turns = scenario.turns(phase, round);
        for (int turn = 0; turn < turns; ++turn) {
          std::set<AgentId> acted;
          for (const auto& id : order.permutation) {
            if (!scenario.participates(id, phase, round)) continue;
            if (!acted.insert(id).second) throw std::logic_error("agent scheduled twice in one turn");
            Agent& agent = *roster.at(id);
            AgentContext ctx = scenario.context(id, phase, round, turn, rng);
            switch (phase) {
              case Phase::Communication:
                emit(round, phase, id, EventKind::Message, scenario.on_message(id, round, turn, agent.communicate(ctx)));
                break;
              case Phase::Planning:
                emit(round, phase, id, EventKind::Strategy, scenario.on_strategy(id, round, agent.plan(ctx)));
                break;
              case Phase::Action:
                emit(round, phase, id, EventKind::Action, scenario.on_action(id, round, agent.act(ctx)));
                break;
              case Phase::Update:
                break;
            }
          }
        }
      }
    } catch (const BackendUnavailable& e) {
      sink.end_round(round);
      throw RunAborted(std::string("backend failure in round ") + std::to_string(round) + ": " + e.what());
    } catch (const ProtocolError& e) {
      sink.end_round(round);
      throw RunAborted(std::string("backend protocol error in round ") + std::to_string(round) + ": " + e.what());
    }

    sink.end_round(round);
    result.rounds_executed = round;
    if (rounds_completed) *rounds_completed = round;
    const auto decision = scenario.check_termination(round, config);
    if (decision.stop) {
      result.termination_reason = decision.reason;
      break;
    }
  }
  result.final_metrics = scenario.final_metrics();
  return result;
}

}  // namespace coopsim
