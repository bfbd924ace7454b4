#pragma once

// Keynesian beauty contest: every player picks an integer in [0, 100]; those
// closest to two-thirds of the mean win. Optional k rounds of group discussion
// precede the single decision.

#include <cstdint>
#include <map>
#include <numeric>
#include <set>

#include "../agents/scripted.hpp"
#include "../kernel/kernel.hpp"

namespace coopsim::kbc {

using Choices = std::map<AgentId, int>;

// (2/3) * mean, in double precision. Winner selection does not use this value.
inline double target(const std::vector<int>& choices) {
  if (choices.empty()) throw std::invalid_argument("target of empty choice set");
  const long long sum = std::accumulate(choices.begin(), choices.end(), 0LL);
  return 2.0 * static_cast<double>(sum) / (3.0 * static_cast<double>(choices.size()));
}

inline double target(const Choices& choices) {
  std::vector<int> v;
  for (const auto& [_, c] : choices) v.push_back(c);
  return target(v);
}

// Everyone at minimal |choice - target|. Compared exactly as |3 n c - 2 S|,
// so equidistant players always tie.
inline std::set<AgentId> winners(const Choices& choices) {
  if (choices.empty()) throw std::invalid_argument("winners of empty choice set");
  long long sum = 0;
  for (const auto& [_, c] : choices) sum += c;
  const auto n = static_cast<long long>(choices.size());
  auto scaled_distance = [&](int c) { return std::llabs(3 * n * c - 2 * sum); };
  long long best = std::numeric_limits<long long>::max();
  for (const auto& [_, c] : choices) best = std::min(best, scaled_distance(c));
  std::set<AgentId> out;
  for (const auto& [id, c] : choices) {
    if (scaled_distance(c) == best) out.insert(id);
  }
  return out;
}

// Population variance (divides by N).
inline double choice_variance(const std::vector<int>& choices) {
  if (choices.empty()) throw std::invalid_argument("variance of empty choice set");
  const double n = static_cast<double>(choices.size());
  const double mean = std::accumulate(choices.begin(), choices.end(), 0.0) / n;
  double ss = 0.0;
  for (int c : choices) ss += (c - mean) * (c - mean);
  return ss / n;
}

inline double choice_variance(const Choices& choices) {
  std::vector<int> v;
  for (const auto& [_, c] : choices) v.push_back(c);
  return choice_variance(v);
}

struct KbcConfig {
  int n_players = 24;
  int k = 0;
  int reward_per_winner = 100;
  Persona instruction_variant = Persona::Default;
};

inline KbcConfig kbc_config_from(const RunConfig& cfg) {
  KbcConfig c;
  c.n_players = cfg.num_agents;
  c.k = cfg.scenario_params.value("k", 0);
  c.reward_per_winner = cfg.scenario_params.value("reward_per_winner", 100);
  c.instruction_variant = parse_persona(cfg.scenario_params.value("instruction_variant", std::string("default")));
  if (c.n_players < 2) throw ConfigError("KBC needs at least 2 players");
  if (c.k < 0) throw ConfigError("KBC k must be >= 0");
  return c;
}

class KbcScenario : public Scenario {
 public:
  explicit KbcScenario(const RunConfig& cfg) : cfg_(kbc_config_from(cfg)) {
    int number = 1;
    for (const auto& a : cfg.roster) {
      roster_.push_back(a.id);
      number_[a.id] = number++;
      persona_[a.id] = a.persona != Persona::Default ? a.persona : cfg_.instruction_variant;
    }
  }

  ScenarioId id() const override { return ScenarioId::KBC; }
  std::vector<AgentId> active_agents() const override { return roster_; }

  int decision_round() const { return cfg_.k + 1; }

  int turns(Phase phase, int round) const override {
    if (phase == Phase::Communication) return round <= cfg_.k ? 1 : 0;
    return round == decision_round() ? 1 : 0;
  }

  AgentContext context(const AgentId& agent, Phase phase, int round, int /*turn*/, RngStream&) override {
    AgentContext ctx;
    ctx.scenario = ScenarioId::KBC;
    ctx.round = round;
    ctx.phase = phase;
    ctx.self = agent;
    ctx.persona = persona_.at(agent);
    ctx.visible_messages = discussion_;
    ctx.own_history = &history_[agent];
    ctx.state_summary = render_discussion();
    ctx.bindings = {{"other_players", std::to_string(cfg_.n_players - 1)},
                    {"player_id", std::to_string(number_.at(agent))},
                    {"reward", std::to_string(cfg_.reward_per_winner)},
                    {"discussion_context", ctx.state_summary}};
    ctx.view = KbcView{cfg_.n_players, number_.at(agent), cfg_.k, phase == Phase::Communication ? round : 0};
    return ctx;
  }

  json on_message(const AgentId& agent, int round, int /*turn*/, const std::string& text) override {
    Message m{round, agent, text, {}};
    for (const auto& other : roster_) {
      if (other != agent) m.audience.push_back(other);
    }
    discussion_.push_back(m);
    return json{{"text", text}, {"audience", m.audience}};
  }

  json on_strategy(const AgentId& agent, int /*round*/, const std::string& text) override {
    history_[agent].strategies.push_back(text);
    return json{{"text", text}};
  }

  json on_action(const AgentId& agent, int /*round*/, const AgentAction& action) override {
    AgentAction legal = action;
    const auto* c = std::get_if<KbcChoice>(&action.value);
    if (c == nullptr || c->value < 0 || c->value > 100) legal = {KbcChoice{levelk_choice(0)}, true};
    const int value = std::get<KbcChoice>(legal.value).value;
    choices_[agent] = value;
    history_[agent].actions.push_back(legal);
    return json{{"choice", value}, {"fallback", legal.fallback}};
  }

  UpdateOutput update(int /*round*/, const Ordering&) override {
    UpdateOutput out;
    if (choices_.empty()) return out;
    const auto won = winners(choices_);
    const double t = target(choices_);
    const double var = choice_variance(choices_);
    for (const auto& id : roster_) {
      const bool w = won.count(id) > 0;
      out.per_agent.emplace_back(
          id, json{{"choice", choices_.at(id)}, {"is_winner", w}, {"credits", w ? cfg_.reward_per_winner : 0}});
    }
    out.summary = json{{"target", t}, {"variance", var}, {"winners", won.size()}};
    decided_ = true;
    return out;
  }

  TerminationDecision check_termination(int round, const RunConfig& config) const override {
    if (decided_) return TerminationDecision::stop_with(TerminationReason::SingleDecisionDone);
    if (round >= config.max_rounds) return TerminationDecision::stop_with(TerminationReason::MaxRounds);
    return TerminationDecision::cont();
  }

  MetricMap final_metrics() const override {
    if (choices_.empty()) return {};
    return {{"variance", choice_variance(choices_)},
            {"target", target(choices_)},
            {"winners", static_cast<double>(winners(choices_).size())}};
  }

  const Choices& choices() const { return choices_; }
  const std::vector<Message>& discussion() const { return discussion_; }

 private:
  std::string render_discussion() const {
    std::string out;
    for (const auto& m : discussion_) {
      if (!out.empty()) out += "\n";
      out += "Player #" + std::to_string(number_.at(m.speaker)) + ": " + m.text;
    }
    return out;
  }

  KbcConfig cfg_;
  std::vector<AgentId> roster_;
  std::map<AgentId, int> number_;
  std::map<AgentId, Persona> persona_;
  std::map<AgentId, OwnHistory> history_;
  std::vector<Message> discussion_;
  Choices choices_;
  bool decided_ = false;
};

}  // namespace coopsim::kbc
