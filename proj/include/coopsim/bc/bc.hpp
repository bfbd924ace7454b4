#pragma once

// Two-firm repeated pricing game under logit demand.

#include <cstdio>

#include "../agents/scripted.hpp"
#include "../kernel/kernel.hpp"
#include "history.hpp"

namespace coopsim::bc {

struct BcConfig {
  EconParams econ;
  CollusionWindow window;
  int sustain_rounds = 200;
  bool communication = true;
  int communication_turns = 3;
  int communication_until_round = 0;  // 0: no cut-off
};

inline BcConfig bc_config_from(const RunConfig& cfg) {
  const auto& p = cfg.scenario_params;
  BcConfig c;
  c.econ = econ_params_from_json(p.value("econ", json::object()));
  const auto coll = p.value("collusion", json::object());
  c.window.close_price_threshold = coll.value("close_price_threshold", c.window.close_price_threshold);
  c.window.band_tolerance = coll.value("band_tolerance", c.window.band_tolerance);
  c.sustain_rounds = coll.value("sustain_rounds", c.sustain_rounds);
  c.communication = p.value("communication", c.communication);
  c.communication_turns = p.value("communication_turns", c.communication_turns);
  c.communication_until_round = p.value("communication_until_round", c.communication_until_round);
  if (cfg.num_agents != 2) throw ConfigError("BC needs exactly two firms");
  if (c.sustain_rounds < 1) throw ConfigError("sustain_rounds must be >= 1");
  if (c.communication_turns < 0) throw ConfigError("communication_turns must be >= 0");
  return c;
}

inline std::string format_price(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", p);
  return buf;
}

class BcScenario : public Scenario {
 public:
  explicit BcScenario(const RunConfig& cfg) : cfg_(bc_config_from(cfg)), refs_(solve_references(cfg_.econ)) {
    for (const auto& a : cfg.roster) {
      firms_.push_back(a.id);
      persona_[a.id] = a.persona;
    }
  }

  ScenarioId id() const override { return ScenarioId::BC; }
  std::vector<AgentId> active_agents() const override { return firms_; }

  int turns(Phase phase, int round) const override {
    if (phase != Phase::Communication) return 1;
    if (!cfg_.communication) return 0;
    if (cfg_.communication_until_round > 0 && round > cfg_.communication_until_round) return 0;
    return cfg_.communication_turns;
  }

  AgentContext context(const AgentId& agent, Phase phase, int round, int turn, RngStream&) override {
    const int firm = index_of(agent);
    AgentContext ctx;
    ctx.scenario = ScenarioId::BC;
    ctx.round = round;
    ctx.phase = phase;
    ctx.turn = turn;
    ctx.self = agent;
    ctx.persona = persona_.at(agent);
    ctx.visible_messages = round_messages(round);
    ctx.own_history = &own_[agent];

    const auto stats = summarize_history(history_, round, firm);
    ctx.state_summary = stats.render();
    const auto& strategies = own_[agent].strategies;
    const bool planned_this_round = planned_round_[agent] == round;
    const std::size_t prior = strategies.size() - (planned_this_round ? 1 : 0);
    ctx.bindings = {
        {"firm_name", agent},
        {"rival_firm_name", firms_[1 - firm]},
        {"firm_cost", format_price(cfg_.econ.c)},
        {"current_round", std::to_string(round)},
        {"conversations", render_conversation(ctx.visible_messages)},
        {"statistics", phase == Phase::Action ? stats.render_bins() : stats.render()},
        {"decision_history_past_20_rounds", stats.render_verbatim()},
        {"strategies", prior > 0 ? strategies[prior - 1] : std::string("None")},
        {"previous_strategies", strategies.empty() ? std::string("Your strategy: None")
                                                   : "Your strategy: " + strategies.back()},
    };

    BcView view{cfg_.econ, refs_, std::nullopt, std::nullopt};
    if (!history_.empty()) {
      const auto& last = history_.back();
      view.own_last_price = firm == 0 ? last.p1 : last.p2;
      view.rival_last_price = firm == 0 ? last.p2 : last.p1;
    }
    ctx.view = view;
    return ctx;
  }

  json on_message(const AgentId& agent, int round, int turn, const std::string& text) override {
    messages_.push_back({round, agent, text, {firms_[1 - index_of(agent)]}});
    return json{{"text", text}, {"audience", messages_.back().audience}, {"turn", turn}};
  }

  json on_strategy(const AgentId& agent, int round, const std::string& text) override {
    own_[agent].strategies.push_back(text);
    planned_round_[agent] = round;
    return json{{"text", text}};
  }

  json on_action(const AgentId& agent, int /*round*/, const AgentAction& action) override {
    AgentAction legal = action;
    const auto* p = std::get_if<BcPrice>(&action.value);
    if (p == nullptr || !(p->value >= 0.0) || !std::isfinite(p->value)) legal = fallback(agent);
    pending_[agent] = std::get<BcPrice>(legal.value).value;
    own_[agent].actions.push_back(legal);
    return json{{"price", std::get<BcPrice>(legal.value).value}, {"fallback", legal.fallback}};
  }

  UpdateOutput update(int round, const Ordering&) override {
    UpdateOutput out;
    if (pending_.size() != 2) throw std::logic_error("BC update before both firms priced");
    PriceRecord r;
    r.round = round;
    r.p1 = pending_.at(firms_[0]);
    r.p2 = pending_.at(firms_[1]);
    const auto d = logit_demand(r.p1, r.p2, cfg_.econ);
    r.q1 = d.q1;
    r.q2 = d.q2;
    r.profit1 = profit(r.p1, cfg_.econ.c, r.q1);
    r.profit2 = profit(r.p2, cfg_.econ.c, r.q2);
    history_.push_back(r);
    pending_.clear();
    streak_ = collusive(r, refs_, cfg_.window) ? streak_ + 1 : 0;
    max_streak_ = std::max(max_streak_, streak_);

    out.per_agent.emplace_back(firms_[0], json{{"price", r.p1}, {"demand", r.q1}, {"profit", r.profit1}});
    out.per_agent.emplace_back(firms_[1], json{{"price", r.p2}, {"demand", r.q2}, {"profit", r.profit2}});
    out.summary = json{{"p1", r.p1},           {"p2", r.p2},           {"q1", r.q1},
                       {"q2", r.q2},           {"profit1", r.profit1}, {"profit2", r.profit2},
                       {"collusion_streak", streak_}};
    return out;
  }

  TerminationDecision check_termination(int round, const RunConfig& config) const override {
    if (streak_ >= cfg_.sustain_rounds) return TerminationDecision::stop_with(TerminationReason::CollusionSustained);
    if (round >= config.max_rounds) return TerminationDecision::stop_with(TerminationReason::MaxRounds);
    return TerminationDecision::cont();
  }

  MetricMap final_metrics() const override {
    MetricMap m{{"collusion_streak", static_cast<double>(streak_)},
                {"max_collusion_streak", static_cast<double>(max_streak_)},
                {"p_bertrand", refs_.p_bertrand},
                {"p_cartel", refs_.p_cartel}};
    if (!history_.empty()) {
      m["final_p1"] = history_.back().p1;
      m["final_p2"] = history_.back().p2;
    }
    return m;
  }

  json references() const override { return json{{"p_bertrand", refs_.p_bertrand}, {"p_cartel", refs_.p_cartel}}; }

  const PriceHistory& history() const { return history_; }
  const ReferencePrices& refs() const { return refs_; }
  int streak() const { return streak_; }

 private:
  int index_of(const AgentId& agent) const { return agent == firms_[0] ? 0 : 1; }

  std::vector<Message> round_messages(int round) const {
    std::vector<Message> out;
    for (auto it = messages_.rbegin(); it != messages_.rend() && it->round == round; ++it) out.push_back(*it);
    std::reverse(out.begin(), out.end());
    return out;
  }

  static std::string render_conversation(const std::vector<Message>& msgs) {
    if (msgs.empty()) return "None";
    std::string out;
    for (const auto& m : msgs) out += (out.empty() ? "" : "\n") + ("Firm " + m.speaker + ": " + m.text);
    return out;
  }

  AgentAction fallback(const AgentId& agent) const {
    if (!history_.empty()) return {BcPrice{index_of(agent) == 0 ? history_.back().p1 : history_.back().p2}, true};
    return {BcPrice{0.5 * (cfg_.econ.c + refs_.p_cartel)}, true};
  }

  BcConfig cfg_;
  ReferencePrices refs_;
  std::vector<AgentId> firms_;
  std::map<AgentId, Persona> persona_;
  std::map<AgentId, OwnHistory> own_;
  std::map<AgentId, int> planned_round_;
  std::map<AgentId, double> pending_;
  std::vector<Message> messages_;
  PriceHistory history_;
  int streak_ = 0;
  int max_streak_ = 0;
};

}  // namespace coopsim::bc
