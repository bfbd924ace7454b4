#pragma once

// Emergency evacuation on a square room with three exits. Each round an agent
// replans (talks and picks a target exit) with a fixed probability; otherwise it
// keeps walking toward its latest target.

#include <optional>

#include "../agents/scripted.hpp"
#include "../kernel/kernel.hpp"
#include "grid.hpp"

namespace coopsim::ee {

struct EeConfig {
  int n_agents = 100;
  int height = 33;
  int width = 33;
  int exit_span = 3;
  double replan_probability = 0.2;
  int hearing_radius = 5;
  int view_radius = 10;
  bool snapshots = false;
  std::vector<Cell> initial_positions;  // empty: random
};

inline EeConfig ee_config_from(const RunConfig& cfg) {
  const auto& p = cfg.scenario_params;
  EeConfig c;
  c.n_agents = cfg.num_agents;
  c.height = p.value("height", c.height);
  c.width = p.value("width", c.width);
  c.exit_span = p.value("exit_span", c.exit_span);
  c.replan_probability = p.value("replan_probability", c.replan_probability);
  c.hearing_radius = p.value("hearing_radius", c.hearing_radius);
  c.view_radius = p.value("view_radius", c.view_radius);
  c.snapshots = p.value("snapshots", c.snapshots);
  if (p.contains("initial_positions")) {
    for (const auto& xy : p.at("initial_positions")) c.initial_positions.push_back({xy.at(0).get<int>(), xy.at(1).get<int>()});
    if (static_cast<int>(c.initial_positions.size()) != c.n_agents) {
      throw ConfigError("initial_positions must list one cell per agent");
    }
  }
  if (!(c.replan_probability >= 0.0 && c.replan_probability <= 1.0)) throw ConfigError("replan_probability must be in [0, 1]");
  if (c.hearing_radius < 0 || c.view_radius < 0) throw ConfigError("radii must be >= 0");
  return c;
}

inline bool should_replan(RngStream& rng, double replan_probability) { return rng.bernoulli(replan_probability); }

struct EvacueeState {
  AgentId agent_id;
  Cell position;
  std::optional<ExitId> target_exit;
  std::string panic_note;
  bool escaped = false;
  std::optional<int> escape_round;
  std::optional<ExitId> escape_exit;
};

inline json cell_json(Cell c) { return json::array({c.x, c.y}); }

inline std::string render_frame(const Grid& grid) {
  std::string out;
  for (int x = 1; x <= grid.height(); ++x) {
    for (int y = 1; y <= grid.width(); ++y) {
      const Cell c{x, y};
      char ch = '.';
      if (auto e = grid.exit_at(c)) ch = *e == ExitId::Left ? 'L' : *e == ExitId::Bottom ? 'B' : 'R';
      if (grid.occupied(c)) ch = '@';
      out.push_back(ch);
    }
    out.push_back('\n');
  }
  return out;
}

class EeScenario : public Scenario {
 public:
  explicit EeScenario(const RunConfig& cfg)
      : cfg_(ee_config_from(cfg)), grid_(cfg_.height, cfg_.width, cfg_.exit_span), max_rounds_(cfg.max_rounds) {
    for (const auto& a : cfg.roster) {
      roster_.push_back(a.id);
      persona_[a.id] = a.persona;
      states_[a.id].agent_id = a.id;
    }
  }

  ScenarioId id() const override { return ScenarioId::EE; }

  // Random placement: uniform over free non-exit cells, drawn in roster order.
  void initialize(RngStream& rng) override {
    if (!cfg_.initial_positions.empty()) {
      for (std::size_t i = 0; i < roster_.size(); ++i) {
        const Cell c = cfg_.initial_positions[i];
        if (!grid_.in_bounds(c) || grid_.exit_at(c)) throw ConfigError("initial position " + to_string(c) + " is not a free room cell");
        grid_.place(roster_[i], c);
        states_[roster_[i]].position = c;
      }
      return;
    }
    std::vector<Cell> free;
    for (int x = 1; x <= grid_.height(); ++x) {
      for (int y = 1; y <= grid_.width(); ++y) {
        if (!grid_.exit_at({x, y})) free.push_back({x, y});
      }
    }
    if (free.size() < roster_.size()) throw ConfigError("room too small for the number of agents");
    for (const auto& id : roster_) {
      const auto j = static_cast<std::size_t>(rng.uniform_below(free.size()));
      const Cell c = free[j];
      free[j] = free.back();
      free.pop_back();
      grid_.place(id, c);
      states_[id].position = c;
    }
  }

  std::vector<AgentId> active_agents() const override {
    std::vector<AgentId> out;
    for (const auto& id : roster_) {
      if (!states_.at(id).escaped) out.push_back(id);
    }
    return out;
  }

  void begin_round(int round, const Ordering& order, RngStream& rng) override {
    replanning_.clear();
    heard_.clear();
    for (const auto& id : order.permutation) {
      const bool gate = should_replan(rng, cfg_.replan_probability);
      replanning_[id] = gate || !states_.at(id).target_exit;
    }
    round_ = round;
  }

  bool participates(const AgentId& agent, Phase phase, int /*round*/) const override {
    if (states_.at(agent).escaped) return false;
    if (phase == Phase::Communication || phase == Phase::Planning) return replanning_.at(agent);
    return true;
  }

  AgentContext context(const AgentId& agent, Phase phase, int round, int turn, RngStream& rng) override {
    const auto& st = states_.at(agent);
    AgentContext ctx;
    ctx.scenario = ScenarioId::EE;
    ctx.round = round;
    ctx.phase = phase;
    ctx.turn = turn;
    ctx.self = agent;
    ctx.persona = persona_.at(agent);
    ctx.own_history = &own_[agent];
    for (const auto& m : heard_) {
      if (std::find(m.audience.begin(), m.audience.end(), agent) != m.audience.end()) ctx.visible_messages.push_back(m);
    }

    EeView view{&grid_, st.position, st.target_exit, replanning_.at(agent), {}};
    std::string moves;
    if (phase == Phase::Action) {
      view.options = legal_moves(st.position, grid_);
      rng.shuffle(view.options);
      for (const auto& o : view.options) {
        moves += (moves.empty() ? "" : ", ") + std::string("'") + o.code + "' (" + o.direction +
                 (o.code == 'S' ? " at " : " to ") + to_string(o.target) + ")";
      }
    }
    ctx.view = view;

    std::string overview;
    int nearest = std::numeric_limits<int>::max();
    for (const auto& e : grid_.exits()) {
      const int d = exit_distance(st.position, e);
      nearest = std::min(nearest, d);
      overview += (overview.empty() ? "" : "\n") + std::string("Exit ") + coopsim::to_string(e.id) + ": " +
                  std::to_string(d) + " away, " + std::to_string(congestion_count(st.position, e, grid_, cfg_.view_radius)) +
                  " people around.";
    }
    std::string heard;
    for (const auto& m : ctx.visible_messages) heard += (heard.empty() ? "" : " ") + ("\"" + m.text + "\"");
    ctx.state_summary = overview;
    ctx.bindings = {
        {"max_rounds", std::to_string(max_rounds_)},
        {"height", std::to_string(grid_.height())},
        {"width", std::to_string(grid_.width())},
        {"exit_overview", overview},
        {"distance", std::to_string(nearest)},
        {"number_of_agents", std::to_string(agents_within(st.position, grid_, cfg_.view_radius).size())},
        {"number_of_people_communicated", std::to_string(ctx.visible_messages.size())},
        {"communication", heard.empty() ? std::string("nothing") : heard},
        {"current_pos", to_string(st.position)},
        {"exit_id", st.target_exit ? coopsim::to_string(*st.target_exit) : "none"},
        {"move_directions_list", "[" + moves + "]"},
    };
    return ctx;
  }

  json on_message(const AgentId& agent, int round, int /*turn*/, const std::string& text) override {
    Message m{round, agent, text, hearable_agents(states_.at(agent).position, grid_, cfg_.hearing_radius)};
    heard_.push_back(m);
    return json{{"text", text}, {"audience", m.audience}};
  }

  json on_strategy(const AgentId& agent, int /*round*/, const std::string& text) override {
    states_.at(agent).panic_note = text;
    own_[agent].strategies.push_back(text);
    return json{{"text", text}};
  }

  json on_action(const AgentId& agent, int /*round*/, const AgentAction& action) override {
    auto& st = states_.at(agent);
    AgentAction legal = action;
    const auto* mv = std::get_if<EeMove>(&action.value);
    const auto options = legal_moves(st.position, grid_);
    const bool ok = mv != nullptr && std::any_of(options.begin(), options.end(),
                                                 [&](const MoveOption& o) { return o.code == mv->code; });
    if (!ok) legal = {EeMove{st.target_exit.value_or(nearest_exit(st.position, grid_)), 'S'}, true};
    const auto& move = std::get<EeMove>(legal.value);
    st.target_exit = move.target;
    const Cell to = *move_target(st.position, move.code);
    pending_.push_back({agent, st.position, to});
    own_[agent].actions.push_back(legal);
    return json{{"target", coopsim::to_string(move.target)},
                {"move", std::string(1, move.code)},
                {"to", cell_json(to)},
                {"fallback", legal.fallback}};
  }

  UpdateOutput update(int round, const Ordering& order) override {
    // Requests are applied in the round's speaking order.
    std::vector<MoveRequest> requests;
    for (const auto& id : order.permutation) {
      auto it = std::find_if(pending_.begin(), pending_.end(), [&](const MoveRequest& r) { return r.agent == id; });
      if (it != pending_.end()) requests.push_back(*it);
    }
    pending_.clear();
    const auto applied = apply_moves(requests, grid_);

    UpdateOutput out;
    for (const auto& m : applied.moves) states_.at(m.agent).position = m.to;
    for (const auto& e : applied.escapes) {
      auto& st = states_.at(e.agent);
      st.escaped = true;
      st.escape_round = round;
      st.escape_exit = e.exit;
      ++escaped_by_exit_[e.exit];
    }
    for (const auto& m : applied.moves) {
      const auto& st = states_.at(m.agent);
      json p{{"from", cell_json(m.from)}, {"to", cell_json(m.to)}, {"downgraded", m.downgraded}, {"escaped", st.escaped}};
      if (st.escaped) p["exit"] = coopsim::to_string(*st.escape_exit);
      out.per_agent.emplace_back(m.agent, std::move(p));
    }

    const int escaped = escaped_total();
    const int remaining = static_cast<int>(grid_.population());
    if (escaped + remaining != cfg_.n_agents) throw std::logic_error("evacuee conservation violated");
    out.summary = json{{"escaped_cum", escaped},
                       {"escaped_left", escaped_by_exit_[ExitId::Left]},
                       {"escaped_bottom", escaped_by_exit_[ExitId::Bottom]},
                       {"escaped_right", escaped_by_exit_[ExitId::Right]},
                       {"remaining", remaining}};
    if (cfg_.snapshots) frames_.emplace_back(round, render_frame(grid_));
    return out;
  }

  TerminationDecision check_termination(int round, const RunConfig& config) const override {
    if (escaped_total() == cfg_.n_agents) return TerminationDecision::stop_with(TerminationReason::AllEscaped);
    if (round >= config.max_rounds) return TerminationDecision::stop_with(TerminationReason::MaxRounds);
    return TerminationDecision::cont();
  }

  MetricMap final_metrics() const override {
    return {{"escaped", static_cast<double>(escaped_total())},
            {"escaped_left", static_cast<double>(count(ExitId::Left))},
            {"escaped_bottom", static_cast<double>(count(ExitId::Bottom))},
            {"escaped_right", static_cast<double>(count(ExitId::Right))}};
  }

  const Grid& grid() const { return grid_; }
  const EvacueeState& state(const AgentId& id) const { return states_.at(id); }
  int escaped_total() const { return count(ExitId::Left) + count(ExitId::Bottom) + count(ExitId::Right); }
  int count(ExitId e) const {
    auto it = escaped_by_exit_.find(e);
    return it == escaped_by_exit_.end() ? 0 : it->second;
  }
  // ASCII frames collected when snapshots are enabled, as (round, frame).
  const std::vector<std::pair<int, std::string>>& frames() const { return frames_; }

 private:
  EeConfig cfg_;
  Grid grid_;
  int max_rounds_;
  int round_ = 0;
  std::vector<AgentId> roster_;
  std::map<AgentId, Persona> persona_;
  std::map<AgentId, EvacueeState> states_;
  std::map<AgentId, OwnHistory> own_;
  std::map<AgentId, bool> replanning_;
  std::vector<Message> heard_;
  std::vector<MoveRequest> pending_;
  std::map<ExitId, int> escaped_by_exit_;
  std::vector<std::pair<int, std::string>> frames_;
};

}  // namespace coopsim::ee
