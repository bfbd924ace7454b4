#pragma once

// Deterministic non-LLM agents. Each is a pure function of (context, spec) and
// serves as a test oracle and baseline.

#include <cmath>
#include <memory>
#include <sstream>
#include <tuple>

#include "agent.hpp"

namespace coopsim {

// round(50 * (2/3)^k): level-0 anchors at the mean of uniform guesses.
inline int levelk_choice(int k) {
  if (k < 0) throw std::invalid_argument("level must be >= 0");
  return static_cast<int>(std::lround(50.0 * std::pow(2.0 / 3.0, k)));
}

// Own-profit argmax over the grid c, c + step, ... <= 2 * p_cartel against a fixed rival price.
inline double br_price(double opponent_price, const bc::EconParams& params, double grid_step) {
  if (opponent_price < 0.0) throw std::invalid_argument("opponent price must be >= 0");
  if (!(grid_step > 0.0)) throw std::invalid_argument("grid step must be > 0");
  const double hi = 2.0 * bc::cartel_price(params);
  const auto n = static_cast<long>(std::floor((hi - params.c) / grid_step + 1e-9));
  double best_p = params.c;
  double best = bc::own_profit(best_p, opponent_price, params);
  for (long i = 1; i <= n; ++i) {
    const double p = params.c + static_cast<double>(i) * grid_step;
    const double v = bc::own_profit(p, opponent_price, params);
    if (v > best) {
      best = v;
      best_p = p;
    }
  }
  return best_p;
}

inline ExitId nearest_exit(ee::Cell pos, const ee::Grid& grid) {
  ExitId best = ExitId::Left;
  int best_d = std::numeric_limits<int>::max();
  for (const auto& e : grid.exits()) {
    const int d = ee::exit_distance(pos, e);
    if (d < best_d) {
      best_d = d;
      best = e.id;
    }
  }
  return best;
}

// Option that minimizes (distance to the exit span, squared distance to the
// exit center); ties go to the lowest code. Never worse than staying.
inline ee::MoveOption greedy_move(ee::Cell pos, const ee::ExitSpec& exit, const std::vector<ee::MoveOption>& options) {
  auto key = [&](const ee::MoveOption& m) {
    const int dx = m.target.x - exit.center.x;
    const int dy = m.target.y - exit.center.y;
    return std::make_tuple(ee::exit_distance(m.target, exit), dx * dx + dy * dy, m.code);
  };
  ee::MoveOption best{'S', pos, "stay"};
  auto best_key = key(best);
  for (const auto& m : options) {
    const auto k = key(m);
    if (k < best_key) {
      best_key = k;
      best = m;
    }
  }
  return best;
}

class ScriptedAgent : public Agent {
 public:
  explicit ScriptedAgent(AgentSpec spec) : spec_(std::move(spec)) {}
  const AgentSpec& spec() const override { return spec_; }

 protected:
  AgentSpec spec_;
};

class LevelKAgent : public ScriptedAgent {
 public:
  explicit LevelKAgent(AgentSpec spec) : ScriptedAgent(std::move(spec)), level_(spec_.params.value("level", 1)) {
    if (level_ < 0) throw ConfigError("level must be >= 0");
  }

  std::string communicate(const AgentContext&) override {
    return "I think the answer is " + std::to_string(levelk_choice(level_)) + ".";
  }
  std::string plan(const AgentContext&) override {
    std::ostringstream s;
    s << "Level-" << level_ << " reasoning from an anchor of 50: I choose " << levelk_choice(level_) << ".";
    return s.str();
  }
  AgentAction act(const AgentContext&) override { return {KbcChoice{levelk_choice(level_)}}; }

 private:
  int level_;
};

class FixedChoiceAgent : public ScriptedAgent {
 public:
  explicit FixedChoiceAgent(AgentSpec spec) : ScriptedAgent(std::move(spec)), value_(spec_.params.at("value").get<int>()) {
    if (value_ < 0 || value_ > 100) throw ConfigError("fixed choice must be in [0, 100]");
  }
  std::string communicate(const AgentContext&) override { return "I will pick " + std::to_string(value_) + "."; }
  std::string plan(const AgentContext&) override { return "Always pick " + std::to_string(value_) + "."; }
  AgentAction act(const AgentContext&) override { return {KbcChoice{value_}}; }

 private:
  int value_;
};

class BestResponsePricer : public ScriptedAgent {
 public:
  explicit BestResponsePricer(AgentSpec spec) : ScriptedAgent(std::move(spec)) {}

  std::string communicate(const AgentContext&) override {
    return "I price to maximize my own profit given your last price.";
  }
  std::string plan(const AgentContext&) override { return "Best-respond to the rival's last price."; }
  AgentAction act(const AgentContext& ctx) override {
    const auto& v = std::get<BcView>(ctx.view);
    const double step = spec_.params.value("grid_step", v.params.price_grid_step);
    if (v.rival_last_price) return {BcPrice{br_price(*v.rival_last_price, v.params, step)}};
    const double start = spec_.params.value("initial_price", 0.5 * (v.params.c + v.refs.p_cartel));
    return {BcPrice{start}};
  }
};

class FixedPricer : public ScriptedAgent {
 public:
  explicit FixedPricer(AgentSpec spec) : ScriptedAgent(std::move(spec)), price_(spec_.params.at("price").get<double>()) {
    if (price_ < 0.0) throw ConfigError("fixed price must be >= 0");
  }
  std::string communicate(const AgentContext&) override { return "My price stays where it is."; }
  std::string plan(const AgentContext&) override { return "Keep a constant price."; }
  AgentAction act(const AgentContext&) override { return {BcPrice{price_}}; }

 private:
  double price_;
};

class GreedyEvacuee : public ScriptedAgent {
 public:
  explicit GreedyEvacuee(AgentSpec spec) : ScriptedAgent(std::move(spec)) {}

  std::string communicate(const AgentContext& ctx) override {
    return std::string("I am heading to the ") + to_string(choose_target(ctx)) + " exit.";
  }
  std::string plan(const AgentContext& ctx) override {
    return std::string("Go to the ") + to_string(choose_target(ctx)) + " exit.";
  }
  AgentAction act(const AgentContext& ctx) override {
    const auto& v = std::get<EeView>(ctx.view);
    const ExitId target = choose_target(ctx);
    const auto move = greedy_move(v.position, v.grid->exit(target), v.options);
    return {EeMove{target, move.code}};
  }

 private:
  static ExitId choose_target(const AgentContext& ctx) {
    const auto& v = std::get<EeView>(ctx.view);
    if (v.target && !v.replanning) return *v.target;
    return nearest_exit(v.position, *v.grid);
  }
};

inline std::unique_ptr<Agent> make_scripted_agent(const AgentSpec& spec, ScenarioId scenario) {
  const std::string fallback_kind = scenario == ScenarioId::KBC  ? "levelk"
                                    : scenario == ScenarioId::BC ? "best_response"
                                                                 : "greedy";
  const std::string kind = spec.params.value("kind", fallback_kind);
  try {
    if (scenario == ScenarioId::KBC && kind == "levelk") return std::make_unique<LevelKAgent>(spec);
    if (scenario == ScenarioId::KBC && kind == "fixed") return std::make_unique<FixedChoiceAgent>(spec);
    if (scenario == ScenarioId::BC && kind == "best_response") return std::make_unique<BestResponsePricer>(spec);
    if (scenario == ScenarioId::BC && kind == "fixed") return std::make_unique<FixedPricer>(spec);
    if (scenario == ScenarioId::EE && kind == "greedy") return std::make_unique<GreedyEvacuee>(spec);
  } catch (const json::exception& e) {
    throw ConfigError("agent '" + spec.id + "': " + e.what());
  }
  throw ConfigError("agent '" + spec.id + "': unknown scripted kind '" + kind + "' for " + to_string(scenario));
}

}  // namespace coopsim
