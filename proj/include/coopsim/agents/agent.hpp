#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "../bc/economics.hpp"
#include "../ee/grid.hpp"
#include "../kernel/config.hpp"

namespace coopsim {

struct OwnHistory {
  std::vector<std::string> strategies;
  std::vector<AgentAction> actions;
};

struct KbcView {
  int n_players = 0;
  int player_number = 0;  // 1-based position in the roster
  int k = 0;
  int discussion_round = 0;  // 1..k during communication, 0 otherwise
};

struct BcView {
  bc::EconParams params;
  bc::ReferencePrices refs;
  std::optional<double> own_last_price;
  std::optional<double> rival_last_price;
};

struct EeView {
  const ee::Grid* grid = nullptr;
  ee::Cell position;
  std::optional<ExitId> target;
  bool replanning = false;
  std::vector<ee::MoveOption> options;  // presentation order, action phase only
};

struct AgentContext {
  ScenarioId scenario = ScenarioId::KBC;
  int round = 0;
  Phase phase = Phase::Communication;
  int turn = 0;  // communication sub-turn within the round
  AgentId self;
  Persona persona = Persona::Default;
  std::vector<Message> visible_messages;
  std::string state_summary;
  // Values for the scenario's prompt placeholders.
  std::map<std::string, std::string> bindings;
  const OwnHistory* own_history = nullptr;
  std::variant<std::monostate, KbcView, BcView, EeView> view;
};

class Agent {
 public:
  virtual ~Agent() = default;

  virtual const AgentSpec& spec() const = 0;
  const AgentId& id() const { return spec().id; }

  virtual std::string communicate(const AgentContext& ctx) = 0;
  virtual std::string plan(const AgentContext& ctx) = 0;
  virtual AgentAction act(const AgentContext& ctx) = 0;
};

}  // namespace coopsim
