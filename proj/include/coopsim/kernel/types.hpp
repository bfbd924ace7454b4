#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "../errors.hpp"

namespace coopsim {

using AgentId = std::string;

enum class ScenarioId { KBC, BC, EE };
enum class Phase { Communication, Planning, Action, Update };
enum class Backend { LLM, Mock, Scripted, Replay };
enum class Persona { Default, ExplicitCooperate, Uncooperative };
enum class TerminationReason { MaxRounds, AllEscaped, CollusionSustained, SingleDecisionDone };
enum class ExitId { Left, Bottom, Right };

inline constexpr std::array<Phase, 4> kAllPhases = {Phase::Communication, Phase::Planning,
                                                     Phase::Action, Phase::Update};
inline constexpr std::array<ExitId, 3> kAllExits = {ExitId::Left, ExitId::Bottom, ExitId::Right};

namespace detail {
template <typename E, std::size_t N>
E parse_enum(std::string_view text, const std::array<std::pair<E, const char*>, N>& table,
             const char* what) {
  for (const auto& [value, name] : table) {
    if (text == name) return value;
  }
  throw ConfigError(std::string("unknown ") + what + ": '" + std::string(text) + "'");
}
template <typename E, std::size_t N>
const char* enum_name(E value, const std::array<std::pair<E, const char*>, N>& table) {
  for (const auto& [v, name] : table) {
    if (v == value) return name;
  }
  return "?";
}

inline constexpr std::array<std::pair<ScenarioId, const char*>, 3> kScenarioNames{
    {{ScenarioId::KBC, "kbc"}, {ScenarioId::BC, "bc"}, {ScenarioId::EE, "ee"}}};
inline constexpr std::array<std::pair<Phase, const char*>, 4> kPhaseNames{
    {{Phase::Communication, "communication"},
     {Phase::Planning, "planning"},
     {Phase::Action, "action"},
     {Phase::Update, "update"}}};
inline constexpr std::array<std::pair<Backend, const char*>, 4> kBackendNames{
    {{Backend::LLM, "llm"}, {Backend::Mock, "mock"}, {Backend::Scripted, "scripted"},
     {Backend::Replay, "replay"}}};
inline constexpr std::array<std::pair<Persona, const char*>, 3> kPersonaNames{
    {{Persona::Default, "default"},
     {Persona::ExplicitCooperate, "cooperate"},
     {Persona::Uncooperative, "uncooperative"}}};
inline constexpr std::array<std::pair<TerminationReason, const char*>, 4> kReasonNames{
    {{TerminationReason::MaxRounds, "MaxRounds"},
     {TerminationReason::AllEscaped, "AllEscaped"},
     {TerminationReason::CollusionSustained, "CollusionSustained"},
     {TerminationReason::SingleDecisionDone, "SingleDecisionDone"}}};
inline constexpr std::array<std::pair<ExitId, const char*>, 3> kExitNames{
    {{ExitId::Left, "left"}, {ExitId::Bottom, "bottom"}, {ExitId::Right, "right"}}};
}  // namespace detail

inline const char* to_string(ScenarioId v) { return detail::enum_name(v, detail::kScenarioNames); }
inline const char* to_string(Phase v) { return detail::enum_name(v, detail::kPhaseNames); }
inline const char* to_string(Backend v) { return detail::enum_name(v, detail::kBackendNames); }
inline const char* to_string(Persona v) { return detail::enum_name(v, detail::kPersonaNames); }
inline const char* to_string(TerminationReason v) { return detail::enum_name(v, detail::kReasonNames); }
inline const char* to_string(ExitId v) { return detail::enum_name(v, detail::kExitNames); }

inline ScenarioId parse_scenario(std::string_view s) {
  return detail::parse_enum(s, detail::kScenarioNames, "scenario");
}
inline Phase parse_phase(std::string_view s) { return detail::parse_enum(s, detail::kPhaseNames, "phase"); }
inline Backend parse_backend(std::string_view s) {
  return detail::parse_enum(s, detail::kBackendNames, "backend");
}
inline Persona parse_persona(std::string_view s) {
  return detail::parse_enum(s, detail::kPersonaNames, "persona");
}
inline TerminationReason parse_reason(std::string_view s) {
  return detail::parse_enum(s, detail::kReasonNames, "termination reason");
}
inline ExitId parse_exit_id(std::string_view s) { return detail::parse_enum(s, detail::kExitNames, "exit"); }

struct Message {
  int round = 0;
  AgentId speaker;
  std::string text;
  std::vector<AgentId> audience;
};

struct KbcChoice {
  int value = 0;
  bool operator==(const KbcChoice&) const = default;
};
struct BcPrice {
  double value = 0.0;
  bool operator==(const BcPrice&) const = default;
};
struct EeMove {
  ExitId target = ExitId::Left;
  char code = 'S';
  bool operator==(const EeMove&) const = default;
};

struct AgentAction {
  std::variant<KbcChoice, BcPrice, EeMove> value;
  // True when the backend output could not be used and the scenario fallback was taken.
  bool fallback = false;
};

struct Ordering {
  int round = 0;
  std::vector<AgentId> permutation;
};

struct TerminationDecision {
  bool stop = false;
  TerminationReason reason = TerminationReason::MaxRounds;

  static TerminationDecision cont() { return {}; }
  static TerminationDecision stop_with(TerminationReason r) { return {true, r}; }
};

using MetricMap = std::map<std::string, double>;

struct RunResult {
  int rounds_executed = 0;
  TerminationReason termination_reason = TerminationReason::MaxRounds;
  MetricMap final_metrics;
};

}  // namespace coopsim
