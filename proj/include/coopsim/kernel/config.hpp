#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "digest.hpp"
#include "types.hpp"

namespace coopsim {

using json = nlohmann::json;

struct AgentSpec {
  AgentId id;
  Backend backend = Backend::Scripted;
  Persona persona = Persona::Default;
  json params = json::object();
};

// One fully resolved run. Batches (`runs` > 1) are expanded by the runner with seeds S+i.
struct RunConfig {
  ScenarioId scenario = ScenarioId::KBC;
  std::string label;
  std::uint64_t seed = 0;
  int num_agents = 0;
  int max_rounds = 1;
  std::vector<Phase> phase_order{kAllPhases.begin(), kAllPhases.end()};
  json scenario_params = json::object();
  std::vector<AgentSpec> roster;
  json llm = json::object();
};

struct BatchConfig {
  RunConfig base;
  int runs = 1;
};

inline std::vector<Phase> declared_phases(ScenarioId) {
  return {kAllPhases.begin(), kAllPhases.end()};
}

inline int default_max_rounds(ScenarioId scenario, const json& params) {
  switch (scenario) {
    case ScenarioId::KBC:
      return params.value("k", 0) + 1;
    case ScenarioId::BC:
      return 1200;
    case ScenarioId::EE:
      return 50;
  }
  return 1;
}

inline void validate(const RunConfig& cfg) {
  if (cfg.roster.empty()) throw ConfigError("roster is empty");
  if (cfg.num_agents != static_cast<int>(cfg.roster.size())) {
    throw ConfigError("num_agents (" + std::to_string(cfg.num_agents) + ") != roster length (" +
                      std::to_string(cfg.roster.size()) + ")");
  }
  if (cfg.max_rounds < 1) throw ConfigError("max_rounds must be >= 1");
  std::set<AgentId> ids;
  for (const auto& a : cfg.roster) {
    if (a.id.empty()) throw ConfigError("agent id must be non-empty");
    if (!ids.insert(a.id).second) throw ConfigError("duplicate agent id '" + a.id + "'");
  }
  auto declared = declared_phases(cfg.scenario);
  auto order = cfg.phase_order;
  std::sort(declared.begin(), declared.end());
  std::sort(order.begin(), order.end());
  if (declared != order) throw ConfigError("phase_order is not a permutation of the scenario's phases");
}

inline json agent_to_json(const AgentSpec& a) {
  return json{{"id", a.id},
              {"backend", to_string(a.backend)},
              {"persona", to_string(a.persona)},
              {"params", a.params}};
}

inline json to_json(const RunConfig& cfg) {
  json agents = json::array();
  for (const auto& a : cfg.roster) agents.push_back(agent_to_json(a));
  json phases = json::array();
  for (auto p : cfg.phase_order) phases.push_back(to_string(p));
  return json{{"scenario", to_string(cfg.scenario)},
              {"label", cfg.label},
              {"seed", cfg.seed},
              {"num_agents", cfg.num_agents},
              {"max_rounds", cfg.max_rounds},
              {"phase_order", phases},
              {"scenario_params", cfg.scenario_params},
              {"agents", agents},
              {"llm", cfg.llm}};
}

// SHA-256 of the canonical (sorted-key) serialization.
inline std::string config_hash(const RunConfig& cfg) { return sha256_hex(to_json(cfg).dump()); }

namespace detail {
inline std::vector<AgentSpec> expand_agents(const json& list) {
  if (!list.is_array()) throw ConfigError("'agents' must be an array");
  std::vector<AgentSpec> out;
  for (const auto& entry : list) {
    AgentSpec base;
    base.backend = parse_backend(entry.value("backend", std::string("scripted")));
    base.persona = parse_persona(entry.value("persona", std::string("default")));
    base.params = entry.value("params", json::object());
    const std::string id = entry.value("id", std::string());
    const int count = entry.value("count", 0);
    if (count > 0) {
      // "id" is a prefix; members are numbered from 1.
      for (int i = 1; i <= count; ++i) {
        AgentSpec a = base;
        a.id = id + std::to_string(i);
        out.push_back(std::move(a));
      }
    } else {
      base.id = id;
      out.push_back(std::move(base));
    }
  }
  return out;
}
}  // namespace detail

inline RunConfig run_config_from_json(const json& j) {
  try {
    RunConfig cfg;
    if (!j.contains("scenario")) throw ConfigError("missing key 'scenario'");
    cfg.scenario = parse_scenario(j.at("scenario").get<std::string>());
    cfg.label = j.value("label", std::string());
    cfg.seed = j.value("seed", std::uint64_t{0});
    cfg.scenario_params = j.value("scenario_params", json::object());
    if (!j.contains("agents")) throw ConfigError("missing key 'agents'");
    cfg.roster = detail::expand_agents(j.at("agents"));
    cfg.num_agents = j.value("num_agents", static_cast<int>(cfg.roster.size()));
    cfg.max_rounds = j.contains("max_rounds") ? j.at("max_rounds").get<int>()
                                              : default_max_rounds(cfg.scenario, cfg.scenario_params);
    if (j.contains("phase_order")) {
      cfg.phase_order.clear();
      for (const auto& p : j.at("phase_order")) cfg.phase_order.push_back(parse_phase(p.get<std::string>()));
    }
    cfg.llm = j.value("llm", json::object());
    validate(cfg);
    return cfg;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
}

inline BatchConfig load_batch_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  json j;
  try {
    j = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  BatchConfig batch;
  batch.base = run_config_from_json(j);
  batch.runs = j.value("runs", 1);
  if (batch.runs < 1) throw ConfigError("runs must be >= 1");
  return batch;
}

}  // namespace coopsim
