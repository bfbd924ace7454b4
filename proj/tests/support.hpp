#pragma once

#include <filesystem>
#include <string>

#include "coopsim/kernel/config.hpp"

namespace coopsim::test {

inline std::filesystem::path fresh_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "coopsim_tests" / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir.parent_path());
  return dir;
}

inline RunConfig make_config(ScenarioId scenario, int n, Backend backend, json params, json agent_params = json::object(),
                             std::uint64_t seed = 1) {
  json j{{"scenario", to_string(scenario)},
         {"seed", seed},
         {"scenario_params", std::move(params)},
         {"agents", json::array({{{"id", scenario == ScenarioId::BC ? "firm" : "agent"},
                                  {"count", n},
                                  {"backend", to_string(backend)},
                                  {"params", std::move(agent_params)}}})}};
  return run_config_from_json(j);
}

inline RunConfig kbc_config(int n, int k, Backend backend = Backend::Scripted, json agent_params = {{"kind", "levelk"}, {"level", 1}},
                            std::uint64_t seed = 1) {
  return make_config(ScenarioId::KBC, n, backend, json{{"k", k}}, std::move(agent_params), seed);
}

inline json calibrated_econ() {
  return json{{"a", 6.012380501893249}, {"a0", 0.0}, {"mu", 3.3312699187262047}, {"c", 1.0}, {"price_grid_step", 0.01}};
}

inline RunConfig bc_config(Backend backend = Backend::Scripted, json agent_params = json::object(), int max_rounds = 50,
                           bool communication = false, std::uint64_t seed = 1) {
  RunConfig c = make_config(ScenarioId::BC, 2, backend, json{{"econ", calibrated_econ()}, {"communication", communication}},
                            std::move(agent_params), seed);
  c.max_rounds = max_rounds;
  return c;
}

inline RunConfig ee_config(int n, Backend backend = Backend::Scripted, std::uint64_t seed = 1, json extra = json::object()) {
  json params{{"height", 33}, {"width", 33}};
  params.update(extra);
  return make_config(ScenarioId::EE, n, backend, params, json{{"kind", "greedy"}}, seed);
}

}  // namespace coopsim::test
