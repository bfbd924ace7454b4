#pragma once

// CSV export of a finished run and per-setting aggregation across runs.
//
// metrics.csv columns by scenario:
//   kbc  run_id,k,agent_id,choice,is_winner,variance_of_run   (one row per player)
//   bc   run_id,round,p1,p2,q1,q2,profit1,profit2,collusion_streak
//   ee   run_id,round,escaped_cum,escaped_left,escaped_bottom,escaped_right
// kbc runs also get histogram.csv: k,choice,count.

#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include "../kernel/config.hpp"
#include "events.hpp"

namespace coopsim {

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

// Shortest round-trip form, the same one used in the event log.
inline std::string csv_number(double v) { return json(v).dump(); }
inline std::string csv_number(long long v) { return std::to_string(v); }

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string to_csv(const CsvTable& t) {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? "," : "") + csv_field(cells[i]);
    out += '\n';
  };
  line(t.columns);
  for (const auto& r : t.rows) line(r);
  return out;
}

inline void write_csv(const std::filesystem::path& path, const CsvTable& t) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << to_csv(t);
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

inline json read_manifest(const std::filesystem::path& run_dir) {
  const auto path = run_dir / "manifest.json";
  std::ifstream in(path);
  if (!in) throw std::runtime_error("no manifest.json in " + run_dir.string());
  return json::parse(in);
}

// Everything export and aggregation need from one closed run.
struct RunRecord {
  std::string run_id;
  ScenarioId scenario = ScenarioId::KBC;
  std::string setting;
  json config;
  json manifest;
  int rounds_executed = 0;
  std::map<int, json> summaries;                               // round -> update summary
  std::map<int, std::vector<std::pair<AgentId, json>>> updates;  // round -> per-agent updates
};

inline std::string setting_name(const json& config) {
  const std::string label = config.value("label", std::string());
  return label.empty() ? config.at("scenario").get<std::string>() : label;
}

// Loads a run and refuses (IncompleteLog) unless every round that should carry an
// update does.
inline RunRecord load_run(const std::filesystem::path& run_dir) {
  RunRecord r;
  r.manifest = read_manifest(run_dir);
  r.config = r.manifest.at("config");
  r.run_id = r.manifest.at("run_id").get<std::string>();
  r.scenario = parse_scenario(r.manifest.at("scenario").get<std::string>());
  r.setting = setting_name(r.config);
  r.rounds_executed = r.manifest.value("rounds_executed", 0);
  const bool complete = r.manifest.value("complete", false);

  int last_seen = 0;
  for (const auto& e : read_events(run_dir / "events.jsonl")) {
    last_seen = std::max(last_seen, e.round);
    if (e.kind != EventKind::Update) continue;
    if (e.agent_id.empty()) {
      r.summaries[e.round] = e.payload;
    } else {
      r.updates[e.round].emplace_back(e.agent_id, e.payload);
    }
  }

  // Only the decision round updates in KBC; other scenarios update every round.
  const int horizon = std::max(r.rounds_executed, complete ? 0 : last_seen);
  std::vector<int> expected;
  if (r.scenario == ScenarioId::KBC) {
    const int decision = r.config.at("scenario_params").value("k", 0) + 1;
    if (complete || horizon >= decision) expected.push_back(decision);
  } else {
    for (int round = 1; round <= horizon; ++round) expected.push_back(round);
  }
  std::vector<int> missing;
  for (int round : expected) {
    if (!r.summaries.count(round)) missing.push_back(round);
  }
  if (!complete && missing.empty()) missing.push_back(r.rounds_executed + 1);
  if (!missing.empty()) {
    std::string names;
    for (int m : missing) names += (names.empty() ? "" : ", ") + std::to_string(m);
    throw IncompleteLog("run '" + r.run_id + "' has an incomplete event log; missing rounds: " + names, missing);
  }
  return r;
}

inline CsvTable metrics_table(const RunRecord& r) {
  CsvTable t;
  switch (r.scenario) {
    case ScenarioId::KBC: {
      t.columns = {"run_id", "k", "agent_id", "choice", "is_winner", "variance_of_run"};
      const int k = r.config.at("scenario_params").value("k", 0);
      const auto& summary = r.summaries.at(k + 1);
      for (const auto& [agent, p] : r.updates.at(k + 1)) {
        t.rows.push_back({r.run_id, std::to_string(k), agent, std::to_string(p.at("choice").get<int>()),
                          p.at("is_winner").get<bool>() ? "1" : "0", csv_number(summary.at("variance").get<double>())});
      }
      break;
    }
    case ScenarioId::BC:
      t.columns = {"run_id", "round", "p1", "p2", "q1", "q2", "profit1", "profit2", "collusion_streak"};
      for (const auto& [round, s] : r.summaries) {
        std::vector<std::string> row{r.run_id, std::to_string(round)};
        for (const char* key : {"p1", "p2", "q1", "q2", "profit1", "profit2"}) row.push_back(csv_number(s.at(key).get<double>()));
        row.push_back(std::to_string(s.at("collusion_streak").get<int>()));
        t.rows.push_back(std::move(row));
      }
      break;
    case ScenarioId::EE:
      t.columns = {"run_id", "round", "escaped_cum", "escaped_left", "escaped_bottom", "escaped_right"};
      for (const auto& [round, s] : r.summaries) {
        t.rows.push_back({r.run_id, std::to_string(round), std::to_string(s.at("escaped_cum").get<int>()),
                          std::to_string(s.at("escaped_left").get<int>()), std::to_string(s.at("escaped_bottom").get<int>()),
                          std::to_string(s.at("escaped_right").get<int>())});
      }
      break;
  }
  return t;
}

inline CsvTable kbc_histogram(const std::vector<RunRecord>& runs) {
  std::map<std::pair<int, int>, int> counts;
  for (const auto& r : runs) {
    const int k = r.config.at("scenario_params").value("k", 0);
    for (const auto& [_, p] : r.updates.at(k + 1)) ++counts[{k, p.at("choice").get<int>()}];
  }
  CsvTable t{{"k", "choice", "count"}, {}};
  for (const auto& [key, n] : counts) t.rows.push_back({std::to_string(key.first), std::to_string(key.second), std::to_string(n)});
  return t;
}

// Writes metrics.csv (and histogram.csv for kbc) into the run directory.
inline std::filesystem::path export_csv(const std::filesystem::path& run_dir) {
  const RunRecord r = load_run(run_dir);
  const auto path = run_dir / "metrics.csv";
  write_csv(path, metrics_table(r));
  if (r.scenario == ScenarioId::KBC) write_csv(run_dir / "histogram.csv", kbc_histogram({r}));
  return path;
}

// A directory argument is either a run directory or a batch directory whose
// children are runs.
inline std::vector<std::filesystem::path> expand_run_dirs(const std::vector<std::filesystem::path>& dirs) {
  std::vector<std::filesystem::path> out;
  for (const auto& d : dirs) {
    if (!std::filesystem::is_directory(d)) throw std::runtime_error("not a directory: " + d.string());
    if (std::filesystem::exists(d / "manifest.json")) {
      out.push_back(d);
      continue;
    }
    std::vector<std::filesystem::path> children;
    for (const auto& entry : std::filesystem::directory_iterator(d)) {
      if (entry.is_directory() && std::filesystem::exists(entry.path() / "manifest.json")) children.push_back(entry.path());
    }
    if (children.empty()) throw std::runtime_error("no runs found in " + d.string());
    std::sort(children.begin(), children.end());
    out.insert(out.end(), children.begin(), children.end());
  }
  return out;
}

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

// EE rounds reported by the aggregate: every 5th round up to the horizon.
inline constexpr int kEeAggregateStride = 5;

// Per-setting means across runs.
//   kbc  setting,k,runs,mean_variance,mean_target,mean_winners
//   bc   setting,runs,mean_rounds,collusion_rate,mean_final_p1,mean_final_p2,mean_final_streak
//   ee   setting,round,runs,mean_escaped_cum,mean_escaped_left,mean_escaped_bottom,mean_escaped_right
// EE runs that finished early carry their final counts forward.
inline CsvTable aggregate_runs(const std::vector<std::filesystem::path>& dirs) {
  std::vector<RunRecord> runs;
  for (const auto& d : expand_run_dirs(dirs)) runs.push_back(load_run(d));
  if (runs.empty()) throw std::runtime_error("nothing to aggregate");
  const ScenarioId scenario = runs.front().scenario;
  for (const auto& r : runs) {
    if (r.scenario != scenario) throw std::runtime_error("cannot aggregate runs of different scenarios");
  }

  CsvTable t;
  if (scenario == ScenarioId::KBC) {
    t.columns = {"setting", "k", "runs", "mean_variance", "mean_target", "mean_winners"};
    std::map<std::pair<std::string, int>, std::vector<const RunRecord*>> groups;
    for (const auto& r : runs) groups[{r.setting, r.config.at("scenario_params").value("k", 0)}].push_back(&r);
    for (const auto& [key, members] : groups) {
      std::vector<double> var, tgt, win;
      for (const auto* r : members) {
        const auto& s = r->summaries.at(key.second + 1);
        var.push_back(s.at("variance").get<double>());
        tgt.push_back(s.at("target").get<double>());
        win.push_back(s.at("winners").get<double>());
      }
      t.rows.push_back({key.first, std::to_string(key.second), std::to_string(members.size()), csv_number(mean(var)),
                        csv_number(mean(tgt)), csv_number(mean(win))});
    }
  } else if (scenario == ScenarioId::BC) {
    t.columns = {"setting", "runs", "mean_rounds", "collusion_rate", "mean_final_p1", "mean_final_p2", "mean_final_streak"};
    std::map<std::string, std::vector<const RunRecord*>> groups;
    for (const auto& r : runs) groups[r.setting].push_back(&r);
    for (const auto& [setting, members] : groups) {
      std::vector<double> rounds, colluded, p1, p2, streak;
      for (const auto* r : members) {
        const auto& last = r->summaries.rbegin()->second;
        rounds.push_back(r->rounds_executed);
        colluded.push_back(r->manifest.value("termination_reason", std::string()) == "CollusionSustained" ? 1.0 : 0.0);
        p1.push_back(last.at("p1").get<double>());
        p2.push_back(last.at("p2").get<double>());
        streak.push_back(last.at("collusion_streak").get<double>());
      }
      t.rows.push_back({setting, std::to_string(members.size()), csv_number(mean(rounds)), csv_number(mean(colluded)),
                        csv_number(mean(p1)), csv_number(mean(p2)), csv_number(mean(streak))});
    }
  } else {
    t.columns = {"setting", "round", "runs", "mean_escaped_cum", "mean_escaped_left", "mean_escaped_bottom",
                 "mean_escaped_right"};
    std::map<std::string, std::vector<const RunRecord*>> groups;
    for (const auto& r : runs) groups[r.setting].push_back(&r);
    for (const auto& [setting, members] : groups) {
      int horizon = 0;
      for (const auto* r : members) horizon = std::max(horizon, r->config.at("max_rounds").get<int>());
      for (int round = kEeAggregateStride; round <= horizon; round += kEeAggregateStride) {
        std::vector<double> cum, left, bottom, right;
        for (const auto* r : members) {
          auto it = r->summaries.upper_bound(round);
          json s = it == r->summaries.begin() ? json{{"escaped_cum", 0}, {"escaped_left", 0}, {"escaped_bottom", 0}, {"escaped_right", 0}}
                                              : std::prev(it)->second;
          cum.push_back(s.at("escaped_cum").get<double>());
          left.push_back(s.at("escaped_left").get<double>());
          bottom.push_back(s.at("escaped_bottom").get<double>());
          right.push_back(s.at("escaped_right").get<double>());
        }
        t.rows.push_back({setting, std::to_string(round), std::to_string(members.size()), csv_number(mean(cum)),
                          csv_number(mean(left)), csv_number(mean(bottom)), csv_number(mean(right))});
      }
    }
  }
  return t;
}

}  // namespace coopsim
