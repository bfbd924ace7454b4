// Command-line runner: run, replay, solve-refs, aggregate, export.
// Exit codes: 0 success, 1 usage or configuration error, 2 runtime failure.

#include <atomic>
#include <cstdio>
#include <iostream>
#include <mutex>
#include <thread>

#include "CLI11.hpp"
#include "coopsim/metrics/runner.hpp"

namespace fs = std::filesystem;
using namespace coopsim;

namespace {

constexpr int kUsage = 1;
constexpr int kRuntime = 2;

std::string metric_line(const RunOutcome& o) {
  std::string s = o.run_id + ": rounds=" + std::to_string(o.result.rounds_executed) +
                  " reason=" + to_string(o.result.termination_reason);
  for (const auto& [k, v] : o.result.final_metrics) s += " " + k + "=" + json(v).dump();
  return s;
}

int cmd_run(const std::string& config_path, std::optional<int> runs_flag, std::optional<std::uint64_t> seed_flag,
            const std::string& backend_flag, const fs::path& out, int parallel) {
  BatchConfig batch = load_batch_config(config_path);
  if (!backend_flag.empty()) {
    const Backend b = parse_backend(backend_flag);
    if (b == Backend::Replay) throw ConfigError("use the replay command to replay runs");
    for (auto& a : batch.base.roster) a.backend = b;
  }
  if (seed_flag) batch.base.seed = *seed_flag;
  const int runs = runs_flag.value_or(batch.runs);
  if (runs < 1) throw ConfigError("--runs must be >= 1");

  RunOptions opt;
  if (needs_api_key(batch.base)) {
    const char* key = std::getenv("LLM_API_KEY");
    if (key == nullptr || *key == '\0') throw ConfigError("LLM_API_KEY is not set; the llm backend needs it");
    opt.api_key = key;
    parallel = 1;  // rate limits
  }

  std::vector<RunConfig> configs;
  for (int i = 0; i < runs; ++i) {
    RunConfig c = batch.base;
    c.seed = batch.base.seed + static_cast<std::uint64_t>(i);
    configs.push_back(std::move(c));
  }

  std::mutex io;
  std::atomic<std::size_t> next{0};
  std::atomic<int> failures{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      const RunConfig& c = configs[i];
      const fs::path dir = out / default_run_id(c);
      try {
        const auto outcome = execute_run(c, dir, opt);
        std::lock_guard<std::mutex> lock(io);
        std::cout << metric_line(outcome) << "\n";
      } catch (const std::exception& e) {
        ++failures;
        std::lock_guard<std::mutex> lock(io);
        std::cerr << "run " << default_run_id(c) << " failed: " << e.what() << "\n";
      }
    }
  };
  const int threads = std::max(1, std::min<int>(parallel, static_cast<int>(configs.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return failures == 0 ? 0 : kRuntime;
}

int cmd_solve_refs(const std::string& config_path) {
  const BatchConfig batch = load_batch_config(config_path);
  if (batch.base.scenario != ScenarioId::BC) throw ConfigError("solve-refs needs a bc config");
  const auto cfg = bc::bc_config_from(batch.base);
  const auto refs = bc::solve_references(cfg.econ);
  std::printf("p_bertrand=%.6f\np_cartel=%.6f\n", refs.p_bertrand, refs.p_cartel);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coopsim: round-based multi-agent simulation runner"};
  app.require_subcommand(1, 1);

  std::string config_path;
  std::optional<int> runs;
  std::optional<std::uint64_t> seed;
  std::string backend;
  std::string out = "runs";
  int parallel = 1;
  auto* run = app.add_subcommand("run", "Execute N seeded runs of a config");
  run->add_option("--config", config_path, "Config file (JSON)")->required();
  run->add_option("--runs", runs, "Number of runs; seeds S..S+N-1 (default: config 'runs')");
  run->add_option("--seed", seed, "First seed (default: config 'seed')");
  run->add_option("--backend", backend, "Override every agent's backend")->check(CLI::IsMember({"llm", "scripted", "mock"}));
  run->add_option("--out", out, "Output directory for run directories");
  run->add_option("--parallel", parallel, "Concurrent runs (scripted/mock only)")->check(CLI::PositiveNumber);

  std::string replay_dir;
  std::string replay_out;
  auto* rep = app.add_subcommand("replay", "Re-execute a run from its transcripts");
  rep->add_option("dir", replay_dir, "Run directory")->required();
  rep->add_option("--out", replay_out, "Output run directory (default: <dir>_replay)");

  std::string refs_config;
  auto* refs = app.add_subcommand("solve-refs", "Print the Bertrand and cartel reference prices");
  refs->add_option("--config", refs_config, "bc config file")->required();

  std::vector<std::string> agg_dirs;
  std::string agg_out;
  auto* agg = app.add_subcommand("aggregate", "Per-setting means across runs");
  agg->add_option("dirs", agg_dirs, "Run or batch directories")->required();
  agg->add_option("--out", agg_out, "Write the table here instead of stdout");

  std::string export_dir;
  auto* exp = app.add_subcommand("export", "Write metrics.csv for a run");
  exp->add_option("dir", export_dir, "Run directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*run) return cmd_run(config_path, runs, seed, backend, out, parallel);
    if (*refs) return cmd_solve_refs(refs_config);
    if (*rep) {
      const fs::path dst = replay_out.empty() ? fs::path(replay_dir + "_replay") : fs::path(replay_out);
      const auto outcome = replay(replay_dir, dst);
      std::cout << metric_line(outcome) << "\n" << "replayed into " << dst.string() << "\n";
      return 0;
    }
    if (*agg) {
      std::vector<fs::path> dirs(agg_dirs.begin(), agg_dirs.end());
      const auto table = aggregate_runs(dirs);
      if (agg_out.empty()) {
        std::cout << to_csv(table);
      } else {
        write_csv(agg_out, table);
      }
      return 0;
    }
    if (*exp) {
      if (!fs::is_directory(export_dir)) throw ConfigError("not a run directory: " + export_dir);
      std::cout << export_csv(export_dir).string() << "\n";
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
  return kUsage;
}
