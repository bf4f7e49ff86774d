// Command-line front end: run, grid, oracle, bounds-check, summarize.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "elecdyn/bounds.hpp"
#include "elecdyn/config.hpp"
#include "elecdyn/grid.hpp"
#include "elecdyn/oracle_study.hpp"
#include "elecdyn/summarize.hpp"

namespace fs = std::filesystem;
using namespace elecdyn;

namespace {

struct Common {
  std::optional<std::uint64_t> seed;
  int workers = 1;
  std::string out_dir = "out";
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seed, "Base seed (overrides the file)");
  cmd->add_option("--workers", c.workers, "Worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--out-dir", c.out_dir, "Output directory");
}

int cmd_run(const std::string& path, const Common& c) {
  RunConfig cfg = read_run_config(path);
  if (c.seed) cfg.seed = *c.seed;
  CellResult r;
  r.cell.config = cfg;
  try {
    r.trajectory = run_simulation(cfg);
    r.ok = true;
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  write_grid_outputs(c.out_dir, {r});
  std::ofstream(fs::path(c.out_dir) / "config.resolved") << to_config_text(cfg);
  if (!r.ok) {
    std::cerr << "run failed: " << r.error << "\n";
    return 1;
  }
  const auto& last = r.trajectory.records.back();
  std::printf("%s: %zu rounds, final R %.4f S %.4f D %.6f P %.6f\n",
              r.trajectory.selector.c_str(), r.trajectory.records.size() - 1, last.R,
              last.S, last.D, last.P);
  return 0;
}

int cmd_grid(const std::string& path, const Common& c) {
  GridSpec g = path.empty() ? GridSpec::full() : grid_from_key_values(read_key_values(path));
  if (c.seed) g.seed = *c.seed;
  const auto results = run_grid(g, c.workers);
  write_grid_outputs(c.out_dir, results);
  int failed = 0;
  for (const auto& r : results) {
    if (!r.ok) {
      ++failed;
      std::cerr << "cell " << r.cell.index << ": " << r.error << "\n";
    }
  }
  std::printf("%zu cells, %d failed -> %s\n", results.size(), failed, c.out_dir.c_str());
  return failed == 0 ? 0 : 1;
}

int cmd_oracle(int replicates, Eigen::Index n, int rounds, const Common& c) {
  RunConfig env = oracle_environment();
  if (c.seed) env.seed = *c.seed;
  const auto cmp = run_oracle_comparison(replicates, n, rounds, env, c.workers);
  fs::create_directories(c.out_dir);
  std::ofstream out(fs::path(c.out_dir) / "oracle.csv");
  write_oracle_csv(out, cmp);
  std::printf("%d replicates x %d rounds -> %s\n", replicates, rounds,
              (fs::path(c.out_dir) / "oracle.csv").c_str());
  return 0;
}

int cmd_bounds(const std::string& path, bool zero_noise, const Common& c) {
  RunConfig cfg = read_run_config(path);
  if (c.seed) cfg.seed = *c.seed;
  if (zero_noise) {
    cfg.dynamics.sigma_eps = 0.0;
    cfg.dynamics.sigma_delta = 0.0;
  }
  const Trajectory traj = run_simulation(cfg);
  nlohmann::json out = {{"selector", traj.selector}, {"checks", nlohmann::json::array()}};
  bool ok = true;

  auto record = [&](const ContractionReport& rep) {
    out["checks"].push_back(to_json(rep));
    ok = ok && rep.all_satisfied;
    std::printf("%-20s %-16s %s (max violation %.3g)\n", rep.kind.c_str(),
                rep.selector.c_str(), rep.all_satisfied ? "ok" : "VIOLATED",
                rep.max_violation);
  };
  auto skip = [&](const std::string& kind, const std::string& why) {
    out["checks"].push_back({{"kind", kind}, {"skipped", why}});
    std::printf("%-20s skipped: %s\n", kind.c_str(), why.c_str());
  };

  if (cfg.dynamics.sigma_eps == 0.0) {
    record(check_voter_bound(traj));
  } else {
    skip("voter", "sigma_eps > 0 (use --zero-noise)");
  }
  if (!traj.soft_assignment) {
    skip("candidate", "hard assignment");
  } else if (cfg.dynamics.mu != 0.0) {
    skip("candidate", "mu > 0");
  } else if (cfg.dynamics.sigma_delta != 0.0) {
    skip("candidate", "sigma_delta > 0 (use --zero-noise)");
  } else {
    record(check_candidate_bound(traj, cfg.dynamics.nu != 0.0));
  }

  fs::create_directories(c.out_dir);
  std::ofstream(fs::path(c.out_dir) / "bounds.json") << out.dump(2) << "\n";
  return ok ? 0 : 1;
}

int cmd_summarize(const std::string& in, const std::string& mode, const Common& c) {
  const auto rows = read_rounds_csv(in);
  const auto path = summarize(rows, parse_summary_mode(mode), c.out_dir);
  std::printf("%s\n", path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Repeated-election polarization dynamics"};
  app.require_subcommand(1);

  Common common;
  std::string config_path, grid_path, rounds_path, mode = "delta";
  int replicates = 24, oracle_rounds = 16;
  Eigen::Index oracle_n = 1400;
  bool zero_noise = false;

  auto* run = app.add_subcommand("run", "Simulate one configuration");
  run->add_option("config", config_path, "Run configuration file")->required();
  add_common(run, common);

  auto* grid = app.add_subcommand("grid", "Run a factorial grid (default: full grid)");
  grid->add_option("spec", grid_path, "Grid specification file");
  add_common(grid, common);

  auto* oracle = app.add_subcommand("oracle", "Compare the two winner oracles");
  oracle->add_option("--replicates", replicates)->check(CLI::PositiveNumber);
  oracle->add_option("--n", oracle_n)->check(CLI::PositiveNumber);
  oracle->add_option("--rounds", oracle_rounds)->check(CLI::PositiveNumber);
  add_common(oracle, common);

  auto* bounds = app.add_subcommand("bounds-check", "Check contraction bounds along a run");
  bounds->add_option("config", config_path, "Run configuration file")->required();
  bounds->add_flag("--zero-noise", zero_noise, "Force sigma_eps = sigma_delta = 0");
  add_common(bounds, common);

  auto* summ = app.add_subcommand("summarize", "Aggregate a rounds.csv");
  summ->add_option("rounds", rounds_path, "rounds.csv from a grid run")->required();
  summ->add_option("--mode", mode, "delta | mechanism | balance | tradeoff");
  add_common(summ, common);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(config_path, common);
    if (*grid) return cmd_grid(grid_path, common);
    if (*oracle) return cmd_oracle(replicates, oracle_n, oracle_rounds, common);
    if (*bounds) return cmd_bounds(config_path, zero_noise, common);
    if (*summ) return cmd_summarize(rounds_path, mode, common);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
