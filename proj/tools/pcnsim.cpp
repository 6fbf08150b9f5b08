// pcnsim command-line driver.
#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "pcnsim/experiment.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitInvalid = 2;

const char* kKeysHelp = R"(Configuration file: one `key = value` per line, '#' comments.
All keys are mandatory. Defaults listed here are suggestions only.

  seed                            master seed (1)
  output_dir                      dataset and result directory (out)
  topology.kind                   scale_free | small_world | file
  topology.nodes                  node count (10000)
  topology.attachment             scale-free edges per new node (2)
  topology.ring_neighbors         small-world k, even (20)
  topology.shortcut_probability   small-world p (0.01)
  topology.file                   edge list for kind=file, else none
  workload.transactions           transaction count (100000)
  workload.v_fix                  value anchor (1)
  workload.value_distribution     constant|pareto|exponential|normal|poisson (pareto)
  workload.value_shape            Pareto shape (1.16)
  workload.value_stddev           normal stddev (1)
  workload.pair_distribution      index distribution for senders/recipients (poisson)
  workload.pair_mean              index distribution anchor (nodes/10)
  workload.pair_shape             (1)
  workload.pair_stddev            (1)
  balances.tc                     share of transactions funding channels (1)
  balances.multiplier             balance scaling factor (0.5)
  balances.multiplier_probability per-channel scaling probability (0.5)
  balances.floor                  minimum directional balance (0)
  router                          speedymurmurs | fordfulkerson
  trees.count                     spanning trees (3)
  trees.roots                     degree | random
  attack.action                   none | drop | delay
  attack.selection                random | tree | centrality | ideal
  attack.fraction                 share of corrupted nodes
  attack.delay_ms                 griefing delay (10000)
  attack.grief_probability        per-hop griefing probability (1)
  attack.ideal_metric             value | count
  engine.hop_delay_ms             per-hop network delay (30)
  engine.max_concurrent           worker slots (4096)
  engine.arrival_interval_ms      inter-arrival time (5)
  engine.timeout_ms               commitment timeout, 0 = off (0)
  engine.window                   smoothing window in epochs (1500)
  engine.channel_slots            concurrent payments per channel, 0 = unlimited (32)
  engine.max_replans              Ford-Fulkerson re-plans after lock conflicts (16)
  sweep.fractions                 comma-separated attacker fractions
  cost.f_open                     channel opening fee (10)
  cost.f_close                    channel closing fee (10)
  cost.cap                        funded capacity per channel (717)
  cost.strategy                   centrality | tree
  cost.expected_attempts          E(X) for the tree strategy (0)
  cost.channels                   channel count, or measure
  output.paths                    write paths.csv (true)
)";

pcnsim::ExperimentSpec load(const std::string& path, const std::vector<std::string>& overrides) {
  return pcnsim::load_spec(path, overrides);
}

void report(const std::vector<std::filesystem::path>& files) {
  for (const auto& f : files) std::cout << f.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Payment channel network attack simulator"};
  app.footer(kKeysHelp);
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("config", config_path, "experiment configuration file")->required();
    cmd->add_option("-s,--set", overrides, "override a configuration key (key=value)");
  };

  auto* generate = app.add_subcommand("generate", "build topology, workload and balances");
  add_common(generate);
  auto* run = app.add_subcommand("run", "simulate one experiment on a generated dataset");
  add_common(run);
  auto* sweep = app.add_subcommand("sweep", "simulate every fraction in sweep.fractions");
  add_common(sweep);
  auto* cost = app.add_subcommand("cost", "attack cost report");
  add_common(cost);
  auto* profile = app.add_subcommand("profile", "attack-free run writing the relay profile");
  add_common(profile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    const auto spec = load(config_path, overrides);
    if (generate->parsed()) {
      report(pcnsim::write_dataset(spec, pcnsim::build_dataset(spec)));
    } else if (run->parsed()) {
      const auto ds = pcnsim::load_dataset(spec);
      const auto out = pcnsim::run_spec(spec, ds);
      report(pcnsim::write_run(spec, out));
      std::cerr << "final smoothed ratio " << (out.result.smoothed.empty() ? 0.0 : out.result.smoothed.back())
                << ", failures " << out.result.failures() << "/" << out.result.records.size() << '\n';
    } else if (sweep->parsed()) {
      const auto ds = pcnsim::load_dataset(spec);
      std::vector<std::filesystem::path> files;
      for (const auto& row : pcnsim::run_sweep(spec, ds, &files))
        std::cerr << "fraction " << row.fraction << ": final ratio " << row.final_ratio << '\n';
      report(files);
    } else if (cost->parsed()) {
      std::optional<pcnsim::Dataset> ds;
      if (!spec.cost.channels) ds = pcnsim::load_dataset(spec);
      const auto r = pcnsim::run_cost(spec, ds ? &*ds : nullptr);
      pcnsim::write_cost_csv(std::cout, r);
      std::cerr << pcnsim::write_cost(spec, r).string() << '\n';
    } else if (profile->parsed()) {
      auto s = spec;
      s.attack.action.reset();
      const auto ds = pcnsim::load_dataset(s);
      const auto out = pcnsim::run_spec(s, ds);
      report(pcnsim::write_run(s, out, "_profile"));
    }
  } catch (const pcnsim::InvalidParameters& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}
