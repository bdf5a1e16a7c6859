#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "satfed/harness.hpp"
#include "satfed/parallel.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 2;
constexpr int kExitRuntimeError = 3;

struct CommonFlags {
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool quiet = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--out", flags.out_dir, "Output directory");
  cmd->add_option("--seed", flags.seed, "Random seed")->each([&](const std::string&) {
    flags.seed_set = true;
  });
  cmd->add_flag("--quiet", flags.quiet, "Suppress progress output");
}

void apply_common(satfed::harness::ScenarioConfig& cfg, const CommonFlags& flags) {
  if (!flags.out_dir.empty()) cfg.output_dir = flags.out_dir;
  if (flags.seed_set) cfg.seed = flags.seed;
}

int run(const satfed::harness::ScenarioConfig& cfg, bool quiet) {
  const auto report = satfed::harness::run_scenario(cfg, quiet);
  if (!quiet) {
    std::cout << report.files.size() << " files in " << report.output_dir;
    if (report.warnings > 0) std::cout << " (" << report.warnings << " warnings)";
    std::cout << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LEO constellation latency and federated-training simulator"};
  app.require_subcommand(1);

  int threads = 0;
  bool serial = false;
  app.add_option("--threads", threads, "OpenMP thread count (0 = library default)");
  app.add_flag("--serial", serial, "Force the serial reference path");

  CommonFlags lt_flags;
  std::vector<int> lt_ns;
  double lt_alpha_low = -1.0, lt_alpha_high = -1.0;
  auto* lt = app.add_subcommand("latency-table", "Emit the inference-latency table");
  add_common(lt, lt_flags);
  lt->add_option("--ns", lt_ns, "Satellite counts to evaluate");
  lt->add_option("--alpha-low", lt_alpha_low, "Lower parallelism bound");
  lt->add_option("--alpha-high", lt_alpha_high, "Upper parallelism bound");

  CommonFlags tr_flags;
  std::vector<int> tr_clients;
  int tr_rounds = -1;
  double tr_target = -1.0;
  auto* tr = app.add_subcommand("train", "Run the training-curve comparison");
  add_common(tr, tr_flags);
  tr->add_option("--clients", tr_clients, "Federated client counts to sweep");
  tr->add_option("--rounds", tr_rounds, "Training rounds");
  tr->add_option("--target", tr_target, "Target accuracy for time-to-accuracy");

  CommonFlags rs_flags;
  double rs_step = -1.0;
  auto* rs = app.add_subcommand("rtt-scan", "Scan satellite-to-station round trips");
  add_common(rs, rs_flags);
  rs->add_option("--step", rs_step, "Time step in seconds");

  CommonFlags sim_flags;
  std::string config_path;
  auto* sim = app.add_subcommand("simulate", "Run the experiment named in a config file");
  add_common(sim, sim_flags);
  sim->add_option("--config", config_path, "Scenario config (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfigError;
  }

  if (serial) satfed::par::default_mode() = satfed::par::Mode::Serial;
  satfed::par::set_threads(threads);

  try {
    satfed::harness::ScenarioConfig cfg;
    bool quiet = false;

    if (lt->parsed()) {
      cfg.experiment = satfed::harness::ExperimentKind::LatencyTable;
      if (!lt_ns.empty()) cfg.ns = lt_ns;
      if (lt_alpha_low > 0.0) cfg.alpha_low = lt_alpha_low;
      if (lt_alpha_high > 0.0) cfg.alpha_high = lt_alpha_high;
      apply_common(cfg, lt_flags);
      quiet = lt_flags.quiet;
    } else if (tr->parsed()) {
      cfg.experiment = satfed::harness::ExperimentKind::TrainingCurve;
      if (!tr_clients.empty()) cfg.train.n_clients = tr_clients;
      if (tr_rounds >= 0) cfg.train.rounds = tr_rounds;
      if (tr_target > 0.0) cfg.train.target_accuracy = tr_target;
      apply_common(cfg, tr_flags);
      quiet = tr_flags.quiet;
    } else if (rs->parsed()) {
      cfg.experiment = satfed::harness::ExperimentKind::RttScan;
      if (rs_step > 0.0) cfg.rtt_step_s = rs_step;
      apply_common(cfg, rs_flags);
      quiet = rs_flags.quiet;
    } else {
      cfg = satfed::harness::load_config(config_path);
      apply_common(cfg, sim_flags);
      quiet = sim_flags.quiet;
    }

    return run(cfg, quiet);
  } catch (const satfed::harness::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntimeError;
  }
}
