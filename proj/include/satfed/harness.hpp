#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "satfed/archmodel.hpp"
#include "satfed/fedsim.hpp"
#include "satfed/orbits.hpp"
#include "satfed/parallel.hpp"

namespace satfed::harness {

inline constexpr const char* kToolVersion = "0.1.0";

// Config/schema problems map to CLI exit code 2; everything else is a
// runtime failure (exit code 3).
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ExperimentKind { LatencyTable, TrainingCurve, RttScan };

std::string to_string(ExperimentKind kind);
std::optional<ExperimentKind> experiment_from_string(const std::string& s);

// The "train" section of the scenario file, with the desk-scale defaults.
struct TrainSection {
  std::vector<int> n_clients = {1, 10, 50};
  int rounds = 50;
  int local_epochs = 1;
  int batch_size = 32;
  double learning_rate = 0.1;
  std::optional<std::uint64_t> seed;  // defaults to the scenario seed
  double compute_ms_per_batch = 5.0;
  double ground_compute_speedup = 16.0;
  double holdout_fraction = 0.2;
  int hidden_units = 0;
  int samples = 2000;
  int dim = 2;
  int classes = 2;
  double target_accuracy = 0.85;
};

// Built-in mid-latitude trio used whenever a scenario names no stations.
std::vector<orbits::GroundStation> default_stations();

struct ScenarioConfig {
  ExperimentKind experiment = ExperimentKind::LatencyTable;
  orbits::ShellConfig shell;
  std::vector<orbits::GroundStation> stations = default_stations();
  arch::ArchitectureKind architecture = arch::ArchitectureKind::Federated;
  arch::InferenceParams inference;
  double alpha_low = 0.1;
  double alpha_high = 0.7;
  std::vector<int> ns = {1, 10, 100};
  TrainSection train;
  arch::CommSizes comm_sizes;
  double bandwidth_bps = 100e6;
  double rtt_step_s = 60.0;
  bool export_snapshot = false;
  std::string output_dir = "out";
  std::uint64_t seed = 0;
};

// Strict parse: unknown keys and out-of-range values are rejected with a
// diagnostic naming the offending key; absent optional keys take the
// documented defaults.
ScenarioConfig parse_config(const std::string& json_text);
ScenarioConfig load_config(const std::string& path);

// Normalized JSON with every key materialized; parse_config(save_config(c))
// reproduces c exactly.
std::string save_config(const ScenarioConfig& cfg);

// The scenario echo embedded in summaries. Excludes output_dir so reruns
// into different directories stay byte-identical.
std::string scenario_json(const ScenarioConfig& cfg);

struct Report {
  std::string tool_version = kToolVersion;
  std::string scenario;  // normalized echo, no output_dir
  std::string output_dir;
  std::vector<std::string> files;  // relative to output_dir, summary.json last
  std::string stats_json;
  int warnings = 0;
};

// Runs the configured experiment, writes its CSV/SVG/JSON outputs
// atomically, and removes partial outputs on failure.
Report run_scenario(const ScenarioConfig& cfg, bool quiet = true,
                    par::Mode mode = par::default_mode());

struct RttRow {
  double t_s = 0.0;
  int satellite = 0;
  std::string station;
  double rtt_ms = 0.0;
};

// One row per (time step, satellite) over one orbital period: round trip to
// the nearest station. Satellites with no reachable station are omitted and
// counted as warnings.
std::vector<RttRow> rtt_scan(const ScenarioConfig& cfg, int* warnings = nullptr,
                             par::Mode mode = par::default_mode());

// columns: t_s,satellite,station,rtt_ms
std::string rtt_csv(const std::vector<RttRow>& rows);

// Accuracy-vs-elapsed line chart, one polyline per trace, no plotting
// dependency. Byte-deterministic for identical inputs.
std::string svg_curve(const std::vector<std::pair<std::string, fed::TrainingTrace>>& traces);

// Reads trace CSVs (labels come from the file stems) and writes the chart.
void emit_svg_curve(const std::vector<std::string>& trace_csv_paths,
                    const std::string& out_path);

}  // namespace satfed::harness
