#include "satfed/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "satfed/rng.hpp"
#include "satfed/topology.hpp"

namespace satfed::harness {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr std::uint64_t kDataStream = 101;

[[noreturn]] void fail(const std::string& msg) { throw config_error(msg); }

void reject_unknown(const ordered_json& obj, const std::string& section,
                    std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find_if(allowed.begin(), allowed.end(),
                     [&](const char* k) { return it.key() == k; }) == allowed.end()) {
      fail("unknown key \"" + it.key() + "\" in " + section);
    }
  }
}

const ordered_json* find(const ordered_json& obj, const char* key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double get_number(const ordered_json& obj, const char* key, double fallback,
                  const std::string& section) {
  const ordered_json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_number()) fail("key \"" + std::string(key) + "\" in " + section + " must be a number");
  return v->get<double>();
}

int get_int(const ordered_json& obj, const char* key, int fallback, const std::string& section) {
  const ordered_json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_number_integer()) {
    fail("key \"" + std::string(key) + "\" in " + section + " must be an integer");
  }
  return v->get<int>();
}

std::uint64_t get_u64(const ordered_json& obj, const char* key, std::uint64_t fallback,
                      const std::string& section) {
  const ordered_json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_number_unsigned() && !v->is_number_integer()) {
    fail("key \"" + std::string(key) + "\" in " + section + " must be a nonnegative integer");
  }
  if (v->is_number_integer() && v->get<long long>() < 0) {
    fail("key \"" + std::string(key) + "\" in " + section + " must be a nonnegative integer");
  }
  return v->get<std::uint64_t>();
}

bool get_bool(const ordered_json& obj, const char* key, bool fallback,
              const std::string& section) {
  const ordered_json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_boolean()) fail("key \"" + std::string(key) + "\" in " + section + " must be a boolean");
  return v->get<bool>();
}

std::string get_string(const ordered_json& obj, const char* key, const std::string& fallback,
                       const std::string& section) {
  const ordered_json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_string()) fail("key \"" + std::string(key) + "\" in " + section + " must be a string");
  return v->get<std::string>();
}

std::vector<int> get_int_list(const ordered_json& obj, const char* key,
                              std::vector<int> fallback, const std::string& section) {
  const ordered_json* v = find(obj, key);
  if (!v) return fallback;
  std::vector<int> out;
  if (v->is_number_integer()) {
    out.push_back(v->get<int>());  // scalar shorthand
    return out;
  }
  if (!v->is_array()) {
    fail("key \"" + std::string(key) + "\" in " + section + " must be an integer or array");
  }
  for (const auto& e : *v) {
    if (!e.is_number_integer()) {
      fail("key \"" + std::string(key) + "\" in " + section + " must contain only integers");
    }
    out.push_back(e.get<int>());
  }
  return out;
}

void validate_config(const ScenarioConfig& cfg) {
  if (!(cfg.alpha_low > 0.0 && cfg.alpha_low <= cfg.alpha_high && cfg.alpha_high <= 1.0)) {
    fail("keys \"alpha_low\"/\"alpha_high\" must satisfy 0 < alpha_low <= alpha_high <= 1");
  }

  try {
    cfg.shell.validate();
    for (const auto& gs : cfg.stations) gs.validate();
    cfg.inference.validate();
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
  if (cfg.ns.empty()) fail("key \"ns\" must contain at least one satellite count");
  for (int n : cfg.ns) {
    if (n < 1) fail("key \"ns\" must contain only counts >= 1");
  }
  if (cfg.bandwidth_bps <= 0.0) fail("key \"bandwidth_bps\" must be positive");
  if (cfg.rtt_step_s <= 0.0) fail("key \"rtt_step_s\" must be positive");

  const TrainSection& t = cfg.train;
  if (t.n_clients.empty()) fail("key \"n_clients\" in train must contain at least one count");
  for (int n : t.n_clients) {
    if (n < 1) fail("key \"n_clients\" in train must contain only counts >= 1");
  }
  if (t.rounds < 0) fail("key \"rounds\" in train must be >= 0");
  if (t.local_epochs < 1) fail("key \"local_epochs\" in train must be >= 1");
  if (t.batch_size < 1) fail("key \"batch_size\" in train must be >= 1");
  if (t.learning_rate <= 0.0) fail("key \"learning_rate\" in train must be positive");
  if (t.compute_ms_per_batch < 0.0) fail("key \"compute_ms_per_batch\" in train must be >= 0");
  if (t.ground_compute_speedup <= 0.0) {
    fail("key \"ground_compute_speedup\" in train must be positive");
  }
  if (t.holdout_fraction < 0.0 || t.holdout_fraction >= 1.0) {
    fail("key \"holdout_fraction\" in train must lie in [0, 1)");
  }
  if (t.hidden_units < 0) fail("key \"hidden_units\" in train must be >= 0");
  if (t.samples < 2) fail("key \"samples\" in train must be >= 2");
  if (t.dim < 1) fail("key \"dim\" in train must be >= 1");
  if (t.classes < 1) fail("key \"classes\" in train must be >= 1");
  if (t.target_accuracy <= 0.0 || t.target_accuracy > 1.0) {
    fail("key \"target_accuracy\" in train must lie in (0, 1]");
  }

  const bool needs_station = cfg.experiment == ExperimentKind::TrainingCurve ||
                             cfg.experiment == ExperimentKind::RttScan;
  if (needs_station && cfg.stations.empty()) {
    fail("key \"stations\" must contain at least one station for this experiment");
  }
}

void write_file_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

ordered_json scenario_to_json(const ScenarioConfig& cfg, bool include_output_dir) {
  ordered_json j;
  j["experiment"] = to_string(cfg.experiment);
  j["shell"] = {{"altitude_km", cfg.shell.altitude_km},
                {"inclination_deg", cfg.shell.inclination_deg},
                {"num_planes", cfg.shell.num_planes},
                {"sats_per_plane", cfg.shell.sats_per_plane},
                {"phasing_factor", cfg.shell.phasing_factor}};
  j["stations"] = ordered_json::array();
  for (const auto& gs : cfg.stations) {
    j["stations"].push_back({{"name", gs.name},
                             {"latitude_deg", gs.latitude_deg},
                             {"longitude_deg", gs.longitude_deg},
                             {"min_elevation_deg", gs.min_elevation_deg}});
  }
  j["architecture"] = arch::to_string(cfg.architecture);
  j["inference"] = {{"rtt_ms", cfg.inference.rtt_ms},
                    {"gs_inference_latency_ms", cfg.inference.gs_inference_latency_ms},
                    {"onboard_inference_latency_ms", cfg.inference.onboard_inference_latency_ms},
                    {"alpha_low", cfg.alpha_low},
                    {"alpha_high", cfg.alpha_high},
                    {"batch_per_satellite", cfg.inference.batch_per_satellite}};
  j["ns"] = cfg.ns;
  j["train"] = {{"n_clients", cfg.train.n_clients},
                {"rounds", cfg.train.rounds},
                {"local_epochs", cfg.train.local_epochs},
                {"batch_size", cfg.train.batch_size},
                {"learning_rate", cfg.train.learning_rate},
                {"seed", cfg.train.seed.value_or(cfg.seed)},
                {"compute_ms_per_batch", cfg.train.compute_ms_per_batch},
                {"ground_compute_speedup", cfg.train.ground_compute_speedup},
                {"holdout_fraction", cfg.train.holdout_fraction},
                {"hidden_units", cfg.train.hidden_units},
                {"samples", cfg.train.samples},
                {"dim", cfg.train.dim},
                {"classes", cfg.train.classes},
                {"target_accuracy", cfg.train.target_accuracy}};
  j["comm_sizes"] = {{"telemetry_bytes", cfg.comm_sizes.telemetry_bytes},
                     {"model_bytes", cfg.comm_sizes.model_bytes},
                     {"gradient_bytes", cfg.comm_sizes.gradient_bytes}};
  j["bandwidth_bps"] = cfg.bandwidth_bps;
  j["rtt_step_s"] = cfg.rtt_step_s;
  j["export_snapshot"] = cfg.export_snapshot;
  j["seed"] = cfg.seed;
  if (include_output_dir) j["output_dir"] = cfg.output_dir;
  return j;
}

struct ExperimentOutput {
  std::vector<std::pair<std::string, std::string>> files;  // name -> content
  ordered_json stats;
  int warnings = 0;
};

ExperimentOutput run_latency_table(const ScenarioConfig& cfg) {
  ExperimentOutput out;
  const auto rows = arch::latency_table(cfg.inference, cfg.ns, cfg.alpha_low, cfg.alpha_high);
  out.files.emplace_back("latency_table.csv", arch::latency_table_csv(rows));

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double sum = 0.0;
  for (const auto& r : rows) {
    lo = std::min({lo, r.latency_low_ms, r.latency_high_ms});
    hi = std::max({hi, r.latency_low_ms, r.latency_high_ms});
    sum += r.latency_low_ms + r.latency_high_ms;
  }
  out.stats = {{"metric", "latency_ms"},
               {"rows", rows.size()},
               {"min", lo},
               {"max", hi},
               {"mean", sum / (2.0 * static_cast<double>(rows.size()))}};
  return out;
}

ExperimentOutput run_training_curve(const ScenarioConfig& cfg, bool quiet, par::Mode mode) {
  ExperimentOutput out;
  const orbits::EarthModel earth;
  const std::uint64_t scenario_seed = cfg.train.seed.value_or(cfg.seed);

  const fed::Dataset ds = fed::make_synthetic(cfg.train.samples, cfg.train.dim,
                                              cfg.train.classes,
                                              rng::derive(scenario_seed, kDataStream));

  fed::TrainConfig base;
  base.rounds = cfg.train.rounds;
  base.local_epochs = cfg.train.local_epochs;
  base.batch_size = cfg.train.batch_size;
  base.learning_rate = cfg.train.learning_rate;
  base.seed = scenario_seed;
  base.compute_ms_per_batch = cfg.train.compute_ms_per_batch;
  base.ground_compute_speedup = cfg.train.ground_compute_speedup;
  base.holdout_fraction = cfg.train.holdout_fraction;
  base.hidden_units = cfg.train.hidden_units;
  base.comm.graph = topo::build_snapshot(cfg.shell, cfg.stations, 0.0, earth, true, mode);
  base.comm.gs_node = topo::NodeId{topo::NodeKind::Ground, 0};
  base.comm.sizes = cfg.comm_sizes;
  base.comm.bandwidth_bps = cfg.bandwidth_bps;

  // The centralized baseline counts the largest swept client count as its
  // telemetry sources, so the exposure columns compare like with like.
  const int n_max = *std::max_element(cfg.train.n_clients.begin(), cfg.train.n_clients.end());

  std::vector<std::pair<std::string, fed::TrainingTrace>> traces;
  fed::TrainConfig cent = base;
  cent.arch = arch::ArchitectureKind::Centralized;
  cent.n_clients = n_max;
  if (!quiet) std::cout << "training: centralized baseline\n";
  traces.emplace_back("trace_centralized", fed::run_centralized(ds, cent, mode));

  for (int n : cfg.train.n_clients) {
    fed::TrainConfig fcfg = base;
    fcfg.arch = arch::ArchitectureKind::Federated;
    fcfg.n_clients = n;
    if (!quiet) std::cout << "training: federated n_clients=" << n << "\n";
    traces.emplace_back("trace_federated_n" + std::to_string(n), fed::run_federated(ds, fcfg, mode));
  }

  ordered_json tta_ms = ordered_json::object();
  ordered_json tta_ratio = ordered_json::object();
  ordered_json final_acc = ordered_json::object();
  ordered_json exposure = ordered_json::object();
  const auto tta_cent = fed::time_to_accuracy(traces.front().second, cfg.train.target_accuracy);

  double acc_lo = 1.0, acc_hi = 0.0, acc_sum = 0.0;
  std::size_t acc_count = 0;
  for (const auto& [label, trace] : traces) {
    out.files.emplace_back(label + ".csv", fed::trace_csv(trace));
    for (const auto& r : trace.records) {
      acc_lo = std::min(acc_lo, r.accuracy);
      acc_hi = std::max(acc_hi, r.accuracy);
      acc_sum += r.accuracy;
      ++acc_count;
    }
    const auto tta = fed::time_to_accuracy(trace, cfg.train.target_accuracy);
    tta_ms[label] = tta.reached ? ordered_json(tta.elapsed_ms) : ordered_json(nullptr);
    if (&trace != &traces.front().second && tta.reached && tta_cent.reached &&
        tta_cent.elapsed_ms > 0.0) {
      tta_ratio[label] = tta.elapsed_ms / tta_cent.elapsed_ms;
    }
    final_acc[label] = trace.records.back().accuracy;
    exposure[label] = trace.records.back().exposure_bytes;
  }

  out.files.emplace_back("training_curves.svg", svg_curve(traces));

  out.stats = {{"metric", "accuracy"},
               {"min", acc_lo},
               {"max", acc_hi},
               {"mean", acc_sum / static_cast<double>(acc_count)},
               {"target_accuracy", cfg.train.target_accuracy},
               {"time_to_accuracy_ms", tta_ms},
               {"tta_ratio_vs_centralized", tta_ratio},
               {"final_accuracy", final_acc},
               {"telemetry_exposure_bytes", exposure}};
  return out;
}

ExperimentOutput run_rtt_scan(const ScenarioConfig& cfg, par::Mode mode) {
  ExperimentOutput out;
  const auto rows = rtt_scan(cfg, &out.warnings, mode);
  out.files.emplace_back("rtt_scan.csv", rtt_csv(rows));

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double sum = 0.0;
  for (const auto& r : rows) {
    lo = std::min(lo, r.rtt_ms);
    hi = std::max(hi, r.rtt_ms);
    sum += r.rtt_ms;
  }
  out.stats = {{"metric", "rtt_ms"},
               {"rows", rows.size()},
               {"min", rows.empty() ? 0.0 : lo},
               {"max", rows.empty() ? 0.0 : hi},
               {"mean", rows.empty() ? 0.0 : sum / static_cast<double>(rows.size())},
               {"warnings", out.warnings}};
  return out;
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::LatencyTable: return "latency-table";
    case ExperimentKind::TrainingCurve: return "training-curve";
    case ExperimentKind::RttScan: return "rtt-scan";
  }
  return "unknown";
}

std::optional<ExperimentKind> experiment_from_string(const std::string& s) {
  if (s == "latency-table") return ExperimentKind::LatencyTable;
  if (s == "training-curve") return ExperimentKind::TrainingCurve;
  if (s == "rtt-scan") return ExperimentKind::RttScan;
  return std::nullopt;
}

std::vector<orbits::GroundStation> default_stations() {
  return {orbits::GroundStation{"us-west", 45.6, -119.7, 25.0},
          orbits::GroundStation{"eu-central", 48.9, 2.4, 25.0},
          orbits::GroundStation{"ap-east", 35.7, 139.8, 25.0}};
}

ScenarioConfig parse_config(const std::string& json_text) {
  ordered_json j;
  try {
    j = ordered_json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    fail(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) fail("config root must be a JSON object");

  reject_unknown(j, "config",
                 {"experiment", "shell", "stations", "architecture", "inference", "ns", "train",
                  "comm_sizes", "bandwidth_bps", "rtt_step_s", "export_snapshot", "seed",
                  "output_dir"});

  ScenarioConfig cfg;

  const ordered_json* exp = find(j, "experiment");
  if (!exp) fail("missing required key \"experiment\"");
  if (!exp->is_string()) fail("key \"experiment\" must be a string");
  const auto kind = experiment_from_string(exp->get<std::string>());
  if (!kind) {
    fail("key \"experiment\" must be one of \"latency-table\", \"training-curve\", \"rtt-scan\"");
  }
  cfg.experiment = *kind;

  if (const ordered_json* shell = find(j, "shell")) {
    if (!shell->is_object()) fail("key \"shell\" must be an object");
    reject_unknown(*shell, "shell",
                   {"altitude_km", "inclination_deg", "num_planes", "sats_per_plane",
                    "phasing_factor"});
    cfg.shell.altitude_km = get_number(*shell, "altitude_km", cfg.shell.altitude_km, "shell");
    cfg.shell.inclination_deg =
        get_number(*shell, "inclination_deg", cfg.shell.inclination_deg, "shell");
    cfg.shell.num_planes = get_int(*shell, "num_planes", cfg.shell.num_planes, "shell");
    cfg.shell.sats_per_plane =
        get_int(*shell, "sats_per_plane", cfg.shell.sats_per_plane, "shell");
    cfg.shell.phasing_factor =
        get_int(*shell, "phasing_factor", cfg.shell.phasing_factor, "shell");
  }

  if (const ordered_json* stations = find(j, "stations")) {
    if (!stations->is_array()) fail("key \"stations\" must be an array");
    cfg.stations.clear();
    for (const auto& s : *stations) {
      if (!s.is_object()) fail("entries of \"stations\" must be objects");
      reject_unknown(s, "stations[]",
                     {"name", "latitude_deg", "longitude_deg", "min_elevation_deg"});
      orbits::GroundStation gs;
      if (!find(s, "name")) fail("missing key \"name\" in stations[]");
      gs.name = get_string(s, "name", "", "stations[]");
      if (!find(s, "latitude_deg")) fail("missing key \"latitude_deg\" in stations[]");
      gs.latitude_deg = get_number(s, "latitude_deg", 0.0, "stations[]");
      if (!find(s, "longitude_deg")) fail("missing key \"longitude_deg\" in stations[]");
      gs.longitude_deg = get_number(s, "longitude_deg", 0.0, "stations[]");
      gs.min_elevation_deg = get_number(s, "min_elevation_deg", 25.0, "stations[]");
      cfg.stations.push_back(std::move(gs));
    }
  }

  if (const ordered_json* archkey = find(j, "architecture")) {
    if (!archkey->is_string()) fail("key \"architecture\" must be a string");
    const auto a = arch::architecture_from_string(archkey->get<std::string>());
    if (!a) {
      fail("key \"architecture\" must be one of \"centralized\", \"distributed\", \"federated\"");
    }
    cfg.architecture = *a;
  }

  if (const ordered_json* inf = find(j, "inference")) {
    if (!inf->is_object()) fail("key \"inference\" must be an object");
    reject_unknown(*inf, "inference",
                   {"rtt_ms", "gs_inference_latency_ms", "onboard_inference_latency_ms",
                    "alpha_low", "alpha_high", "batch_per_satellite"});
    cfg.inference.rtt_ms = get_number(*inf, "rtt_ms", cfg.inference.rtt_ms, "inference");
    cfg.inference.gs_inference_latency_ms = get_number(
        *inf, "gs_inference_latency_ms", cfg.inference.gs_inference_latency_ms, "inference");
    cfg.inference.onboard_inference_latency_ms =
        get_number(*inf, "onboard_inference_latency_ms",
                   cfg.inference.onboard_inference_latency_ms, "inference");
    cfg.alpha_low = get_number(*inf, "alpha_low", cfg.alpha_low, "inference");
    cfg.alpha_high = get_number(*inf, "alpha_high", cfg.alpha_high, "inference");
    cfg.inference.batch_per_satellite =
        get_int(*inf, "batch_per_satellite", cfg.inference.batch_per_satellite, "inference");
  }
  cfg.inference.alpha = cfg.alpha_high;

  cfg.ns = get_int_list(j, "ns", cfg.ns, "config");

  if (const ordered_json* train = find(j, "train")) {
    if (!train->is_object()) fail("key \"train\" must be an object");
    reject_unknown(*train, "train",
                   {"n_clients", "rounds", "local_epochs", "batch_size", "learning_rate", "seed",
                    "compute_ms_per_batch", "ground_compute_speedup", "holdout_fraction",
                    "hidden_units", "samples", "dim", "classes", "target_accuracy"});
    cfg.train.n_clients = get_int_list(*train, "n_clients", cfg.train.n_clients, "train");
    cfg.train.rounds = get_int(*train, "rounds", cfg.train.rounds, "train");
    cfg.train.local_epochs = get_int(*train, "local_epochs", cfg.train.local_epochs, "train");
    cfg.train.batch_size = get_int(*train, "batch_size", cfg.train.batch_size, "train");
    cfg.train.learning_rate =
        get_number(*train, "learning_rate", cfg.train.learning_rate, "train");
    if (find(*train, "seed")) cfg.train.seed = get_u64(*train, "seed", 0, "train");
    cfg.train.compute_ms_per_batch =
        get_number(*train, "compute_ms_per_batch", cfg.train.compute_ms_per_batch, "train");
    cfg.train.ground_compute_speedup =
        get_number(*train, "ground_compute_speedup", cfg.train.ground_compute_speedup, "train");
    cfg.train.holdout_fraction =
        get_number(*train, "holdout_fraction", cfg.train.holdout_fraction, "train");
    cfg.train.hidden_units = get_int(*train, "hidden_units", cfg.train.hidden_units, "train");
    cfg.train.samples = get_int(*train, "samples", cfg.train.samples, "train");
    cfg.train.dim = get_int(*train, "dim", cfg.train.dim, "train");
    cfg.train.classes = get_int(*train, "classes", cfg.train.classes, "train");
    cfg.train.target_accuracy =
        get_number(*train, "target_accuracy", cfg.train.target_accuracy, "train");
  }

  if (const ordered_json* sizes = find(j, "comm_sizes")) {
    if (!sizes->is_object()) fail("key \"comm_sizes\" must be an object");
    reject_unknown(*sizes, "comm_sizes", {"telemetry_bytes", "model_bytes", "gradient_bytes"});
    cfg.comm_sizes.telemetry_bytes =
        get_u64(*sizes, "telemetry_bytes", cfg.comm_sizes.telemetry_bytes, "comm_sizes");
    cfg.comm_sizes.model_bytes =
        get_u64(*sizes, "model_bytes", cfg.comm_sizes.model_bytes, "comm_sizes");
    cfg.comm_sizes.gradient_bytes =
        get_u64(*sizes, "gradient_bytes", cfg.comm_sizes.gradient_bytes, "comm_sizes");
  }

  cfg.bandwidth_bps = get_number(j, "bandwidth_bps", cfg.bandwidth_bps, "config");
  cfg.rtt_step_s = get_number(j, "rtt_step_s", cfg.rtt_step_s, "config");
  cfg.export_snapshot = get_bool(j, "export_snapshot", cfg.export_snapshot, "config");
  cfg.seed = get_u64(j, "seed", cfg.seed, "config");
  cfg.output_dir = get_string(j, "output_dir", cfg.output_dir, "config");

  validate_config(cfg);
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("config file not found: " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string save_config(const ScenarioConfig& cfg) {
  return scenario_to_json(cfg, /*include_output_dir=*/true).dump(2) + "\n";
}

std::string scenario_json(const ScenarioConfig& cfg) {
  return scenario_to_json(cfg, /*include_output_dir=*/false).dump(2) + "\n";
}

std::vector<RttRow> rtt_scan(const ScenarioConfig& cfg, int* warnings, par::Mode mode) {
  validate_config(cfg);
  if (cfg.stations.empty()) fail("rtt_scan: at least one station required");

  const orbits::EarthModel earth;
  const double period = orbits::orbital_period_s(cfg.shell, earth);
  const std::size_t steps =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(period / cfg.rtt_step_s)));

  struct StepResult {
    std::vector<RttRow> rows;
    int warnings = 0;
  };
  std::vector<StepResult> per_step(steps);

  // One snapshot per time step; steps are independent, so the scan
  // parallelizes across them while each slot keeps its own rows.
  par::for_index(steps, mode, [&](std::size_t k) {
    const double t = static_cast<double>(k) * cfg.rtt_step_s;
    const topo::LinkGraph graph =
        topo::build_snapshot(cfg.shell, cfg.stations, t, earth, true, par::Mode::Serial);

    std::vector<std::vector<std::optional<double>>> from_station;
    from_station.reserve(cfg.stations.size());
    for (std::size_t g = 0; g < cfg.stations.size(); ++g) {
      from_station.push_back(topo::one_way_latencies_from(
          graph, topo::NodeId{topo::NodeKind::Ground, static_cast<int>(g)}));
    }

    StepResult& result = per_step[k];
    for (int sat = 0; sat < graph.num_satellites; ++sat) {
      int best_station = -1;
      double best = 0.0;
      for (std::size_t g = 0; g < from_station.size(); ++g) {
        const auto& lat = from_station[g][static_cast<std::size_t>(sat)];
        if (lat && (best_station < 0 || *lat < best)) {
          best_station = static_cast<int>(g);
          best = *lat;
        }
      }
      if (best_station < 0) {
        ++result.warnings;  // row omitted: no station reachable
        continue;
      }
      result.rows.push_back(
          RttRow{t, sat, cfg.stations[static_cast<std::size_t>(best_station)].name, 2.0 * best});
    }
  });

  std::vector<RttRow> rows;
  int warn_count = 0;
  for (const StepResult& s : per_step) {
    rows.insert(rows.end(), s.rows.begin(), s.rows.end());
    warn_count += s.warnings;
  }
  if (warnings) *warnings = warn_count;
  return rows;
}

std::string rtt_csv(const std::vector<RttRow>& rows) {
  std::string out = "t_s,satellite,station,rtt_ms\n";
  char buf[160];
  for (const RttRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%.3f,%d,%s,%.6f\n", r.t_s, r.satellite, r.station.c_str(),
                  r.rtt_ms);
    out += buf;
  }
  return out;
}

Report run_scenario(const ScenarioConfig& cfg, bool quiet, par::Mode mode) {
  validate_config(cfg);

  ExperimentOutput output;
  switch (cfg.experiment) {
    case ExperimentKind::LatencyTable:
      output = run_latency_table(cfg);
      break;
    case ExperimentKind::TrainingCurve:
      output = run_training_curve(cfg, quiet, mode);
      break;
    case ExperimentKind::RttScan:
      output = run_rtt_scan(cfg, mode);
      break;
  }

  if (cfg.export_snapshot) {
    const orbits::EarthModel earth;
    output.files.emplace_back(
        "snapshot_t0.json",
        topo::to_json(topo::build_snapshot(cfg.shell, cfg.stations, 0.0, earth, true, mode)));
  }

  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);

  Report report;
  report.scenario = scenario_json(cfg);
  report.output_dir = cfg.output_dir;
  report.warnings = output.warnings;

  std::vector<fs::path> written;
  try {
    for (const auto& [name, content] : output.files) {
      const fs::path p = dir / name;
      write_file_atomic(p, content);
      written.push_back(p);
      report.files.push_back(name);
      if (!quiet) std::cout << "wrote " << p.string() << "\n";
    }

    ordered_json summary;
    summary["tool_version"] = kToolVersion;
    summary["scenario"] = scenario_to_json(cfg, /*include_output_dir=*/false);
    summary["files"] = report.files;
    summary["stats"] = output.stats;
    report.stats_json = output.stats.dump(2);

    const fs::path summary_path = dir / "summary.json";
    write_file_atomic(summary_path, summary.dump(2) + "\n");
    written.push_back(summary_path);
    report.files.push_back("summary.json");
    if (!quiet) std::cout << "wrote " << summary_path.string() << "\n";
  } catch (...) {
    for (const fs::path& p : written) {
      std::error_code ec;
      fs::remove(p, ec);  // drop partial outputs
    }
    throw;
  }
  return report;
}

}  // namespace satfed::harness
