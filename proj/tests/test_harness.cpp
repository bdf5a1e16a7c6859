#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "satfed/harness.hpp"

using namespace satfed;
using harness::ExperimentKind;
using harness::ScenarioConfig;

namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::path("harness_test_out") / name;
  fs::remove_all(dir);
  return dir;
}

int count_occurrences(const std::string& text, const std::string& needle) {
  int count = 0;
  std::size_t pos = 0;
  while ((pos = text.find(needle, pos)) != std::string::npos) {
    ++count;
    pos += needle.size();
  }
  return count;
}

}  // namespace

TEST_CASE("minimal config takes the documented defaults") {
  const ScenarioConfig cfg = harness::parse_config(R"({"experiment":"latency-table"})");
  CHECK(cfg.experiment == ExperimentKind::LatencyTable);
  CHECK(cfg.inference.rtt_ms == 124.2);
  CHECK(cfg.inference.gs_inference_latency_ms == 1.44);
  CHECK(cfg.inference.onboard_inference_latency_ms == 23.75);
  CHECK(cfg.alpha_low == 0.1);
  CHECK(cfg.alpha_high == 0.7);
  CHECK(cfg.ns == std::vector<int>{1, 10, 100});
  CHECK(cfg.shell.altitude_km == 630.0);
  CHECK(cfg.shell.num_planes == 34);
  CHECK(cfg.stations.size() == 3);
  CHECK(cfg.seed == 0);
  CHECK(cfg.output_dir == "out");
}

TEST_CASE("config parser names offending keys") {
  // unknown key
  CHECK_THROWS_WITH_AS(harness::parse_config(R"({"experiment":"latency-table","alpha":1.5})"),
                       doctest::Contains("alpha"), harness::config_error);
  CHECK_THROWS_WITH_AS(
      harness::parse_config(R"({"experiment":"latency-table","inference":{"alpha":1.5}})"),
      doctest::Contains("alpha"), harness::config_error);
  // range violation
  CHECK_THROWS_WITH_AS(
      harness::parse_config(R"({"experiment":"latency-table","inference":{"alpha_high":1.5}})"),
      doctest::Contains("alpha_high"), harness::config_error);
  // type violation
  CHECK_THROWS_WITH_AS(
      harness::parse_config(R"({"experiment":"latency-table","seed":"abc"})"),
      doctest::Contains("seed"), harness::config_error);
  // missing experiment
  CHECK_THROWS_WITH_AS(harness::parse_config(R"({"ns":[1]})"),
                       doctest::Contains("experiment"), harness::config_error);
  // malformed json
  CHECK_THROWS_AS(harness::parse_config("{nope"), harness::config_error);
  // missing file
  CHECK_THROWS_AS(harness::load_config("does_not_exist.json"), harness::config_error);
}

TEST_CASE("config round-trips through save and parse") {
  ScenarioConfig cfg;
  cfg.experiment = ExperimentKind::TrainingCurve;
  cfg.shell.num_planes = 7;
  cfg.shell.sats_per_plane = 9;
  cfg.stations = {{"only", 12.5, -33.25, 20.0}};
  cfg.architecture = arch::ArchitectureKind::Distributed;
  cfg.alpha_low = 0.25;
  cfg.alpha_high = 0.5;
  cfg.ns = {2, 4};
  cfg.train.n_clients = {3, 5};
  cfg.train.rounds = 17;
  cfg.train.seed = 11;
  cfg.comm_sizes.telemetry_bytes = 4242;
  cfg.bandwidth_bps = 5e7;
  cfg.rtt_step_s = 30.0;
  cfg.export_snapshot = true;
  cfg.output_dir = "elsewhere";
  cfg.seed = 99;

  const std::string saved = harness::save_config(cfg);
  const ScenarioConfig back = harness::parse_config(saved);
  CHECK(harness::save_config(back) == saved);
  CHECK(back.output_dir == "elsewhere");
  CHECK(back.train.n_clients == std::vector<int>{3, 5});
  CHECK(back.train.seed.has_value());
  CHECK(*back.train.seed == 11);
}

TEST_CASE("scalar n_clients is accepted as shorthand") {
  const ScenarioConfig cfg = harness::parse_config(
      R"({"experiment":"training-curve","train":{"n_clients":4}})");
  CHECK(cfg.train.n_clients == std::vector<int>{4});
}

TEST_CASE("latency-table scenario reproduces the reference table in its csv") {
  ScenarioConfig cfg;
  cfg.experiment = ExperimentKind::LatencyTable;
  cfg.output_dir = fresh_dir("latency").string();
  const auto report = harness::run_scenario(cfg);

  REQUIRE(report.files.size() == 2);
  const std::string csv = slurp(fs::path(cfg.output_dir) / "latency_table.csv");
  CHECK(csv.find("centralized,1,0.100000,0.700000,125.640000,125.640000") != std::string::npos);
  CHECK(csv.find("centralized,10,0.100000,0.700000,125.640000,134.280000") != std::string::npos);
  CHECK(csv.find("centralized,100,0.100000,0.700000,138.600000,225.000000") != std::string::npos);
  CHECK(csv.find("federated,100,0.100000,0.700000,23.750000,23.750000") != std::string::npos);

  for (const auto& f : report.files) {
    const fs::path p = fs::path(cfg.output_dir) / f;
    CHECK(fs::exists(p));
    CHECK(fs::file_size(p) > 0);
  }
}

TEST_CASE("identical scenarios produce byte-identical outputs") {
  ScenarioConfig cfg;
  cfg.experiment = ExperimentKind::TrainingCurve;
  cfg.shell.num_planes = 6;
  cfg.shell.sats_per_plane = 6;
  cfg.stations = {{"equator", 0.0, 0.0, 25.0}};  // visible from the 6x6 shell at t=0
  cfg.train.n_clients = {2};
  cfg.train.rounds = 5;
  cfg.train.samples = 200;

  cfg.output_dir = fresh_dir("det_a").string();
  const auto r1 = harness::run_scenario(cfg);
  cfg.output_dir = fresh_dir("det_b").string();
  const auto r2 = harness::run_scenario(cfg);

  REQUIRE(r1.files == r2.files);
  for (const auto& f : r1.files) {
    CHECK(slurp(fs::path(r1.output_dir) / f) == slurp(fs::path(r2.output_dir) / f));
  }
}

TEST_CASE("training-curve scenario emits traces, chart, and tta summary") {
  ScenarioConfig cfg;
  cfg.experiment = ExperimentKind::TrainingCurve;
  cfg.shell.num_planes = 6;
  cfg.shell.sats_per_plane = 6;
  cfg.stations = {{"equator", 0.0, 0.0, 25.0}};
  cfg.train.n_clients = {1, 4};
  cfg.train.rounds = 12;
  cfg.train.samples = 400;
  cfg.output_dir = fresh_dir("curve").string();

  const auto report = harness::run_scenario(cfg);
  CHECK(report.files == std::vector<std::string>{"trace_centralized.csv", "trace_federated_n1.csv",
                                                 "trace_federated_n4.csv", "training_curves.svg",
                                                 "summary.json"});
  const std::string summary = slurp(fs::path(cfg.output_dir) / "summary.json");
  CHECK(summary.find("\"time_to_accuracy_ms\"") != std::string::npos);
  CHECK(summary.find("\"tta_ratio_vs_centralized\"") != std::string::npos);
  CHECK(summary.find("\"tool_version\"") != std::string::npos);
  CHECK(summary.find("output_dir") == std::string::npos);  // byte-stable across out dirs
}

TEST_CASE("rtt scan rows are sorted, bounded, and meridian-symmetric at t=0") {
  ScenarioConfig cfg;
  cfg.experiment = ExperimentKind::RttScan;
  cfg.shell.num_planes = 6;
  cfg.shell.sats_per_plane = 6;
  cfg.stations = {{"equator", 0.0, 0.0, 10.0}};
  cfg.rtt_step_s = 2000.0;

  int warnings = -1;
  const auto rows = harness::rtt_scan(cfg, &warnings);
  REQUIRE(!rows.empty());
  CHECK(warnings == 0);

  const double floor_ms = 2.0 * cfg.shell.altitude_km / topo::kLightSpeedKmPerS * 1000.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].rtt_ms >= floor_ms);
    CHECK(rows[i].rtt_ms <= 400.0);
    if (i > 0) {
      const bool sorted = rows[i - 1].t_s < rows[i].t_s ||
                          (rows[i - 1].t_s == rows[i].t_s &&
                           rows[i - 1].satellite < rows[i].satellite);
      CHECK(sorted);
    }
  }

  // reflection oracle: at t=0 an equatorial station at lon 0 sees satellites
  // (p, s) and (P-p mod P, S-s mod S) at identical round trips
  std::vector<double> t0(36, -1.0);
  for (const auto& r : rows) {
    if (r.t_s == 0.0) t0[static_cast<std::size_t>(r.satellite)] = r.rtt_ms;
  }
  for (int p = 0; p < 6; ++p) {
    for (int s = 0; s < 6; ++s) {
      const int a = p * 6 + s;
      const int b = ((6 - p) % 6) * 6 + (6 - s) % 6;
      if (t0[a] >= 0.0 && t0[b] >= 0.0) {
        CHECK(std::abs(t0[a] - t0[b]) < 1e-6);
      }
    }
  }
}

TEST_CASE("svg chart: polyline per trace with legend labels") {
  fed::TrainingTrace two_points;
  two_points.records = {{0, 0.5, 0.0, 0}, {1, 0.9, 10.0, 0}};

  const std::string single = harness::svg_curve({{"alpha", two_points}});
  CHECK(count_occurrences(single, "<polyline") == 1);
  const std::size_t points = single.find("points=\"");
  REQUIRE(points != std::string::npos);
  const std::size_t end = single.find('"', points + 8);
  const std::string coords = single.substr(points + 8, end - points - 8);
  CHECK(count_occurrences(coords, ",") == 2);  // exactly two coordinate pairs
  CHECK(single.find("elapsed_ms") != std::string::npos);
  CHECK(single.find("accuracy") != std::string::npos);

  fed::TrainingTrace other;
  other.records = {{0, 0.2, 0.0, 0}, {1, 0.4, 5.0, 0}, {2, 0.8, 10.0, 0}};
  const std::string dual = harness::svg_curve({{"alpha", two_points}, {"beta", other}});
  CHECK(count_occurrences(dual, "<polyline") == 2);
  CHECK(dual.find(">alpha</text>") != std::string::npos);
  CHECK(dual.find(">beta</text>") != std::string::npos);

  CHECK(harness::svg_curve({{"alpha", two_points}}) == single);  // byte-stable
  CHECK_THROWS_AS(harness::svg_curve({}), std::invalid_argument);
  CHECK_THROWS_AS(harness::svg_curve({{"empty", fed::TrainingTrace{}}}), std::invalid_argument);
}

TEST_CASE("emit_svg_curve reads trace csv files") {
  const fs::path dir = fresh_dir("svg");
  fs::create_directories(dir);
  fed::TrainingTrace trace;
  trace.records = {{0, 0.3, 0.0, 0}, {1, 0.6, 4.0, 0}, {2, 0.7, 8.0, 0}};
  {
    std::ofstream out(dir / "mytrace.csv", std::ios::binary);
    out << fed::trace_csv(trace);
  }

  harness::emit_svg_curve({(dir / "mytrace.csv").string()}, (dir / "chart.svg").string());
  const std::string svg = slurp(dir / "chart.svg");
  CHECK(count_occurrences(svg, "<polyline") == 1);
  CHECK(svg.find(">mytrace</text>") != std::string::npos);

  CHECK_THROWS_AS(harness::emit_svg_curve({}, (dir / "x.svg").string()), std::invalid_argument);
  CHECK_THROWS_AS(harness::emit_svg_curve({(dir / "missing.csv").string()},
                                          (dir / "x.svg").string()),
                  std::invalid_argument);
}

TEST_CASE("export_snapshot adds the debug graph dump") {
  ScenarioConfig cfg;
  cfg.experiment = ExperimentKind::LatencyTable;
  cfg.shell.num_planes = 6;
  cfg.shell.sats_per_plane = 6;
  cfg.export_snapshot = true;
  cfg.output_dir = fresh_dir("snap").string();
  const auto report = harness::run_scenario(cfg);
  CHECK(std::find(report.files.begin(), report.files.end(), "snapshot_t0.json") !=
        report.files.end());
  const std::string snap = slurp(fs::path(cfg.output_dir) / "snapshot_t0.json");
  CHECK(snap.find("\"timestamp_s\"") != std::string::npos);
}

TEST_CASE("stations are required for experiments that use the ground segment") {
  ScenarioConfig cfg;
  cfg.experiment = ExperimentKind::RttScan;
  cfg.stations.clear();
  CHECK_THROWS_AS(harness::run_scenario(cfg), harness::config_error);

  cfg.experiment = ExperimentKind::LatencyTable;
  cfg.output_dir = fresh_dir("nostations").string();
  CHECK_NOTHROW(harness::run_scenario(cfg));  // the table never touches the graph
}
