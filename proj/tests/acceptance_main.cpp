// Acceptance suite: runs every release criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "satfed/archmodel.hpp"
#include "satfed/fedsim.hpp"
#include "satfed/harness.hpp"
#include "satfed/orbits.hpp"
#include "satfed/topology.hpp"

namespace fs = std::filesystem;
using namespace satfed;

namespace {

int g_failures = 0;

struct Criterion {
  int id;
  const char* label;
  std::function<bool(std::string&)> body;
  double time_budget_s = 0.0;  // 0 = untimed
};

void run_criterion(const Criterion& c) {
  std::string detail;
  bool ok = false;
  const auto start = std::chrono::steady_clock::now();
  try {
    ok = c.body(detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (c.time_budget_s > 0.0 && elapsed >= c.time_budget_s) {
    ok = false;
    detail += (detail.empty() ? "" : "; ") + std::string("exceeded time budget");
  }
  if (!ok) ++g_failures;
  std::printf("[%s] criterion %2d: %s (%.2fs)%s%s\n", ok ? "PASS" : "FAIL", c.id, c.label,
              elapsed, detail.empty() ? "" : " -- ", detail.c_str());
  std::fflush(stdout);
}

bool approx(double a, double b, double tol) { return std::abs(a - b) <= tol; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::path("acceptance_out") / name;
  fs::remove_all(dir);
  return dir;
}

orbits::ShellConfig desk_shell() {
  orbits::ShellConfig shell;
  shell.num_planes = 6;
  shell.sats_per_plane = 6;
  return shell;
}

// The station sits under the t=0 zenith of satellite (0,0), so the sparse
// desk shell is always reachable.
std::vector<orbits::GroundStation> desk_stations() {
  return {{"equator", 0.0, 0.0, 25.0}};
}

fed::TrainConfig desk_train_config() {
  const orbits::EarthModel earth;
  fed::TrainConfig cfg;
  cfg.comm.graph = topo::build_snapshot(desk_shell(), desk_stations(), 0.0, earth);
  cfg.comm.gs_node = topo::NodeId{topo::NodeKind::Ground, 0};
  return cfg;
}

// ---- criterion bodies -----------------------------------------------------

// 1. latency-table run reproduces every reference centralized/federated cell
//    within +/-0.005 ms.
bool table_reproduction(std::string& detail) {
  harness::ScenarioConfig cfg;
  cfg.experiment = harness::ExperimentKind::LatencyTable;
  cfg.output_dir = fresh_dir("latency_table").string();
  harness::run_scenario(cfg);

  const std::string csv = slurp(fs::path(cfg.output_dir) / "latency_table.csv");
  std::map<std::pair<std::string, int>, std::pair<double, double>> cells;
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    std::istringstream row(line);
    std::string architecture, field;
    std::getline(row, architecture, ',');
    std::getline(row, field, ',');
    const int n = std::stoi(field);
    std::getline(row, field, ',');
    std::getline(row, field, ',');
    std::getline(row, field, ',');
    const double low = std::stod(field);
    std::getline(row, field, ',');
    const double high = std::stod(field);
    cells[{architecture, n}] = {low, high};
  }

  const double tol = 0.005;
  bool ok = true;
  ok &= approx(cells[{"centralized", 1}].first, 125.64, tol);
  ok &= approx(cells[{"centralized", 1}].second, 125.64, tol);
  ok &= approx(cells[{"centralized", 10}].first, 125.64, tol);
  ok &= approx(cells[{"centralized", 10}].second, 134.28, tol);
  ok &= approx(cells[{"centralized", 100}].first, 138.60, tol);
  ok &= approx(cells[{"centralized", 100}].second, 225.00, tol);
  for (int n : {1, 10, 100}) {
    ok &= approx(cells[{"federated", n}].first, 23.75, tol);
    ok &= approx(cells[{"federated", n}].second, 23.75, tol);
  }
  if (!ok) detail = "a table cell missed its reference value";
  return ok;
}

// 2. federated inference latency is exactly identical across N.
bool federated_scale_independence(std::string& detail) {
  const arch::InferenceParams p;
  const double reference = arch::federated_inference_latency(p, 1);
  for (int n : {1, 10, 100, 10000}) {
    if (arch::federated_inference_latency(p, n) != reference) {
      detail = "latency varied at n=" + std::to_string(n);
      return false;
    }
  }
  return true;
}

// 3. centralized latency strictly exceeds the 124.2 ms round trip everywhere
//    in the default sweep.
bool centralized_rtt_floor(std::string& detail) {
  for (int n : {1, 2, 5, 10, 25, 50, 100, 500, 1000}) {
    for (double alpha = 0.1; alpha <= 0.7000001; alpha += 0.05) {
      arch::InferenceParams p;
      p.alpha = alpha;
      if (!(arch::centralized_inference_latency(p, n) > 124.2)) {
        detail = "floor violated at n=" + std::to_string(n);
        return false;
      }
    }
  }
  return true;
}

// 4. shortest_path equals an independent Bellman-Ford on 100 seeded random
//    graphs, exact latency equality.
bool routing_oracle(std::string& detail) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto g = testing_oracles::random_graph(seed);
    for (int src : {0, g.num_satellites / 2}) {
      const auto oracle =
          testing_oracles::bellman_ford(g, topo::NodeId{topo::NodeKind::Satellite, src});
      for (int v = 0; v < g.num_satellites; ++v) {
        const auto mine = topo::shortest_path(g, topo::NodeId{topo::NodeKind::Satellite, src},
                                              topo::NodeId{topo::NodeKind::Satellite, v});
        const auto& expect = oracle[static_cast<std::size_t>(v)];
        if (mine.has_value() != expect.has_value()) {
          detail = "reachability mismatch, seed " + std::to_string(seed);
          return false;
        }
        if (mine && mine->latency_ms != *expect) {
          detail = "latency mismatch, seed " + std::to_string(seed);
          return false;
        }
      }
    }
  }
  return true;
}

// 5. radius conservation, periodicity, and the Kepler period on the desk
//    shell.
bool orbital_invariants(std::string& detail) {
  const orbits::EarthModel earth;
  const orbits::ShellConfig shell = desk_shell();
  const double a = earth.radius_km + shell.altitude_km;

  // independent Kepler oracle with its own constants
  const double oracle_period =
      2.0 * 3.14159265358979323846 * std::sqrt(a * a * a / 398600.4418);
  const double period = orbits::orbital_period_s(shell, earth);
  if (std::abs(period - oracle_period) / oracle_period >= 1e-6) {
    detail = "period mismatch";
    return false;
  }

  for (int p = 0; p < shell.num_planes; ++p) {
    for (int s = 0; s < shell.sats_per_plane; ++s) {
      for (double t = 0.0; t < period; t += period / 17.0) {
        const auto pos = orbits::propagate(shell, {p, s}, t, earth);
        const double r = std::sqrt(pos.x_km * pos.x_km + pos.y_km * pos.y_km +
                                   pos.z_km * pos.z_km);
        if (std::abs(r - a) / a >= 1e-6) {
          detail = "radius drift";
          return false;
        }
        const auto next = orbits::propagate(shell, {p, s}, t + period, earth);
        if (orbits::distance_km(pos, next) >= 1e-6) {
          detail = "period return error";
          return false;
        }
      }
    }
  }
  return true;
}

// 6. +Grid degree invariant across shell sizes up to 34x34.
bool isl_grid_degree(std::string& detail) {
  const orbits::EarthModel earth;
  for (int planes : {3, 5, 9, 17, 34}) {
    for (int slots : {3, 6, 13, 34}) {
      orbits::ShellConfig shell;
      shell.num_planes = planes;
      shell.sats_per_plane = slots;
      const auto g = topo::build_isl_grid(shell, 0.0, earth);
      if (g.links.size() != static_cast<std::size_t>(2 * planes * slots)) {
        detail = "edge count off at " + std::to_string(planes) + "x" + std::to_string(slots);
        return false;
      }
      for (int i = 0; i < g.num_satellites; ++i) {
        if (topo::isl_degree(g, topo::NodeId{topo::NodeKind::Satellite, i}) != 4) {
          detail = "degree off at " + std::to_string(planes) + "x" + std::to_string(slots);
          return false;
        }
      }
    }
  }
  return true;
}

// 7. FedAvg with one client and one local epoch walks the centralized
//    trajectory coordinate-for-coordinate.
bool fedavg_degeneracy(std::string& detail) {
  const fed::Dataset ds = fed::make_synthetic(400, 2, 2, 8);
  fed::TrainConfig cfg = desk_train_config();
  cfg.n_clients = 1;
  cfg.local_epochs = 1;
  cfg.rounds = 20;

  std::vector<std::vector<double>> fed_w, cent_w;
  fed::run_federated(ds, cfg, par::default_mode(),
                     [&](int, const fed::Model& m) { fed_w.push_back(m.weights); });
  fed::run_centralized(ds, cfg, par::default_mode(),
                       [&](int, const fed::Model& m) { cent_w.push_back(m.weights); });

  if (fed_w.size() != cent_w.size()) {
    detail = "trajectory lengths differ";
    return false;
  }
  for (std::size_t r = 0; r < fed_w.size(); ++r) {
    for (std::size_t i = 0; i < fed_w[r].size(); ++i) {
      if (std::abs(fed_w[r][i] - cent_w[r][i]) > 1e-9) {
        detail = "divergence at round " + std::to_string(r);
        return false;
      }
    }
  }
  return true;
}

// 8. analytic gradients against central finite differences, 10 random
//    points, 1e-4 relative.
bool gradient_check(std::string& detail) {
  rng::Engine eng(2024);
  const fed::Dataset ds = fed::make_synthetic(30, 4, 3, 77);
  std::vector<int> batch;
  for (int i = 0; i < 10; ++i) batch.push_back(i);

  for (int point = 0; point < 10; ++point) {
    fed::Model m = fed::zero_model({4, 3, 0});
    for (double& w : m.weights) w = eng.uniform(-1.0, 1.0);

    const auto analytic = fed::cross_entropy_gradient(m, ds, batch);
    constexpr double h = 1e-5;
    double diff2 = 0.0, norm2 = 0.0;
    for (std::size_t i = 0; i < m.weights.size(); ++i) {
      fed::Model plus = m, minus = m;
      plus.weights[i] += h;
      minus.weights[i] -= h;
      const double numeric = (fed::cross_entropy_loss(plus, ds, batch) -
                              fed::cross_entropy_loss(minus, ds, batch)) /
                             (2.0 * h);
      diff2 += (analytic[i] - numeric) * (analytic[i] - numeric);
      norm2 += numeric * numeric;
    }
    if (std::sqrt(diff2) > 1e-4 * std::max(1e-8, std::sqrt(norm2))) {
      detail = "gradient mismatch at point " + std::to_string(point);
      return false;
    }
  }
  return true;
}

// 9. training-scaling report: finite time-to-accuracy ratio below 20 and a
//    federated final accuracy within 95% of centralized inside 200 rounds;
//    traces and the ratio are emitted for inspection.
bool training_scaling(std::string& detail) {
  harness::ScenarioConfig cfg;
  cfg.experiment = harness::ExperimentKind::TrainingCurve;
  cfg.shell = desk_shell();
  cfg.stations = desk_stations();
  cfg.train.n_clients = {50};
  cfg.train.rounds = 200;
  cfg.train.target_accuracy = 0.85;
  cfg.output_dir = fresh_dir("training_scaling").string();
  harness::run_scenario(cfg);

  const auto cent = fed::trace_from_csv(slurp(fs::path(cfg.output_dir) / "trace_centralized.csv"));
  const auto fl = fed::trace_from_csv(slurp(fs::path(cfg.output_dir) / "trace_federated_n50.csv"));

  const auto tta_cent = fed::time_to_accuracy(cent, 0.85);
  const auto tta_fl = fed::time_to_accuracy(fl, 0.85);
  if (!tta_cent.reached || !tta_fl.reached) {
    detail = "target accuracy 0.85 not reached";
    return false;
  }
  const double ratio = tta_fl.elapsed_ms / tta_cent.elapsed_ms;
  if (!(std::isfinite(ratio) && ratio < 20.0)) {
    detail = "ratio " + std::to_string(ratio) + " out of bounds";
    return false;
  }
  const double cent_final = cent.records.back().accuracy;
  const double fl_final = fl.records.back().accuracy;
  if (fl_final < 0.95 * cent_final) {
    detail = "federated final accuracy too low";
    return false;
  }
  const std::string summary = slurp(fs::path(cfg.output_dir) / "summary.json");
  if (summary.find("tta_ratio_vs_centralized") == std::string::npos) {
    detail = "ratio missing from the emitted summary";
    return false;
  }
  detail = "ratio " + std::to_string(ratio);
  return true;
}

// 10. federated exposure is zero at every round; centralized equals
//     n * rounds * telemetry exactly.
bool exposure_invariant(std::string& detail) {
  const fed::Dataset ds = fed::make_synthetic(300, 2, 2, 4);
  fed::TrainConfig cfg = desk_train_config();
  cfg.n_clients = 7;
  cfg.rounds = 9;
  cfg.comm.sizes.telemetry_bytes = 12345;

  const auto fl = fed::run_federated(ds, cfg);
  for (const auto& r : fl.records) {
    if (r.exposure_bytes != 0) {
      detail = "federated exposure nonzero at round " + std::to_string(r.round);
      return false;
    }
  }

  const auto cent = fed::run_centralized(ds, cfg);
  const std::uint64_t expect = 7ULL * 9ULL * 12345ULL;
  if (cent.records.back().exposure_bytes != expect) {
    detail = "centralized exposure mismatch";
    return false;
  }
  if (arch::telemetry_exposure_bytes(arch::ArchitectureKind::Centralized, cfg.comm.sizes, 7, 9) !=
      expect) {
    detail = "exposure operation mismatch";
    return false;
  }
  return true;
}

// 11. rtt-scan on the 34x34 default shell with the mid-latitude trio stays
//     inside [4.2, 400] ms; envelope containment of 124.2 ms is reported.
bool plausible_rtt(std::string& detail) {
  harness::ScenarioConfig cfg;
  cfg.experiment = harness::ExperimentKind::RttScan;
  cfg.rtt_step_s = 300.0;  // 20 snapshots over the period
  cfg.output_dir = fresh_dir("rtt_scan").string();

  int warnings = 0;
  const auto rows = harness::rtt_scan(cfg, &warnings);
  if (rows.empty()) {
    detail = "scan produced no rows";
    return false;
  }
  double lo = rows.front().rtt_ms, hi = rows.front().rtt_ms;
  for (const auto& r : rows) {
    if (r.rtt_ms < 4.2 || r.rtt_ms > 400.0) {
      detail = "rtt out of bounds: " + std::to_string(r.rtt_ms);
      return false;
    }
    lo = std::min(lo, r.rtt_ms);
    hi = std::max(hi, r.rtt_ms);
  }
  char buf[128];
  std::snprintf(buf, sizeof(buf), "envelope [%.1f, %.1f] ms %s 124.2", lo, hi,
                (lo <= 124.2 && 124.2 <= hi) ? "contains" : "excludes (report-only)");
  detail = buf;
  return true;
}

// 12. repeated simulate runs with an identical scenario produce
//     byte-identical outputs.
bool end_to_end_determinism(std::string& detail) {
  harness::ScenarioConfig cfg;
  cfg.experiment = harness::ExperimentKind::TrainingCurve;
  cfg.shell = desk_shell();
  cfg.stations = desk_stations();
  cfg.train.n_clients = {1, 5};
  cfg.train.rounds = 10;
  cfg.train.samples = 500;
  cfg.export_snapshot = true;
  cfg.seed = 31337;

  cfg.output_dir = fresh_dir("determinism_a").string();
  const auto r1 = harness::run_scenario(cfg);
  const std::string dir1 = cfg.output_dir;
  cfg.output_dir = fresh_dir("determinism_b").string();
  const auto r2 = harness::run_scenario(cfg);

  if (r1.files != r2.files) {
    detail = "file lists differ";
    return false;
  }
  for (const auto& f : r1.files) {
    if (slurp(fs::path(dir1) / f) != slurp(fs::path(cfg.output_dir) / f)) {
      detail = "file " + f + " differs";
      return false;
    }
  }

  harness::ScenarioConfig rtt_cfg;
  rtt_cfg.experiment = harness::ExperimentKind::RttScan;
  rtt_cfg.shell = desk_shell();
  rtt_cfg.rtt_step_s = 600.0;
  rtt_cfg.output_dir = fresh_dir("determinism_c").string();
  const auto r3 = harness::run_scenario(rtt_cfg);
  const std::string dir3 = rtt_cfg.output_dir;
  rtt_cfg.output_dir = fresh_dir("determinism_d").string();
  const auto r4 = harness::run_scenario(rtt_cfg);
  for (const auto& f : r3.files) {
    if (slurp(fs::path(dir3) / f) != slurp(fs::path(rtt_cfg.output_dir) / f)) {
      detail = "rtt file " + f + " differs";
      return false;
    }
  }
  return true;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "latency table reproduction (+/-0.005 ms)", table_reproduction, 1.0},
      {2, "federated scale-independence (exact)", federated_scale_independence},
      {3, "centralized latency floor above the round trip", centralized_rtt_floor},
      {4, "routing equals Bellman-Ford on 100 random graphs", routing_oracle, 10.0},
      {5, "orbital radius, periodicity, and Kepler period", orbital_invariants},
      {6, "+Grid ISL degree and edge counts up to 34x34", isl_grid_degree},
      {7, "FedAvg single-client degeneracy (1e-9 per weight)", fedavg_degeneracy, 5.0},
      {8, "analytic gradient vs central finite differences", gradient_check},
      {9, "training scaling: tta ratio finite and < 20", training_scaling, 60.0},
      {10, "telemetry exposure: federated 0, centralized exact", exposure_invariant},
      {11, "simulated rtt plausibility on the default shell", plausible_rtt},
      {12, "end-to-end byte determinism of simulate runs", end_to_end_determinism},
  };

  for (const auto& c : criteria) run_criterion(c);

  if (g_failures == 0) {
    std::printf("all %zu criteria passed\n", criteria.size());
  } else {
    std::printf("%d criteria FAILED\n", g_failures);
  }
  return g_failures == 0 ? 0 : 1;
}
