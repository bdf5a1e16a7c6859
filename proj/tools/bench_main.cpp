// Compares the serial reference path against the OpenMP kernels on the
// hot loops: shell propagation, snapshot construction, the rtt scan, and a
// federated training round.

#include <chrono>
#include <cstdio>
#include <functional>

#include "satfed/fedsim.hpp"
#include "satfed/harness.hpp"
#include "satfed/orbits.hpp"
#include "satfed/parallel.hpp"
#include "satfed/topology.hpp"

namespace {

using satfed::par::Mode;

double g_sink = 0.0;  // keeps the optimizer from dropping the kernels

double time_ms(const std::function<void()>& fn) {
  const auto start = std::chrono::steady_clock::now();
  fn();
  const auto stop = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(stop - start).count();
}

void report(const char* name, double serial_ms, double parallel_ms) {
  std::printf("%-28s %10.1f ms %10.1f ms %8.2fx\n", name, serial_ms, parallel_ms,
              serial_ms / parallel_ms);
}

}  // namespace

int main() {
  const satfed::orbits::EarthModel earth;
  const satfed::orbits::ShellConfig shell;  // 34x34 default
  const auto stations = satfed::harness::default_stations();

  std::printf("%-28s %13s %13s %9s\n", "kernel", "serial", "openmp", "speedup");
  if (!satfed::par::openmp_available()) {
    std::printf("(built without OpenMP; both columns run the serial path)\n");
  }

  {
    const auto run = [&](Mode mode) {
      for (int k = 0; k < 400; ++k) {
        const auto positions = satfed::orbits::shell_positions(shell, 60.0 * k, earth, mode);
        g_sink += positions.back().x_km;
      }
    };
    const double s = time_ms([&] { run(Mode::Serial); });
    const double p = time_ms([&] { run(Mode::OpenMP); });
    report("shell_positions 34x34 x400", s, p);
  }

  {
    const auto run = [&](Mode mode) {
      for (int k = 0; k < 40; ++k) {
        const auto graph =
            satfed::topo::build_snapshot(shell, stations, 60.0 * k, earth, true, mode);
        g_sink += graph.links.back().latency_ms;
      }
    };
    const double s = time_ms([&] { run(Mode::Serial); });
    const double p = time_ms([&] { run(Mode::OpenMP); });
    report("build_snapshot 34x34 x40", s, p);
  }

  {
    satfed::harness::ScenarioConfig cfg;
    cfg.experiment = satfed::harness::ExperimentKind::RttScan;
    const auto run = [&](Mode mode) {
      int warnings = 0;
      const auto rows = satfed::harness::rtt_scan(cfg, &warnings, mode);
      g_sink += rows.back().rtt_ms;
    };
    const double s = time_ms([&] { run(Mode::Serial); });
    const double p = time_ms([&] { run(Mode::OpenMP); });
    report("rtt_scan 34x34 full period", s, p);
  }

  {
    const auto ds = satfed::fed::make_synthetic(4000, 8, 4, 7);
    satfed::fed::TrainConfig cfg;
    cfg.n_clients = 50;
    cfg.rounds = 30;
    cfg.local_epochs = 2;
    satfed::orbits::ShellConfig desk;
    desk.num_planes = 6;
    desk.sats_per_plane = 6;
    cfg.comm.graph = satfed::topo::build_snapshot(
        desk, {{"equator", 0.0, 0.0, 25.0}}, 0.0, earth);
    const auto run = [&](Mode mode) {
      const auto trace = satfed::fed::run_federated(ds, cfg, mode);
      g_sink += trace.records.back().accuracy;
    };
    const double s = time_ms([&] { run(Mode::Serial); });
    const double p = time_ms([&] { run(Mode::OpenMP); });
    report("run_federated n=50 r=30", s, p);
  }

  std::printf("(checksum %.3f)\n", g_sink);
  return 0;
}
