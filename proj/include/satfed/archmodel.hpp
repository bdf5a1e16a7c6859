#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "satfed/topology.hpp"

namespace satfed::arch {

enum class ArchitectureKind { Centralized, Distributed, Federated };

std::string to_string(ArchitectureKind kind);
std::optional<ArchitectureKind> architecture_from_string(std::string_view s);

// Inference-latency model inputs. Defaults are the bundled reference
// measurements: 124.2 ms space round trip, 1.44 ms per ground inference,
// 23.75 ms per on-board inference, 128 requests batched per satellite.
struct InferenceParams {
  double rtt_ms = 124.2;
  double gs_inference_latency_ms = 1.44;
  double onboard_inference_latency_ms = 23.75;
  double alpha = 0.7;  // ground-server parallelism level, (0, 1]
  int batch_per_satellite = 128;

  void validate() const;
};

struct CommSizes {
  std::uint64_t telemetry_bytes = 1048576;  // 1 MiB per satellite per round
  std::uint64_t model_bytes = 65536;
  std::uint64_t gradient_bytes = 65536;
};

struct LatencyReport {
  ArchitectureKind architecture = ArchitectureKind::Centralized;
  int n_satellites = 0;
  double alpha_low = 0.0;
  double alpha_high = 0.0;
  double latency_low_ms = 0.0;
  double latency_high_ms = 0.0;
};

// rtt + gs_latency * max(1, alpha*n). A request always pays at least one
// full ground inference slot; alpha*n models queueing amplification beyond
// a single request.
double centralized_inference_latency(const InferenceParams& p, int n);

// Constant in n: inference never leaves the satellite.
double federated_inference_latency(const InferenceParams& p, int n);

// Same on-board path as federated; the architectures differ at training time.
double distributed_inference_latency(const InferenceParams& p, int n);

// One row per (architecture, n); centralized rows evaluated at both alpha
// bounds, on-board rows have low == high.
std::vector<LatencyReport> latency_table(const InferenceParams& p, const std::vector<int>& ns,
                                         double alpha_low, double alpha_high);

// columns: architecture,n_satellites,alpha_low,alpha_high,latency_low_ms,latency_high_ms
std::string latency_table_csv(const std::vector<LatencyReport>& rows);

// Simulated duration of one synchronous training round: the round completes
// when the slowest satellite completes.
//   Centralized:  max_sat(latency + tx(telemetry))
//   Distributed:  max_sat(latency + tx(telemetry)) + max_sat(latency + tx(model))
//   Federated:    max_sat(latency + tx(gradient))  + max_sat(latency + tx(model))
// Throws topo::no_path_error naming the first unreachable satellite.
double training_round_comm_ms(ArchitectureKind kind, const topo::LinkGraph& graph,
                              topo::NodeId gs_node, const CommSizes& sizes,
                              double bandwidth_bps);

// Raw telemetry leaving the space segment. Federated training sends none.
std::uint64_t telemetry_exposure_bytes(ArchitectureKind kind, const CommSizes& sizes, int n,
                                       int rounds);

}  // namespace satfed::arch
