#include "satfed/archmodel.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

namespace satfed::arch {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

double tx_ms(std::uint64_t bytes, double bandwidth_bps) {
  return static_cast<double>(bytes) * 8.0 / bandwidth_bps * 1000.0;
}

std::string format_row(const LatencyReport& r) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%s,%d,%.6f,%.6f,%.6f,%.6f\n",
                to_string(r.architecture).c_str(), r.n_satellites, r.alpha_low, r.alpha_high,
                r.latency_low_ms, r.latency_high_ms);
  return buf;
}

}  // namespace

std::string to_string(ArchitectureKind kind) {
  switch (kind) {
    case ArchitectureKind::Centralized: return "centralized";
    case ArchitectureKind::Distributed: return "distributed";
    case ArchitectureKind::Federated: return "federated";
  }
  return "unknown";
}

std::optional<ArchitectureKind> architecture_from_string(std::string_view s) {
  if (s == "centralized") return ArchitectureKind::Centralized;
  if (s == "distributed") return ArchitectureKind::Distributed;
  if (s == "federated") return ArchitectureKind::Federated;
  return std::nullopt;
}

void InferenceParams::validate() const {
  require(rtt_ms > 0.0, "InferenceParams.rtt_ms must be positive");
  require(gs_inference_latency_ms > 0.0,
          "InferenceParams.gs_inference_latency_ms must be positive");
  require(onboard_inference_latency_ms > 0.0,
          "InferenceParams.onboard_inference_latency_ms must be positive");
  require(alpha > 0.0 && alpha <= 1.0, "InferenceParams.alpha must lie in (0, 1]");
  require(batch_per_satellite >= 1, "InferenceParams.batch_per_satellite must be >= 1");
}

double centralized_inference_latency(const InferenceParams& p, int n) {
  p.validate();
  require(n >= 1, "centralized_inference_latency: n must be >= 1");
  return p.rtt_ms + p.gs_inference_latency_ms * std::max(1.0, p.alpha * n);
}

double federated_inference_latency(const InferenceParams& p, int n) {
  p.validate();
  require(n >= 1, "federated_inference_latency: n must be >= 1");
  return p.onboard_inference_latency_ms;
}

double distributed_inference_latency(const InferenceParams& p, int n) {
  return federated_inference_latency(p, n);
}

std::vector<LatencyReport> latency_table(const InferenceParams& p, const std::vector<int>& ns,
                                         double alpha_low, double alpha_high) {
  require(!ns.empty(), "latency_table: ns must be nonempty");
  require(alpha_low > 0.0 && alpha_low <= alpha_high && alpha_high <= 1.0,
          "latency_table: need 0 < alpha_low <= alpha_high <= 1");

  std::vector<LatencyReport> rows;
  rows.reserve(3 * ns.size());
  for (ArchitectureKind kind : {ArchitectureKind::Centralized, ArchitectureKind::Distributed,
                                ArchitectureKind::Federated}) {
    for (int n : ns) {
      LatencyReport r;
      r.architecture = kind;
      r.n_satellites = n;
      r.alpha_low = alpha_low;
      r.alpha_high = alpha_high;
      if (kind == ArchitectureKind::Centralized) {
        InferenceParams q = p;
        q.alpha = alpha_low;
        r.latency_low_ms = centralized_inference_latency(q, n);
        q.alpha = alpha_high;
        r.latency_high_ms = centralized_inference_latency(q, n);
      } else {
        const double lat = kind == ArchitectureKind::Distributed
                               ? distributed_inference_latency(p, n)
                               : federated_inference_latency(p, n);
        r.latency_low_ms = lat;
        r.latency_high_ms = lat;
      }
      rows.push_back(r);
    }
  }
  return rows;
}

std::string latency_table_csv(const std::vector<LatencyReport>& rows) {
  std::string out = "architecture,n_satellites,alpha_low,alpha_high,latency_low_ms,latency_high_ms\n";
  for (const LatencyReport& r : rows) out += format_row(r);
  return out;
}

double training_round_comm_ms(ArchitectureKind kind, const topo::LinkGraph& graph,
                              topo::NodeId gs_node, const CommSizes& sizes,
                              double bandwidth_bps) {
  require(graph.contains(gs_node), "training_round_comm_ms: gs_node not in graph");
  require(graph.num_satellites >= 1, "training_round_comm_ms: graph has no satellites");
  require(bandwidth_bps > 0.0, "training_round_comm_ms: bandwidth_bps must be positive");

  const auto latency = topo::one_way_latencies_from(graph, gs_node);
  std::vector<double> sat_latency(static_cast<std::size_t>(graph.num_satellites));
  for (int i = 0; i < graph.num_satellites; ++i) {
    const auto& l = latency[static_cast<std::size_t>(i)];
    if (!l) {
      throw topo::no_path_error("training_round_comm_ms: satellite " + std::to_string(i) +
                                " has no path to the ground station");
    }
    sat_latency[static_cast<std::size_t>(i)] = *l;
  }

  const auto slowest_leg = [&](std::uint64_t payload_bytes) {
    double worst = 0.0;
    for (double l : sat_latency) worst = std::max(worst, l + tx_ms(payload_bytes, bandwidth_bps));
    return worst;
  };

  switch (kind) {
    case ArchitectureKind::Centralized:
      return slowest_leg(sizes.telemetry_bytes);
    case ArchitectureKind::Distributed:
      return slowest_leg(sizes.telemetry_bytes) + slowest_leg(sizes.model_bytes);
    case ArchitectureKind::Federated:
      return slowest_leg(sizes.gradient_bytes) + slowest_leg(sizes.model_bytes);
  }
  throw std::logic_error("training_round_comm_ms: unhandled architecture");
}

std::uint64_t telemetry_exposure_bytes(ArchitectureKind kind, const CommSizes& sizes, int n,
                                       int rounds) {
  require(n >= 1, "telemetry_exposure_bytes: n must be >= 1");
  require(rounds >= 0, "telemetry_exposure_bytes: rounds must be >= 0");
  if (kind == ArchitectureKind::Federated) return 0;
  return static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(rounds) *
         sizes.telemetry_bytes;
}

}  // namespace satfed::arch
