#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "satfed/orbits.hpp"
#include "satfed/parallel.hpp"

namespace satfed::topo {

inline constexpr double kLightSpeedKmPerS = 299792.458;

enum class NodeKind { Satellite, Ground };

struct NodeId {
  NodeKind kind = NodeKind::Satellite;
  int index = 0;

  friend bool operator==(const NodeId&, const NodeId&) = default;
};

enum class LinkKind { ISL, GSL };

struct Link {
  NodeId a;
  NodeId b;
  LinkKind kind = LinkKind::ISL;
  double length_km = 0.0;
  double latency_ms = 0.0;
};

inline double latency_ms_for_length(double length_km) {
  return length_km / kLightSpeedKmPerS * 1000.0;
}

Link make_link(NodeId a, NodeId b, LinkKind kind, double length_km);

// Undirected snapshot of the constellation at one instant. Satellites come
// first in `nodes`, ground stations after; completed graphs are immutable
// values and safe to share across threads.
struct LinkGraph {
  double timestamp_s = 0.0;
  int num_satellites = 0;
  int num_ground = 0;
  std::vector<NodeId> nodes;
  std::vector<std::string> ground_names;
  std::vector<orbits::Position> sat_positions;
  std::vector<Link> links;

  int flat_index(NodeId n) const;
  bool contains(NodeId n) const;
  int node_count() const { return num_satellites + num_ground; }
};

struct no_path_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// +Grid ISL wiring: every satellite links to slot +/-1 in its plane and to
// the same slot in plane +/-1, torus wraparound included. seam_links=false
// severs the plane (P-1, 0) inter-plane ring.
LinkGraph build_isl_grid(const orbits::ShellConfig& shell, double t_s,
                         const orbits::EarthModel& earth, bool seam_links = true,
                         par::Mode mode = par::default_mode());

// Adds one ground node per station and a GSL to every satellite above the
// station's minimum elevation. Stations with an empty sky get no links.
LinkGraph attach_gsl(const LinkGraph& graph, const std::vector<orbits::GroundStation>& stations,
                     double t_s, const orbits::EarthModel& earth,
                     par::Mode mode = par::default_mode());

LinkGraph build_snapshot(const orbits::ShellConfig& shell,
                         const std::vector<orbits::GroundStation>& stations, double t_s,
                         const orbits::EarthModel& earth, bool seam_links = true,
                         par::Mode mode = par::default_mode());

struct PathResult {
  std::vector<NodeId> path;
  double latency_ms = 0.0;
};

// Minimal-latency path; equal-latency ties resolve to the lexicographically
// smallest node-index sequence. Empty optional when dst is unreachable.
std::optional<PathResult> shortest_path(const LinkGraph& graph, NodeId src, NodeId dst);

// Round trip, propagation only. Empty optional when there is no path.
std::optional<double> rtt_ms(const LinkGraph& graph, NodeId sat, NodeId gs);

// One-way minimal latency from src to every node (flat order), empty where
// unreachable. The bulk variant behind rtt scans and the comm model.
std::vector<std::optional<double>> one_way_latencies_from(const LinkGraph& graph, NodeId src);

int isl_degree(const LinkGraph& graph, NodeId n);
bool is_connected(const LinkGraph& graph);

// Debug snapshot export:
// {timestamp_s, nodes:[{kind,index}], links:[{a,b,kind,length_km,latency_ms}]}
std::string to_json(const LinkGraph& graph);

}  // namespace satfed::topo
