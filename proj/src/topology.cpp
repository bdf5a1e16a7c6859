#include "satfed/topology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include <json.hpp>

namespace satfed::topo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

// Adjacency in flat-index space, neighbors sorted by target index so the
// lexicographic tie-break walk below is deterministic.
std::vector<std::vector<std::pair<int, double>>> adjacency(const LinkGraph& g) {
  std::vector<std::vector<std::pair<int, double>>> adj(g.node_count());
  for (const Link& l : g.links) {
    const int ia = g.flat_index(l.a);
    const int ib = g.flat_index(l.b);
    adj[ia].emplace_back(ib, l.latency_ms);
    adj[ib].emplace_back(ia, l.latency_ms);
  }
  for (auto& nbrs : adj) std::sort(nbrs.begin(), nbrs.end());
  return adj;
}

// Plain binary-heap Dijkstra; ties pop in node-index order.
std::vector<double> dijkstra(const std::vector<std::vector<std::pair<int, double>>>& adj,
                             int src, std::vector<int>* parent = nullptr) {
  std::vector<double> dist(adj.size(), kInf);
  if (parent) parent->assign(adj.size(), -1);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[src] = 0.0;
  heap.emplace(0.0, src);
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[u]) continue;
    for (const auto& [v, w] : adj[u]) {
      const double nd = d + w;
      if (nd < dist[v]) {
        dist[v] = nd;
        if (parent) (*parent)[v] = u;
        heap.emplace(nd, v);
      }
    }
  }
  return dist;
}

const char* kind_name(NodeKind k) { return k == NodeKind::Satellite ? "satellite" : "ground"; }
const char* kind_name(LinkKind k) { return k == LinkKind::ISL ? "isl" : "gsl"; }

}  // namespace

Link make_link(NodeId a, NodeId b, LinkKind kind, double length_km) {
  require(!(a == b), "Link endpoints must differ");
  require(length_km >= 0.0, "Link length must be >= 0");
  return Link{a, b, kind, length_km, latency_ms_for_length(length_km)};
}

int LinkGraph::flat_index(NodeId n) const {
  return n.kind == NodeKind::Satellite ? n.index : num_satellites + n.index;
}

bool LinkGraph::contains(NodeId n) const {
  if (n.index < 0) return false;
  return n.kind == NodeKind::Satellite ? n.index < num_satellites : n.index < num_ground;
}

LinkGraph build_isl_grid(const orbits::ShellConfig& shell, double t_s,
                         const orbits::EarthModel& earth, bool seam_links, par::Mode mode) {
  shell.validate();
  require(shell.num_planes >= 3 && shell.sats_per_plane >= 3,
          "build_isl_grid: +Grid wiring needs num_planes >= 3 and sats_per_plane >= 3");

  const int planes = shell.num_planes;
  const int slots = shell.sats_per_plane;
  const int total = shell.total_satellites();

  LinkGraph g;
  g.timestamp_s = t_s;
  g.num_satellites = total;
  g.nodes.reserve(total);
  for (int i = 0; i < total; ++i) g.nodes.push_back(NodeId{NodeKind::Satellite, i});
  g.sat_positions = orbits::shell_positions(shell, t_s, earth, mode);

  // Edge e < total is the intra-plane link of satellite e to slot+1;
  // edges [total, 2*total) are inter-plane links to plane+1. Each slot is
  // written independently, then seam edges are filtered out serially.
  std::vector<Link> edges(static_cast<std::size_t>(2 * total));
  par::for_index(edges.size(), mode, [&](std::size_t e) {
    const int idx = static_cast<int>(e % static_cast<std::size_t>(total));
    const int p = idx / slots;
    const int s = idx % slots;
    int q;  // neighbor flat index
    if (e < static_cast<std::size_t>(total)) {
      q = p * slots + (s + 1) % slots;
    } else {
      q = ((p + 1) % planes) * slots + s;
    }
    const double len = orbits::distance_km(g.sat_positions[idx], g.sat_positions[q]);
    edges[e] = make_link(NodeId{NodeKind::Satellite, idx}, NodeId{NodeKind::Satellite, q},
                         LinkKind::ISL, len);
  });

  g.links.reserve(edges.size());
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (!seam_links && e >= static_cast<std::size_t>(total)) {
      const int p = (static_cast<int>(e) - total) / slots;
      if (p == planes - 1) continue;  // severed counter-rotating seam
    }
    g.links.push_back(edges[e]);
  }
  return g;
}

LinkGraph attach_gsl(const LinkGraph& graph, const std::vector<orbits::GroundStation>& stations,
                     double t_s, const orbits::EarthModel& earth, par::Mode mode) {
  require(graph.timestamp_s == t_s, "attach_gsl: graph was built at a different timestamp");
  LinkGraph g = graph;

  const std::size_t n_sat = static_cast<std::size_t>(g.num_satellites);
  // Visibility and slant ranges for all station x satellite pairs, one slot
  // per pair so the kernel parallelizes without ordering effects.
  std::vector<double> slant(stations.size() * n_sat, -1.0);
  std::vector<orbits::Position> gs_pos(stations.size());
  for (std::size_t j = 0; j < stations.size(); ++j) {
    stations[j].validate();
    gs_pos[j] = orbits::ground_position(stations[j], t_s, earth);
  }
  par::for_index(slant.size(), mode, [&](std::size_t k) {
    const std::size_t j = k / n_sat;
    const std::size_t i = k % n_sat;
    if (orbits::visible(g.sat_positions[i], stations[j], gs_pos[j])) {
      slant[k] = orbits::distance_km(g.sat_positions[i], gs_pos[j]);
    }
  });

  for (std::size_t j = 0; j < stations.size(); ++j) {
    const int gidx = g.num_ground++;
    g.nodes.push_back(NodeId{NodeKind::Ground, gidx});
    g.ground_names.push_back(stations[j].name);
    for (std::size_t i = 0; i < n_sat; ++i) {
      const double len = slant[j * n_sat + i];
      if (len >= 0.0) {
        g.links.push_back(make_link(NodeId{NodeKind::Satellite, static_cast<int>(i)},
                                    NodeId{NodeKind::Ground, gidx}, LinkKind::GSL, len));
      }
    }
  }
  return g;
}

LinkGraph build_snapshot(const orbits::ShellConfig& shell,
                         const std::vector<orbits::GroundStation>& stations, double t_s,
                         const orbits::EarthModel& earth, bool seam_links, par::Mode mode) {
  return attach_gsl(build_isl_grid(shell, t_s, earth, seam_links, mode), stations, t_s, earth,
                    mode);
}

std::optional<PathResult> shortest_path(const LinkGraph& graph, NodeId src, NodeId dst) {
  require(graph.contains(src), "shortest_path: src not in graph");
  require(graph.contains(dst), "shortest_path: dst not in graph");

  const int s = graph.flat_index(src);
  const int d = graph.flat_index(dst);
  if (s == d) return PathResult{{src}, 0.0};

  const auto adj = adjacency(graph);
  std::vector<int> parent;
  const auto dist_src = dijkstra(adj, s, &parent);
  if (dist_src[d] == kInf) return std::nullopt;
  const auto dist_dst = dijkstra(adj, d);

  const double total = dist_src[d];
  const double eps = 1e-12 * (total + 1.0);

  // Greedy forward walk over nodes that sit on some shortest path; taking
  // the smallest admissible flat index at every hop yields the
  // lexicographically smallest tied path.
  std::vector<char> visited(adj.size(), 0);
  std::vector<int> flat_path{s};
  visited[s] = 1;
  int cur = s;
  while (cur != d) {
    int next = -1;
    for (const auto& [v, w] : adj[cur]) {  // sorted by v
      if (visited[v]) continue;
      if (std::abs(dist_src[cur] + w - dist_src[v]) > eps) continue;
      if (std::abs(dist_src[v] + dist_dst[v] - total) > eps) continue;
      next = v;
      break;
    }
    if (next < 0) {
      // the epsilon walk stalled; fall back to the Dijkstra parent chain
      flat_path.assign(1, d);
      for (int u = parent[d]; u >= 0; u = parent[u]) flat_path.push_back(u);
      std::reverse(flat_path.begin(), flat_path.end());
      break;
    }
    visited[next] = 1;
    flat_path.push_back(next);
    cur = next;
  }

  PathResult res;
  res.latency_ms = total;
  res.path.reserve(flat_path.size());
  for (int f : flat_path) res.path.push_back(graph.nodes[static_cast<std::size_t>(f)]);
  return res;
}

std::optional<double> rtt_ms(const LinkGraph& graph, NodeId sat, NodeId gs) {
  const auto p = shortest_path(graph, sat, gs);
  if (!p) return std::nullopt;
  return 2.0 * p->latency_ms;
}

std::vector<std::optional<double>> one_way_latencies_from(const LinkGraph& graph, NodeId src) {
  require(graph.contains(src), "one_way_latencies_from: src not in graph");
  const auto dist = dijkstra(adjacency(graph), graph.flat_index(src));
  std::vector<std::optional<double>> out(dist.size());
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (dist[i] != kInf) out[i] = dist[i];
  }
  return out;
}

int isl_degree(const LinkGraph& graph, NodeId n) {
  int deg = 0;
  for (const Link& l : graph.links) {
    if (l.kind == LinkKind::ISL && (l.a == n || l.b == n)) ++deg;
  }
  return deg;
}

bool is_connected(const LinkGraph& graph) {
  if (graph.node_count() == 0) return true;
  const auto adj = adjacency(graph);
  std::vector<char> seen(adj.size(), 0);
  std::queue<int> q;
  q.push(0);
  seen[0] = 1;
  int count = 1;
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    for (const auto& [v, w] : adj[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        ++count;
        q.push(v);
      }
    }
  }
  return count == graph.node_count();
}

std::string to_json(const LinkGraph& graph) {
  nlohmann::ordered_json j;
  j["timestamp_s"] = graph.timestamp_s;
  j["nodes"] = nlohmann::ordered_json::array();
  for (const NodeId& n : graph.nodes) {
    j["nodes"].push_back({{"kind", kind_name(n.kind)}, {"index", n.index}});
  }
  j["links"] = nlohmann::ordered_json::array();
  for (const Link& l : graph.links) {
    j["links"].push_back({{"a", {{"kind", kind_name(l.a.kind)}, {"index", l.a.index}}},
                          {"b", {{"kind", kind_name(l.b.kind)}, {"index", l.b.index}}},
                          {"kind", kind_name(l.kind)},
                          {"length_km", l.length_km},
                          {"latency_ms", l.latency_ms}});
  }
  return j.dump(2);
}

}  // namespace satfed::topo
