// Copyright 2026 The Ridepool Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ridepool/network.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <queue>
#include <sstream>

#include "ridepool/errors.hpp"

namespace ridepool {

namespace {

constexpr std::int32_t kUnreachable = std::numeric_limits<std::int32_t>::max();

}  // namespace

RoadNetwork::RoadNetwork(std::vector<Node> nodes, const std::vector<EdgeSpec>& edges)
    : nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw ValidationError("network has no nodes");
  std::sort(nodes_.begin(), nodes_.end(),
            [](const Node& a, const Node& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    auto [it, inserted] = index_.emplace(nodes_[i].id, static_cast<NodeIndex>(i));
    if (!inserted) throw ValidationError("duplicate node id " + std::to_string(nodes_[i].id));
  }

  // Parallel arcs collapse to the fastest one.
  std::vector<Edge> raw;
  raw.reserve(edges.size());
  for (const EdgeSpec& e : edges) {
    auto from = index_.find(e.from);
    auto to = index_.find(e.to);
    if (from == index_.end() || to == index_.end()) {
      throw ValidationError("edge " + std::to_string(e.from) + "->" + std::to_string(e.to) +
                            " references an unknown node");
    }
    if (e.time <= 0) {
      throw ValidationError("edge " + std::to_string(e.from) + "->" + std::to_string(e.to) +
                            " has non-positive travel time");
    }
    if (from->second == to->second) continue;
    raw.push_back({from->second, to->second, e.time});
  }
  std::sort(raw.begin(), raw.end(), [](const Edge& a, const Edge& b) {
    return std::tie(a.from, a.to, a.time) < std::tie(b.from, b.to, b.time);
  });
  for (const Edge& e : raw) {
    if (!edges_.empty() && edges_.back().from == e.from && edges_.back().to == e.to) continue;
    edges_.push_back(e);
  }
  out_begin_.assign(nodes_.size() + 1, 0);
  for (const Edge& e : edges_) ++out_begin_[static_cast<std::size_t>(e.from) + 1];
  for (std::size_t i = 0; i < nodes_.size(); ++i) out_begin_[i + 1] += out_begin_[i];

  check_strongly_connected();

  eager_ = nodes_.size() <= kAllPairsLimit;
  if (eager_) {
    trees_.reserve(nodes_.size());
    for (std::size_t u = 0; u < nodes_.size(); ++u) {
      trees_.push_back(dijkstra(static_cast<NodeIndex>(u)));
    }
  }
}

std::span<const Edge> RoadNetwork::out_edges(NodeIndex u) const {
  const auto b = out_begin_[static_cast<std::size_t>(u)];
  const auto e = out_begin_[static_cast<std::size_t>(u) + 1];
  return std::span<const Edge>(edges_).subspan(b, e - b);
}

bool RoadNetwork::contains(NodeId id) const { return index_.count(id) != 0; }

NodeIndex RoadNetwork::index_of(NodeId id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw InputError("unknown node id " + std::to_string(id));
  return it->second;
}

Seconds RoadNetwork::shortest_travel_time(NodeId u, NodeId w) const {
  return travel_time(index_of(u), index_of(w));
}

PathResult RoadNetwork::shortest_path(NodeIndex u, NodeIndex w) const {
  const Tree& t = tree(u);
  PathResult result;
  result.duration = t.dist[static_cast<std::size_t>(w)];
  for (NodeIndex x = w; x != kNoNode; x = t.pred[static_cast<std::size_t>(x)]) {
    result.node_sequence.push_back(x);
    if (x == u) break;
  }
  std::reverse(result.node_sequence.begin(), result.node_sequence.end());
  return result;
}

NodeIndex RoadNetwork::next_hop(NodeIndex u, NodeIndex w) const {
  if (u == w) return w;
  const Tree& t = tree(u);
  NodeIndex x = w;
  while (t.pred[static_cast<std::size_t>(x)] != u) x = t.pred[static_cast<std::size_t>(x)];
  return x;
}

Seconds RoadNetwork::arc_time(NodeIndex u, NodeIndex v) const {
  for (const Edge& e : out_edges(u)) {
    if (e.to == v) return e.time;
  }
  return -1;
}

Seconds RoadNetwork::diameter() const {
  Seconds best = 0;
  for (std::size_t u = 0; u < nodes_.size(); ++u) {
    const Tree& t = tree(static_cast<NodeIndex>(u));
    best = std::max<Seconds>(best, *std::max_element(t.dist.begin(), t.dist.end()));
  }
  return best;
}

const RoadNetwork::Tree& RoadNetwork::tree(NodeIndex source) const {
  if (eager_) return trees_[static_cast<std::size_t>(source)];
  std::lock_guard<std::mutex> lock(lazy_mutex_);
  auto& slot = lazy_trees_[source];
  if (!slot) slot = std::make_unique<Tree>(dijkstra(source));
  return *slot;
}

RoadNetwork::Tree RoadNetwork::dijkstra(NodeIndex source) const {
  Tree t;
  t.dist.assign(nodes_.size(), kUnreachable);
  t.pred.assign(nodes_.size(), kNoNode);
  using Item = std::pair<std::int64_t, NodeIndex>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  t.dist[static_cast<std::size_t>(source)] = 0;
  heap.emplace(0, source);
  while (!heap.empty()) {
    auto [d, u] = heap.top();
    heap.pop();
    if (d != t.dist[static_cast<std::size_t>(u)]) continue;
    for (const Edge& e : out_edges(u)) {
      const std::int64_t nd = d + e.time;
      auto& slot = t.dist[static_cast<std::size_t>(e.to)];
      // Equal-length alternatives keep the lower-index predecessor.
      if (nd < slot || (nd == slot && u < t.pred[static_cast<std::size_t>(e.to)])) {
        if (nd >= kUnreachable) throw ValidationError("travel times overflow the path cache");
        const bool improved = nd < slot;
        slot = static_cast<std::int32_t>(nd);
        t.pred[static_cast<std::size_t>(e.to)] = u;
        if (improved) heap.emplace(nd, e.to);
      }
    }
  }
  return t;
}

void RoadNetwork::check_strongly_connected() const {
  const std::size_t n = nodes_.size();
  std::vector<std::vector<NodeIndex>> reverse(n);
  for (const Edge& e : edges_) reverse[static_cast<std::size_t>(e.to)].push_back(e.from);

  auto sweep = [&](bool forward) {
    std::vector<char> seen(n, 0);
    std::vector<NodeIndex> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      NodeIndex u = stack.back();
      stack.pop_back();
      auto visit = [&](NodeIndex v) {
        if (!seen[static_cast<std::size_t>(v)]) {
          seen[static_cast<std::size_t>(v)] = 1;
          stack.push_back(v);
        }
      };
      if (forward) {
        for (const Edge& e : out_edges(u)) visit(e.to);
      } else {
        for (NodeIndex v : reverse[static_cast<std::size_t>(u)]) visit(v);
      }
    }
    return seen;
  };
  const auto fwd = sweep(true);
  const auto bwd = sweep(false);
  for (std::size_t i = 0; i < n; ++i) {
    if (!fwd[i] || !bwd[i]) {
      throw ValidationError("network is not strongly connected: node " +
                            std::to_string(nodes_[i].id) + " is not mutually reachable from node " +
                            std::to_string(nodes_[0].id));
    }
  }
}

std::vector<std::vector<NodeIndex>> ZonePartition::members() const {
  std::vector<std::vector<NodeIndex>> out(centers.size());
  for (std::size_t u = 0; u < zone_of.size(); ++u) {
    out[static_cast<std::size_t>(zone_of[u])].push_back(static_cast<NodeIndex>(u));
  }
  return out;
}

std::vector<int> exact_min_cover(const std::vector<std::uint64_t>& sets, int element_count) {
  if (element_count > 64) throw InputError("exact_min_cover supports at most 64 elements");
  const std::uint64_t all =
      element_count == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << element_count) - 1);
  std::uint64_t reachable = 0;
  for (auto s : sets) reachable |= s;
  if ((reachable & all) != all) throw InputError("set cover instance is infeasible");

  int max_size = 0;
  for (auto s : sets) max_size = std::max(max_size, std::popcount(s & all));

  // Greedy incumbent.
  std::vector<int> best;
  {
    std::uint64_t covered = 0;
    while (covered != all) {
      int pick = -1;
      int gain = 0;
      for (std::size_t i = 0; i < sets.size(); ++i) {
        const int g = std::popcount(sets[i] & all & ~covered);
        if (g > gain) {
          gain = g;
          pick = static_cast<int>(i);
        }
      }
      best.push_back(pick);
      covered |= sets[static_cast<std::size_t>(pick)];
    }
    std::sort(best.begin(), best.end());
  }

  std::vector<int> chosen;
  std::function<void(std::uint64_t)> dfs = [&](std::uint64_t covered) {
    if ((covered & all) == all) {
      if (chosen.size() < best.size()) {
        best = chosen;
        std::sort(best.begin(), best.end());
      }
      return;
    }
    const int left = std::popcount(all & ~covered);
    const std::size_t bound = chosen.size() + static_cast<std::size_t>((left + max_size - 1) / max_size);
    if (bound >= best.size()) return;
    // Branch on the uncovered element with the fewest covering candidates.
    int element = -1;
    int fewest = std::numeric_limits<int>::max();
    for (int e = 0; e < element_count; ++e) {
      if (covered >> e & 1) continue;
      int count = 0;
      for (auto s : sets) count += static_cast<int>(s >> e & 1);
      if (count < fewest) {
        fewest = count;
        element = e;
      }
    }
    for (std::size_t i = 0; i < sets.size(); ++i) {
      if (!(sets[i] >> element & 1)) continue;
      chosen.push_back(static_cast<int>(i));
      dfs(covered | sets[i]);
      chosen.pop_back();
    }
  };
  dfs(0);
  return best;
}

namespace {

std::vector<int> greedy_cover(const RoadNetwork& network, Seconds radius) {
  const auto n = static_cast<NodeIndex>(network.node_count());
  std::vector<char> covered(static_cast<std::size_t>(n), 0);
  std::size_t uncovered = static_cast<std::size_t>(n);

  auto gain_of = [&](NodeIndex c) {
    int g = 0;
    for (NodeIndex u = 0; u < n; ++u) {
      if (!covered[static_cast<std::size_t>(u)] && network.travel_time(c, u) <= radius) ++g;
    }
    return g;
  };

  // Lazy greedy: gains only shrink, so a stale top entry is re-scored and
  // re-queued until the top is fresh. Ties resolve to the lowest index.
  using Item = std::pair<int, NodeIndex>;
  auto cmp = [](const Item& a, const Item& b) {
    return a.first != b.first ? a.first < b.first : a.second > b.second;
  };
  std::priority_queue<Item, std::vector<Item>, decltype(cmp)> heap(cmp);
  for (NodeIndex c = 0; c < n; ++c) heap.emplace(gain_of(c), c);

  std::vector<int> centers;
  while (uncovered > 0) {
    auto [g, c] = heap.top();
    heap.pop();
    const int fresh = gain_of(c);
    if (fresh != g) {
      heap.emplace(fresh, c);
      continue;
    }
    centers.push_back(c);
    for (NodeIndex u = 0; u < n; ++u) {
      if (!covered[static_cast<std::size_t>(u)] && network.travel_time(c, u) <= radius) {
        covered[static_cast<std::size_t>(u)] = 1;
        --uncovered;
      }
    }
  }
  std::sort(centers.begin(), centers.end());
  return centers;
}

}  // namespace

ZonePartition cluster_zones(const RoadNetwork& network, Seconds radius) {
  if (radius <= 0) throw InputError("zone radius t_M must be positive");
  const auto n = static_cast<NodeIndex>(network.node_count());

  std::vector<int> centers;
  if (network.node_count() <= kExactCoverLimit) {
    std::vector<std::uint64_t> sets(static_cast<std::size_t>(n), 0);
    for (NodeIndex c = 0; c < n; ++c) {
      for (NodeIndex u = 0; u < n; ++u) {
        if (network.travel_time(c, u) <= radius) sets[static_cast<std::size_t>(c)] |= std::uint64_t{1} << u;
      }
    }
    centers = exact_min_cover(sets, n);
  } else {
    centers = greedy_cover(network, radius);
  }

  ZonePartition zones;
  zones.radius = radius;
  zones.centers.assign(centers.begin(), centers.end());
  zones.zone_of.assign(static_cast<std::size_t>(n), -1);
  for (NodeIndex u = 0; u < n; ++u) {
    Seconds best = std::numeric_limits<Seconds>::max();
    for (std::size_t z = 0; z < zones.centers.size(); ++z) {
      const Seconds d = network.travel_time(zones.centers[z], u);
      if (d < best) {
        best = d;
        zones.zone_of[static_cast<std::size_t>(u)] = static_cast<int>(z);
      }
    }
  }
  return zones;
}

std::unique_ptr<RoadNetwork> parse_network(const std::string& text, const std::string& source) {
  std::vector<Node> nodes;
  std::vector<EdgeSpec> edges;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string tag;
    if (!(fields >> tag)) continue;
    std::string rest;
    if (tag == "N") {
      Node node;
      if (!(fields >> node.id >> node.x >> node.y)) {
        throw ParseError(source, line_no, "expected `N <id> <x> <y>`");
      }
      if (fields >> rest) throw ParseError(source, line_no, "trailing fields after node record");
      nodes.push_back(node);
    } else if (tag == "E") {
      EdgeSpec edge;
      double seconds = 0;
      if (!(fields >> edge.from >> edge.to >> seconds)) {
        throw ParseError(source, line_no, "expected `E <from> <to> <seconds>`");
      }
      if (fields >> rest) throw ParseError(source, line_no, "trailing fields after edge record");
      if (!(seconds > 0) || !std::isfinite(seconds)) {
        throw ParseError(source, line_no, "edge travel time must be positive");
      }
      edge.time = std::max<Seconds>(1, std::llround(seconds));
      edges.push_back(edge);
    } else {
      throw ParseError(source, line_no, "unknown record type `" + tag + "`");
    }
  }
  if (nodes.empty()) throw ParseError(source, 0, "no node records");

  std::unordered_map<NodeId, int> seen;
  for (const Node& n : nodes) {
    if (++seen[n.id] > 1) throw ParseError(source, 0, "duplicate node id " + std::to_string(n.id));
  }
  // Report unknown edge endpoints with their line number.
  {
    std::istringstream again(text);
    std::size_t no = 0;
    while (std::getline(again, line)) {
      ++no;
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      std::istringstream fields(line);
      std::string tag;
      NodeId a = 0, b = 0;
      if ((fields >> tag) && tag == "E" && (fields >> a >> b)) {
        if (!seen.count(a) || !seen.count(b)) {
          throw ParseError(source, no, "edge references an unknown node");
        }
      }
    }
  }
  return std::make_unique<RoadNetwork>(std::move(nodes), edges);
}

std::unique_ptr<RoadNetwork> load_network(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open network file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_network(buffer.str(), path.string());
}

void write_network(const RoadNetwork& network, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << "# nodes: " << network.node_count() << ", edges: " << network.edge_count() << "\n";
  for (const Node& n : network.nodes()) out << "N " << n.id << ' ' << n.x << ' ' << n.y << '\n';
  for (const Edge& e : network.edges()) {
    out << "E " << network.node(e.from).id << ' ' << network.node(e.to).id << ' ' << e.time << '\n';
  }
}

void write_zones_csv(const RoadNetwork& network, const ZonePartition& zones,
                     const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << "node_id,zone_id\n";
  for (std::size_t u = 0; u < network.node_count(); ++u) {
    out << network.node(static_cast<NodeIndex>(u)).id << ',' << zones.zone_of[u] << '\n';
  }
}

std::unique_ptr<RoadNetwork> make_grid(int rows, int cols, Seconds edge_seconds) {
  if (rows <= 0 || cols <= 0 || edge_seconds <= 0) throw InputError("invalid grid dimensions");
  std::vector<Node> nodes;
  std::vector<EdgeSpec> edges;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const NodeId id = static_cast<NodeId>(r) * cols + c;
      nodes.push_back({id, static_cast<double>(c), static_cast<double>(r)});
      if (c + 1 < cols) {
        edges.push_back({id, id + 1, edge_seconds});
        edges.push_back({id + 1, id, edge_seconds});
      }
      if (r + 1 < rows) {
        edges.push_back({id, id + cols, edge_seconds});
        edges.push_back({id + cols, id, edge_seconds});
      }
    }
  }
  return std::make_unique<RoadNetwork>(std::move(nodes), edges);
}

std::unique_ptr<RoadNetwork> make_circular_city(int spokes, int rings, Seconds ring_seconds) {
  if (spokes < 3 || rings < 1 || ring_seconds <= 0) throw InputError("invalid circular city");
  std::vector<Node> nodes{{0, 0.0, 0.0}};
  std::vector<EdgeSpec> edges;
  auto id_of = [&](int s, int k) { return static_cast<NodeId>(1 + s * rings + (k - 1)); };
  for (int s = 0; s < spokes; ++s) {
    const double angle = 2.0 * std::numbers::pi * s / spokes;
    for (int k = 1; k <= rings; ++k) {
      const double radius = static_cast<double>(k * ring_seconds);
      nodes.push_back({id_of(s, k), radius * std::cos(angle), radius * std::sin(angle)});
      const NodeId inner = k == 1 ? 0 : id_of(s, k - 1);
      edges.push_back({inner, id_of(s, k), ring_seconds});
      edges.push_back({id_of(s, k), inner, ring_seconds});
    }
  }
  const double outer = static_cast<double>(rings * ring_seconds);
  const Seconds arc = std::max<Seconds>(1, std::llround(2.0 * std::numbers::pi * outer / spokes));
  for (int s = 0; s < spokes; ++s) {
    const int t = (s + 1) % spokes;
    edges.push_back({id_of(s, rings), id_of(t, rings), arc});
    edges.push_back({id_of(t, rings), id_of(s, rings), arc});
  }
  return std::make_unique<RoadNetwork>(std::move(nodes), edges);
}

}  // namespace ridepool
