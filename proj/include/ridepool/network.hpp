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

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace ridepool {

using Seconds = std::int64_t;
// Node id as it appears in input files.
using NodeId = std::int64_t;
// Dense node index, 0..node_count()-1, ordered by NodeId.
using NodeIndex = std::int32_t;

inline constexpr NodeIndex kNoNode = -1;

struct Node {
  NodeId id = 0;
  double x = 0.0;
  double y = 0.0;
};

struct Edge {
  NodeIndex from = kNoNode;
  NodeIndex to = kNoNode;
  Seconds time = 0;
};

// Edge list keyed by external ids, used to build a RoadNetwork.
struct EdgeSpec {
  NodeId from = 0;
  NodeId to = 0;
  Seconds time = 0;
};

struct PathResult {
  std::vector<NodeIndex> node_sequence;
  Seconds duration = 0;
};

// Directed road graph with travel-time weights and cached shortest times.
//
// Networks up to kAllPairsLimit nodes get a full all-pairs table at
// construction; larger ones run Dijkstra per source on first use and memoize
// the tree. Either way the object is safe for concurrent const access.
class RoadNetwork {
 public:
  static constexpr std::size_t kAllPairsLimit = 10000;

  // Throws ValidationError on non-positive edge times, unknown endpoints,
  // duplicate node ids or a graph that is not strongly connected.
  RoadNetwork(std::vector<Node> nodes, const std::vector<EdgeSpec>& edges);

  RoadNetwork(const RoadNetwork&) = delete;
  RoadNetwork& operator=(const RoadNetwork&) = delete;
  RoadNetwork(RoadNetwork&&) = delete;

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  const Node& node(NodeIndex u) const { return nodes_[static_cast<std::size_t>(u)]; }
  std::span<const Node> nodes() const { return nodes_; }
  std::span<const Edge> edges() const { return edges_; }
  std::span<const Edge> out_edges(NodeIndex u) const;

  bool contains(NodeId id) const;
  // Throws InputError for an unknown id.
  NodeIndex index_of(NodeId id) const;

  // t_V(u, w) over dense indices. No bounds checking.
  Seconds travel_time(NodeIndex u, NodeIndex w) const {
    return tree(u).dist[static_cast<std::size_t>(w)];
  }
  // t_V(u, w) over external ids; throws InputError for unknown ids.
  Seconds shortest_travel_time(NodeId u, NodeId w) const;

  PathResult shortest_path(NodeIndex u, NodeIndex w) const;
  // First node after u on the cached fastest path to w (w itself when u == w).
  NodeIndex next_hop(NodeIndex u, NodeIndex w) const;
  // Time of the direct arc u->v, or -1 when there is none.
  Seconds arc_time(NodeIndex u, NodeIndex v) const;

  Seconds diameter() const;
  bool all_pairs_cached() const { return eager_; }

 private:
  struct Tree {
    std::vector<std::int32_t> dist;
    std::vector<NodeIndex> pred;
  };

  const Tree& tree(NodeIndex source) const;
  Tree dijkstra(NodeIndex source) const;
  void check_strongly_connected() const;

  std::vector<Node> nodes_;
  std::vector<Edge> edges_;             // sorted by (from, to)
  std::vector<std::size_t> out_begin_;  // CSR offsets into edges_
  std::unordered_map<NodeId, NodeIndex> index_;

  bool eager_ = true;
  std::vector<Tree> trees_;
  mutable std::mutex lazy_mutex_;
  mutable std::unordered_map<NodeIndex, std::unique_ptr<Tree>> lazy_trees_;
};

// Center-based partition of the nodes into zones.
struct ZonePartition {
  std::vector<NodeIndex> centers;  // zone z is centered at centers[z]
  std::vector<int> zone_of;        // node index -> zone id
  Seconds radius = 0;              // the t_M the partition was built for

  int zone_count() const { return static_cast<int>(centers.size()); }
  std::vector<std::vector<NodeIndex>> members() const;
};

// Instances with at most this many nodes are covered exactly; larger ones use
// greedy set cover.
inline constexpr std::size_t kExactCoverLimit = 30;

// Picks a minimum set of centers such that every node is reachable from some
// center within `radius`, then assigns each node to its nearest center (ties
// to the lowest id). Throws InputError if radius <= 0.
ZonePartition cluster_zones(const RoadNetwork& network, Seconds radius);

// Exact minimum set cover by branch and bound. `sets[i]` is the element mask
// covered by candidate i; at most 64 elements. Returns chosen candidate
// indices in increasing order.
std::vector<int> exact_min_cover(const std::vector<std::uint64_t>& sets, int element_count);

std::unique_ptr<RoadNetwork> load_network(const std::filesystem::path& path);
std::unique_ptr<RoadNetwork> parse_network(const std::string& text,
                                           const std::string& source = "<string>");
void write_network(const RoadNetwork& network, const std::filesystem::path& path);
// CSV `node_id,zone_id`.
void write_zones_csv(const RoadNetwork& network, const ZonePartition& zones,
                     const std::filesystem::path& path);

// rows x cols lattice with two-way arcs of `edge_seconds`; node ids are
// row * cols + col, coordinates are (col, row).
std::unique_ptr<RoadNetwork> make_grid(int rows, int cols, Seconds edge_seconds);

// Hub-and-spoke disc: node 0 at the center, `spokes` radial lines of `rings`
// nodes each, consecutive rings `ring_seconds` apart, and the outer ring
// closed into a cycle. Node id of spoke s, ring k (1-based) is
// 1 + s * rings + (k - 1).
std::unique_ptr<RoadNetwork> make_circular_city(int spokes, int rings, Seconds ring_seconds);

}  // namespace ridepool
