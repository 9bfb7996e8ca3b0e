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

#include "ridepool/fleet.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "ridepool/errors.hpp"

namespace ridepool {

Anchor planning_anchor(const Vehicle& vehicle, const RoadNetwork& network) {
  if (!vehicle.moving()) return {vehicle.node, vehicle.clock};
  return {vehicle.edge_head,
          vehicle.edge_departed + network.arc_time(vehicle.node, vehicle.edge_head)};
}

Position position(const Vehicle& vehicle) {
  if (!vehicle.moving()) return {vehicle.node, kNoNode, 0};
  return {vehicle.node, vehicle.edge_head, vehicle.clock - vehicle.edge_departed};
}

NodeIndex nearest_node(const Vehicle& vehicle, const RoadNetwork& network) {
  if (!vehicle.moving()) return vehicle.node;
  const Seconds driven = vehicle.clock - vehicle.edge_departed;
  const Seconds length = network.arc_time(vehicle.node, vehicle.edge_head);
  return 2 * driven < length ? vehicle.node : vehicle.edge_head;
}

int seats_onboard(const Vehicle& vehicle, std::span<const Request> requests) {
  int seats = 0;
  for (RequestId r : vehicle.onboard) seats += requests[static_cast<std::size_t>(r)].party_size;
  return seats;
}

StopPlan schedule_stops(const Anchor& anchor, std::vector<Stop> stops, const RoadNetwork& network,
                        std::span<const Request> requests) {
  StopPlan plan;
  NodeIndex at = anchor.node;
  Seconds t = anchor.time;
  for (Stop& s : stops) {
    const Seconds leg = network.travel_time(at, s.node);
    plan.total_length += leg;
    t += leg;
    if (s.action == StopAction::kPickup) {
      t = std::max(t, requests[static_cast<std::size_t>(s.request)].request_time);
    }
    s.scheduled = t;
    at = s.node;
  }
  plan.stops = std::move(stops);
  return plan;
}

namespace {

// Serves the leading stops located at the vehicle's node. Returns false when
// the vehicle must hold there (artificial pickup).
bool serve_stops_here(Vehicle& v, std::span<Request> requests, Seconds now,
                      std::vector<FleetEvent>* events) {
  auto& stops = v.plan.stops;
  std::size_t done = 0;
  bool hold = false;
  while (done < stops.size() && stops[done].node == v.node) {
    const Stop& s = stops[done];
    if (s.action == StopAction::kRebalance) {
      ++done;
      continue;
    }
    Request& r = requests[static_cast<std::size_t>(s.request)];
    if (s.action == StopAction::kPickup) {
      if (r.artificial || r.request_time > now) {
        hold = true;
        break;
      }
      r.set_status(RequestStatus::kOnboard);
      r.pickup_time = now;
      std::erase(v.assigned, r.id);
      v.onboard.push_back(r.id);
      if (events) {
        events->push_back({now, FleetEventKind::kPickup, r.id, v.id, seats_onboard(v, requests)});
      }
    } else {
      r.set_status(RequestStatus::kCompleted);
      r.dropoff_time = now;
      std::erase(v.onboard, r.id);
      if (events) {
        events->push_back({now, FleetEventKind::kDropoff, r.id, v.id, seats_onboard(v, requests)});
      }
    }
    ++done;
  }
  stops.erase(stops.begin(), stops.begin() + static_cast<std::ptrdiff_t>(done));
  return !hold;
}

}  // namespace

void advance(Vehicle& v, Seconds until, const RoadNetwork& network, std::span<Request> requests,
             std::vector<FleetEvent>* events) {
  Seconds now = v.clock;
  for (;;) {
    if (v.moving()) {
      const Seconds arrive = v.edge_departed + network.arc_time(v.node, v.edge_head);
      if (arrive > until) {
        v.moving_time += until - now;
        now = until;
        break;
      }
      v.moving_time += arrive - now;
      now = arrive;
      v.node = v.edge_head;
      v.edge_head = kNoNode;
    }
    if (!serve_stops_here(v, requests, now, events)) break;
    if (v.plan.stops.empty() || now >= until) break;
    v.edge_head = network.next_hop(v.node, v.plan.stops.front().node);
    v.edge_departed = now;
  }
  v.clock = until;
  if (v.plan.stops.empty()) v.plan.total_length = 0;
}

std::optional<std::vector<int>> seats_free_profile(int capacity, int onboard_seats,
                                                   std::span<const Stop> stops,
                                                   std::span<const Request> requests) {
  std::vector<int> free{capacity - onboard_seats};
  if (free.back() < 0) return std::nullopt;
  for (const Stop& s : stops) {
    int delta = 0;
    if (s.action == StopAction::kPickup) delta = -requests[static_cast<std::size_t>(s.request)].party_size;
    if (s.action == StopAction::kDropoff) delta = requests[static_cast<std::size_t>(s.request)].party_size;
    free.push_back(free.back() + delta);
    if (free.back() < 0 || free.back() > capacity) return std::nullopt;
  }
  return free;
}

std::optional<std::vector<int>> seats_free_profile(const Vehicle& vehicle,
                                                   std::span<const Stop> stops,
                                                   std::span<const Request> requests) {
  return seats_free_profile(vehicle.capacity, seats_onboard(vehicle, requests), stops, requests);
}

std::vector<Vehicle> place_fleet(const FleetConfig& config, const RoadNetwork& network,
                                 std::uint64_t seed, std::span<const double> demand_weights) {
  if (config.count < 0 || config.capacity < 1) throw InputError("invalid fleet configuration");
  std::vector<Vehicle> fleet(static_cast<std::size_t>(config.count));
  std::mt19937_64 rng(seed);
  const auto n = network.node_count();

  std::vector<double> weights(n, 1.0);
  if (config.placement == Placement::kDemandWeighted && demand_weights.size() == n &&
      std::accumulate(demand_weights.begin(), demand_weights.end(), 0.0) > 0) {
    weights.assign(demand_weights.begin(), demand_weights.end());
  }
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());

  for (int i = 0; i < config.count; ++i) {
    Vehicle& v = fleet[static_cast<std::size_t>(i)];
    v.id = i;
    v.capacity = config.capacity;
    if (config.placement == Placement::kExplicit) {
      if (config.initial_nodes.empty()) throw InputError("explicit placement needs initial nodes");
      v.node = network.index_of(config.initial_nodes[static_cast<std::size_t>(i) % config.initial_nodes.size()]);
    } else {
      v.node = static_cast<NodeIndex>(pick(rng));
    }
  }
  return fleet;
}

}  // namespace ridepool
