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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ridepool/demand.hpp"
#include "ridepool/network.hpp"

namespace ridepool {

enum class StopAction : std::uint8_t { kPickup, kDropoff, kRebalance };

struct Stop {
  NodeIndex node = kNoNode;
  StopAction action = StopAction::kPickup;
  RequestId request = -1;  // -1 for rebalance targets
  Seconds scheduled = 0;   // service time at the stop

  friend bool operator==(const Stop&, const Stop&) = default;
};

// Ordered stops with their schedule. total_length is the driving time from
// the planning anchor to the last stop; waiting at a stop is not counted.
struct StopPlan {
  std::vector<Stop> stops;
  Seconds total_length = 0;

  bool empty() const { return stops.empty(); }
  friend bool operator==(const StopPlan&, const StopPlan&) = default;
};

// The point from which a new plan may start: the vehicle's node, or the head
// of the edge it is traversing together with the arrival time there.
struct Anchor {
  NodeIndex node = kNoNode;
  Seconds time = 0;
};

struct Position {
  NodeIndex node = kNoNode;       // current node, or edge tail when moving
  NodeIndex edge_head = kNoNode;  // kNoNode when standing at `node`
  Seconds offset = 0;             // seconds driven along the edge
};

struct Vehicle {
  int id = 0;
  int capacity = 0;

  NodeIndex node = kNoNode;
  NodeIndex edge_head = kNoNode;
  Seconds edge_departed = 0;
  Seconds clock = 0;

  std::vector<RequestId> onboard;
  std::vector<RequestId> assigned;
  StopPlan plan;

  Seconds moving_time = 0;  // accumulated seconds in motion (VHT)

  bool idle() const { return onboard.empty() && assigned.empty(); }
  bool moving() const { return edge_head != kNoNode; }
};

enum class FleetEventKind : std::uint8_t { kPickup, kDropoff };

struct FleetEvent {
  Seconds time = 0;
  FleetEventKind kind = FleetEventKind::kPickup;
  RequestId request = -1;
  int vehicle = -1;
  int load = 0;  // seats occupied right after the event
};

Anchor planning_anchor(const Vehicle& vehicle, const RoadNetwork& network);
Position position(const Vehicle& vehicle);
// The node a vehicle is closest to: the tail until halfway along an edge,
// the head afterwards.
NodeIndex nearest_node(const Vehicle& vehicle, const RoadNetwork& network);

int seats_onboard(const Vehicle& vehicle, std::span<const Request> requests);

// Schedules `stops` along fastest paths from `anchor`. A pickup of a request
// whose request time lies in the future waits there until that time.
StopPlan schedule_stops(const Anchor& anchor, std::vector<Stop> stops, const RoadNetwork& network,
                        std::span<const Request> requests);

// Moves the vehicle along its plan up to `until`, executing pickups and
// dropoffs reached on the way. Artificial pickups are never executed: the
// vehicle holds at their origin. A vehicle mid-edge at `until` stays there.
void advance(Vehicle& vehicle, Seconds until, const RoadNetwork& network,
             std::span<Request> requests, std::vector<FleetEvent>* events);

// Free seats before the first stop and after each stop of `stops`, or
// nullopt when the capacity is exceeded somewhere along the way.
std::optional<std::vector<int>> seats_free_profile(int capacity, int onboard_seats,
                                                   std::span<const Stop> stops,
                                                   std::span<const Request> requests);
std::optional<std::vector<int>> seats_free_profile(const Vehicle& vehicle,
                                                   std::span<const Stop> stops,
                                                   std::span<const Request> requests);

enum class Placement : std::uint8_t { kExplicit, kUniform, kDemandWeighted };

struct FleetConfig {
  int count = 0;
  int capacity = 3;
  Placement placement = Placement::kDemandWeighted;
  std::vector<NodeId> initial_nodes;  // used with kExplicit
};

// `demand_weights` (per node index) drive kDemandWeighted placement; they may
// be empty, which falls back to uniform.
std::vector<Vehicle> place_fleet(const FleetConfig& config, const RoadNetwork& network,
                                 std::uint64_t seed, std::span<const double> demand_weights);

}  // namespace ridepool
