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

#include <optional>
#include <span>
#include <vector>

#include "ridepool/demand.hpp"
#include "ridepool/fleet.hpp"
#include "ridepool/network.hpp"
#include "ridepool/rates.hpp"

namespace ridepool {

// Service-quality constraints. Delay is (dropoff - request time) minus the
// direct travel time, i.e. waiting plus detour.
struct Constraints {
  Seconds max_wait = 420;
  Seconds max_delay = 600;
  bool fifo = false;  // pickups in request-time order
};

enum class RewardNode : std::uint8_t { kLastNode, kIdleNode };

// Prices are per hour of waiting, riding and driving; the rejection penalty is
// per request.
struct CostParams {
  double wait_price = 4.64;
  double ride_price = 2.32;
  double operator_price = 3.48;
  double reject_penalty = 3.09;
  double theta = 0.0;  // reward weight
  RewardNode reward_node = RewardNode::kLastNode;
  const RateField* reward_rate = nullptr;  // no rewards when null
};

// Everything routing needs to know about one vehicle at a decision instant.
// `current` is the vehicle's plan for onboard and assigned requests,
// scheduled from `anchor`.
struct RoutingContext {
  int vehicle = -1;
  int capacity = 0;
  Anchor anchor;
  std::vector<RequestId> onboard;
  std::vector<RequestId> assigned;
  StopPlan current;
};

// Snapshot of `vehicle`; rebalance targets are dropped from the plan.
RoutingContext make_routing_context(const Vehicle& vehicle, const RoadNetwork& network,
                                    std::span<const Request> requests);

struct RoutedMatch {
  int vehicle = -1;
  std::vector<RequestId> trip;  // sorted ascending
  StopPlan route;
  double base_cost = 0.0;
  double reward = 0.0;
  double anticipatory_cost = 0.0;  // base_cost - theta * reward
};

// Requests served exhaustively up to this many (onboard + assigned + trip);
// best insertion beyond.
inline constexpr std::size_t kExhaustiveRouteLimit = 4;

// Cheapest route (by anticipatory cost) serving the trip plus everything the
// vehicle already carries or is assigned, or nullopt if none satisfies the
// constraints. Ties go to the lexicographically smallest stop sequence keyed
// by (request id, pickup before dropoff).
std::optional<RoutedMatch> best_route(const RoutingContext& context,
                                      std::span<const RequestId> trip,
                                      const Constraints& constraints, const CostParams& params,
                                      const RoadNetwork& network,
                                      std::span<const Request> requests);

// Waiting and detour of the trip's requests, the change in waiting and detour
// of requests already served by the vehicle, and the change in driven length,
// priced per hour.
double base_cost(const RoutingContext& context, std::span<const RequestId> trip,
                 const StopPlan& route, const CostParams& params, const RoadNetwork& network,
                 std::span<const Request> requests);

// Index into route.stops of the idle node: the first stop after which the
// vehicle keeps at least one free seat through the end of the route.
std::optional<std::size_t> idle_stop(const RoutingContext& context, const StopPlan& route,
                                     std::span<const Request> requests);

double reward(const RoutingContext& context, const StopPlan& route, const RateField& field,
              RewardNode mode, std::span<const Request> requests);

// Post-hoc check of a route: every onboard, assigned and trip request is
// served once, pickups precede dropoffs, capacity holds on every leg and every
// waiting/delay bound is met under the route's own schedule.
bool route_satisfies_constraints(const RoutingContext& context, std::span<const RequestId> trip,
                                 const StopPlan& route, const Constraints& constraints,
                                 const RoadNetwork& network, std::span<const Request> requests);

}  // namespace ridepool
