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

#include <filesystem>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "ridepool/routing.hpp"

namespace ridepool {

// Feasible (vehicle, trip) matches, sorted by vehicle, trip size and trip.
struct CandidateSet {
  std::vector<RoutedMatch> entries;
};

struct Assignment {
  std::vector<RoutedMatch> chosen;  // sorted by vehicle
  std::vector<RequestId> rejected;  // sorted ascending
  double objective = 0.0;
};

struct EnumerationParams {
  Constraints constraints;
  CostParams cost;
  double keep_fraction = 1.0;  // share of vehicles kept per request
  int max_trip_size = 0;       // 0: vehicle capacity
  int workers = 1;
};

// Size-1 matches first, then trips of size k+1 for a vehicle only when all of
// their size-k subsets were feasible for it. `vehicles` are indexed by their
// position; RoutedMatch::vehicle carries RoutingContext::vehicle.
CandidateSet enumerate_candidates(std::span<const RequestId> waiting,
                                  std::span<const RoutingContext> vehicles,
                                  const EnumerationParams& params, const RoadNetwork& network,
                                  std::span<const Request> requests);

// For each request keeps the ceil(keep_fraction * n) cheapest of its n
// single-request matches; larger trips that use a dropped (request, vehicle)
// pair go as well.
CandidateSet prune_costly(const CandidateSet& candidates, double keep_fraction);

// Exact optimum of the set-partitioning program: every waiting request is in
// exactly one chosen trip or rejected at its penalty, each vehicle serves at
// most one trip. `penalty` is aligned with `waiting`.
Assignment solve_assignment(const CandidateSet& candidates, std::span<const RequestId> waiting,
                            std::span<const double> penalty);

// Objective summed in a fixed order: chosen costs by vehicle, then penalties
// by request id.
double assignment_objective(std::span<const RoutedMatch> chosen,
                            std::span<const RequestId> rejected, std::span<const RequestId> waiting,
                            std::span<const double> penalty);

// Min-cost one-to-one matching of rows to columns (rectangular; the smaller
// side is fully matched). Returns column per row, -1 when unmatched.
std::vector<int> min_cost_matching(const std::vector<std::vector<Seconds>>& cost);

struct RebalanceMove {
  int vehicle = -1;  // position in the idle list
  NodeIndex target = kNoNode;
};

// Matches idle vehicle anchors to rejected origins by total travel time.
std::vector<RebalanceMove> rebalance(std::span<const Anchor> idle_vehicles,
                                     std::span<const NodeIndex> rejected_origins,
                                     const RoadNetwork& network);

// Text export of the assignment program:
//   CAND <vehicle> <cost> <request ids...>
//   REJ <request> <penalty>
void write_program(std::ostream& out, const CandidateSet& candidates,
                   std::span<const RequestId> waiting, std::span<const double> penalty);

struct ProgramText {
  CandidateSet candidates;
  std::vector<RequestId> waiting;
  std::vector<double> penalty;
};
ProgramText read_program(std::istream& in);

}  // namespace ridepool
