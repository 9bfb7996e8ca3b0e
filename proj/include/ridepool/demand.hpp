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
#include <optional>
#include <string_view>
#include <vector>

#include "ridepool/network.hpp"

namespace ridepool {

using RequestId = std::int32_t;

enum class RequestStatus : std::uint8_t {
  kEmerged,
  kWaitingAssignment,
  kAssigned,
  kOnboard,
  kCompleted,
  kRejected,
};

std::string_view to_string(RequestStatus status);

// Lifecycle: emerged -> waiting -> {assigned <-> waiting} -> onboard ->
// completed, or waiting -> rejected. Artificial requests never board.
bool transition_allowed(RequestStatus from, RequestStatus to, bool artificial);

struct Request {
  RequestId id = -1;
  NodeIndex origin = kNoNode;
  NodeIndex destination = kNoNode;
  Seconds request_time = 0;
  int party_size = 1;
  RequestStatus status = RequestStatus::kEmerged;
  bool artificial = false;
  Seconds pickup_time = -1;
  Seconds dropoff_time = -1;

  // Throws std::logic_error on a transition the lifecycle forbids.
  void set_status(RequestStatus next);
};

struct DemandTrace {
  std::vector<Request> requests;  // sorted by request_time; id == position
  Seconds period = 0;             // PO
};

// Trace CSV with header `time_s,origin,destination,party`. Rows are validated
// against `network` (ValidationError names the offending row) and returned
// sorted by time. `period` defaults to the last request time.
DemandTrace load_trace(const std::filesystem::path& path, const RoadNetwork& network,
                       std::optional<Seconds> period = std::nullopt);
void write_trace(const DemandTrace& trace, const RoadNetwork& network,
                 const std::filesystem::path& path);

// One trace per `*.csv` file in `dir`, in file-name order.
std::vector<DemandTrace> load_historical(const std::filesystem::path& dir,
                                         const RoadNetwork& network, Seconds period);

struct DemandProfile {
  std::vector<double> origin_weights;       // per node index
  std::vector<double> destination_weights;  // per node index
  int count = 0;
  Seconds period = 0;
};

// Deterministic in `seed`. Request times are uniform integers on [0, period];
// origin and destination are drawn from the weights with origin != destination.
// Throws InputError when the weights admit no request.
DemandTrace generate_synthetic(const DemandProfile& profile, std::uint64_t seed);

// Origins spread over the nodes farthest from `center`, every destination at
// `center`.
DemandProfile circular_profile(const RoadNetwork& network, NodeIndex center, int count,
                               Seconds period);

// Splits the nodes at the median x coordinate. The west half receives
// `hot_origin_share` of the origin mass and `hot_destination_share` of the
// destination mass, spread evenly over its nodes.
DemandProfile two_zone_profile(const RoadNetwork& network, double hot_origin_share,
                               double hot_destination_share, int count, Seconds period);

DemandProfile uniform_profile(const RoadNetwork& network, int count, Seconds period);

}  // namespace ridepool
