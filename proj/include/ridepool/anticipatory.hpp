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

#include <deque>
#include <random>
#include <span>
#include <vector>

#include "ridepool/demand.hpp"
#include "ridepool/fleet.hpp"
#include "ridepool/network.hpp"
#include "ridepool/rates.hpp"

namespace ridepool {

struct ArtificialConfig {
  int count = 50;                     // m, per stage
  Seconds spacing = 60;               // phi
  double penalty_ratio = 0.0;         // Gamma; 0 disables injection
  Seconds length_target = 0;          // mean direct time of recent real trips
  double length_band = 0.2;           // relative half-width of the destination band
};

// `count` future requests with times now + k * spacing (k = 1..count), origins
// drawn in proportion to the rate field and destinations uniform among nodes
// whose travel time from the origin is within the length band (doubled until
// some node qualifies). Ids start at `first_id`. Empty when the field has no
// mass.
std::vector<Request> make_artificial(const RateField& generation, const ArtificialConfig& config,
                                     Seconds now, const RoadNetwork& network, RequestId first_id,
                                     std::mt19937_64& rng);

// Drops artificial stops and assignments and reschedules what is left from
// the vehicle's current anchor.
void strip_artificial(Vehicle& vehicle, const RoadNetwork& network,
                      std::span<const Request> requests);

// Mean direct travel time of real requests that emerged within the last
// `window` seconds; `fallback` when there were none.
class TripLengthTracker {
 public:
  TripLengthTracker(Seconds window, Seconds fallback) : window_(window), fallback_(fallback) {}

  void add(Seconds request_time, Seconds direct_time);
  Seconds target(Seconds now);

 private:
  Seconds window_;
  Seconds fallback_;
  std::deque<std::pair<Seconds, Seconds>> recent_;
  Seconds sum_ = 0;
};

}  // namespace ridepool
