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

#include "ridepool/anticipatory.hpp"

#include <algorithm>
#include <cmath>

#include "ridepool/errors.hpp"

namespace ridepool {

std::vector<Request> make_artificial(const RateField& generation, const ArtificialConfig& config,
                                     Seconds now, const RoadNetwork& network, RequestId first_id,
                                     std::mt19937_64& rng) {
  if (config.count < 0 || config.spacing <= 0) throw InputError("invalid artificial request config");
  std::vector<Request> out;
  if (config.count == 0 || network.node_count() < 2) return out;
  if (!(generation.total() > 0)) return out;

  std::discrete_distribution<std::size_t> pick_origin(generation.values.begin(),
                                                      generation.values.end());
  const auto n = static_cast<NodeIndex>(network.node_count());
  const double target = static_cast<double>(config.length_target);
  std::vector<NodeIndex> band;
  for (int k = 1; k <= config.count; ++k) {
    const auto origin = static_cast<NodeIndex>(pick_origin(rng));
    double width = config.length_band > 0 ? config.length_band : 0.2;
    band.clear();
    for (;;) {
      const double lo = target * (1.0 - width);
      const double hi = target * (1.0 + width);
      for (NodeIndex w = 0; w < n; ++w) {
        if (w == origin) continue;
        const auto t = static_cast<double>(network.travel_time(origin, w));
        if (t >= lo && t <= hi) band.push_back(w);
      }
      if (!band.empty()) break;
      width *= 2.0;
      if (width > 1e6) {  // target unusable; fall back to every other node
        for (NodeIndex w = 0; w < n; ++w) {
          if (w != origin) band.push_back(w);
        }
        break;
      }
    }
    std::uniform_int_distribution<std::size_t> pick_dest(0, band.size() - 1);

    Request r;
    r.id = first_id + k - 1;
    r.origin = origin;
    r.destination = band[pick_dest(rng)];
    r.request_time = now + static_cast<Seconds>(k) * config.spacing;
    r.artificial = true;
    out.push_back(r);
  }
  return out;
}

void strip_artificial(Vehicle& vehicle, const RoadNetwork& network,
                      std::span<const Request> requests) {
  auto is_artificial = [&](RequestId id) {
    return id >= 0 && requests[static_cast<std::size_t>(id)].artificial;
  };
  const bool any = std::any_of(vehicle.plan.stops.begin(), vehicle.plan.stops.end(),
                               [&](const Stop& s) { return is_artificial(s.request); }) ||
                   std::any_of(vehicle.assigned.begin(), vehicle.assigned.end(), is_artificial);
  if (!any) return;
  std::erase_if(vehicle.assigned, is_artificial);
  std::vector<Stop> kept;
  for (const Stop& s : vehicle.plan.stops) {
    if (!is_artificial(s.request)) kept.push_back(s);
  }
  vehicle.plan = schedule_stops(planning_anchor(vehicle, network), std::move(kept), network, requests);
}

void TripLengthTracker::add(Seconds request_time, Seconds direct_time) {
  recent_.emplace_back(request_time, direct_time);
  sum_ += direct_time;
}

Seconds TripLengthTracker::target(Seconds now) {
  while (!recent_.empty() && recent_.front().first <= now - window_) {
    sum_ -= recent_.front().second;
    recent_.pop_front();
  }
  if (recent_.empty()) return fallback_;
  return static_cast<Seconds>(std::llround(static_cast<double>(sum_) /
                                           static_cast<double>(recent_.size())));
}

}  // namespace ridepool
