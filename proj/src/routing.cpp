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

#include "ridepool/routing.hpp"

#include <algorithm>
#include <limits>

namespace ridepool {

RoutingContext make_routing_context(const Vehicle& vehicle, const RoadNetwork& network,
                                    std::span<const Request> requests) {
  RoutingContext ctx;
  ctx.vehicle = vehicle.id;
  ctx.capacity = vehicle.capacity;
  ctx.anchor = planning_anchor(vehicle, network);
  ctx.onboard = vehicle.onboard;
  ctx.assigned = vehicle.assigned;
  std::sort(ctx.onboard.begin(), ctx.onboard.end());
  std::sort(ctx.assigned.begin(), ctx.assigned.end());
  std::vector<Stop> stops;
  for (const Stop& s : vehicle.plan.stops) {
    if (s.action != StopAction::kRebalance) stops.push_back(s);
  }
  ctx.current = schedule_stops(ctx.anchor, std::move(stops), network, requests);
  return ctx;
}

namespace {

struct Item {
  RequestId id = -1;
  NodeIndex origin = kNoNode;
  NodeIndex destination = kNoNode;
  Seconds request_time = 0;
  Seconds direct = 0;
  int party = 1;
  bool onboard = false;
  bool in_trip = false;
  Seconds old_pickup = 0;
  Seconds old_dropoff = 0;
};

constexpr double kSecondsPerHour = 3600.0;

class RouteProblem {
 public:
  RouteProblem(const RoutingContext& ctx, std::span<const RequestId> trip,
               const Constraints& constraints, const CostParams& params,
               const RoadNetwork& network, std::span<const Request> requests)
      : ctx_(ctx), constraints_(constraints), params_(params), network_(network),
        requests_(requests) {
    auto add = [&](RequestId id, bool onboard, bool in_trip) {
      const Request& r = requests_[static_cast<std::size_t>(id)];
      Item it;
      it.id = id;
      it.origin = r.origin;
      it.destination = r.destination;
      it.request_time = r.request_time;
      it.direct = network_.travel_time(r.origin, r.destination);
      it.party = r.party_size;
      it.onboard = onboard;
      it.in_trip = in_trip;
      if (onboard) it.old_pickup = r.pickup_time;
      for (const Stop& s : ctx_.current.stops) {
        if (s.request != id) continue;
        if (s.action == StopAction::kPickup) it.old_pickup = s.scheduled;
        if (s.action == StopAction::kDropoff) it.old_dropoff = s.scheduled;
      }
      items_.push_back(it);
    };
    for (RequestId id : ctx_.onboard) add(id, true, false);
    for (RequestId id : ctx_.assigned) add(id, false, false);
    for (RequestId id : trip) add(id, false, true);
    std::sort(items_.begin(), items_.end(),
              [](const Item& a, const Item& b) { return a.id < b.id; });
    for (const Item& it : items_) {
      if (it.onboard) onboard_seats_ += it.party;
    }
  }

  std::size_t size() const { return items_.size(); }

  // Anticipatory cost is the search objective.
  struct Scored {
    StopPlan plan;
    double base = 0.0;
    double reward = 0.0;
    double anticipatory = 0.0;
  };

  std::optional<Scored> exhaustive() {
    const std::size_t k = items_.size();
    state_.assign(k, 0);
    pickup_.assign(k, 0);
    dropoff_.assign(k, 0);
    for (std::size_t i = 0; i < k; ++i) {
      if (items_[i].onboard) {
        state_[i] = 1;
        pickup_[i] = items_[i].old_pickup;
      }
    }
    path_.clear();
    best_.reset();
    std::size_t remaining = 0;
    for (std::size_t i = 0; i < k; ++i) remaining += items_[i].onboard ? 1 : 2;
    search(ctx_.anchor.node, ctx_.anchor.time, onboard_seats_, 0, remaining);
    return std::move(best_);
  }

  std::optional<Scored> insertion() {
    std::vector<Stop> order = ctx_.current.stops;
    std::optional<Scored> result = score_order(order);
    if (!result) return std::nullopt;
    for (const Item& it : items_) {
      if (!it.in_trip) continue;
      std::optional<Scored> best;
      std::vector<Stop> best_order;
      const std::size_t n = order.size();
      for (std::size_t i = 0; i <= n; ++i) {
        for (std::size_t j = i; j <= n; ++j) {
          std::vector<Stop> trial;
          trial.reserve(n + 2);
          for (std::size_t q = 0; q <= n; ++q) {
            if (q == i) trial.push_back({it.origin, StopAction::kPickup, it.id, 0});
            if (q == j) trial.push_back({it.destination, StopAction::kDropoff, it.id, 0});
            if (q < n) trial.push_back(order[q]);
          }
          auto scored = score_order(trial);
          if (scored && (!best || scored->anticipatory < best->anticipatory)) {
            best = std::move(scored);
            best_order = std::move(trial);
          }
        }
      }
      if (!best) return std::nullopt;
      order = std::move(best_order);
      result = std::move(best);
    }
    return result;
  }

  // Schedules, checks and prices one stop order covering only the requests
  // currently in `order`.
  std::optional<Scored> score_order(const std::vector<Stop>& order) const {
    StopPlan plan = schedule_stops(ctx_.anchor, order, network_, requests_);
    const auto free = seats_free_profile(ctx_.capacity, onboard_seats_, plan.stops, requests_);
    if (!free) return std::nullopt;
    if (constraints_.fifo) {
      Seconds last = std::numeric_limits<Seconds>::min();
      for (const Stop& s : plan.stops) {
        if (s.action != StopAction::kPickup) continue;
        const Seconds tr = requests_[static_cast<std::size_t>(s.request)].request_time;
        if (tr < last) return std::nullopt;
        last = tr;
      }
    }
    for (const Stop& s : plan.stops) {
      const Item& it = item(s.request);
      if (s.action == StopAction::kPickup && s.scheduled - it.request_time > constraints_.max_wait) {
        return std::nullopt;
      }
      if (s.action == StopAction::kDropoff &&
          s.scheduled - it.request_time - it.direct > constraints_.max_delay) {
        return std::nullopt;
      }
    }
    return price(std::move(plan));
  }

  Scored price(StopPlan plan) const {
    Scored s;
    s.base = base_cost_of(plan);
    if (params_.reward_rate != nullptr) {
      s.reward = reward(ctx_, plan, *params_.reward_rate, params_.reward_node, requests_);
    }
    s.anticipatory = params_.theta != 0.0 ? s.base - params_.theta * s.reward : s.base;
    s.plan = std::move(plan);
    return s;
  }

  double base_cost_of(const StopPlan& plan) const {
    std::vector<Seconds> pick(items_.size(), -1);
    std::vector<Seconds> drop(items_.size(), -1);
    for (const Stop& s : plan.stops) {
      const std::size_t i = index(s.request);
      if (i == items_.size()) continue;
      (s.action == StopAction::kPickup ? pick : drop)[i] = s.scheduled;
    }
    Seconds wait = 0;
    Seconds detour = 0;
    for (std::size_t i = 0; i < items_.size(); ++i) {
      const Item& it = items_[i];
      if (drop[i] < 0) continue;  // not part of this (partial) order
      if (it.onboard) {
        detour += drop[i] - it.old_dropoff;
      } else if (it.in_trip) {
        wait += pick[i] - it.request_time;
        detour += (drop[i] - pick[i]) - it.direct;
      } else {
        wait += pick[i] - it.old_pickup;
        detour += (drop[i] - pick[i]) - (it.old_dropoff - it.old_pickup);
      }
    }
    const Seconds extra_length = plan.total_length - ctx_.current.total_length;
    return (params_.wait_price * static_cast<double>(wait) +
            params_.ride_price * static_cast<double>(detour) +
            params_.operator_price * static_cast<double>(extra_length)) /
           kSecondsPerHour;
  }

 private:
  const Item& item(RequestId id) const { return items_[index(id)]; }
  std::size_t index(RequestId id) const {
    auto it = std::lower_bound(items_.begin(), items_.end(), id,
                               [](const Item& a, RequestId b) { return a.id < b; });
    if (it == items_.end() || it->id != id) return items_.size();
    return static_cast<std::size_t>(it - items_.begin());
  }

  // Depth-first enumeration of stop orders in lexicographic (request id)
  // order, pruning on capacity and on bounds that can no longer be met.
  void search(NodeIndex at, Seconds now, int load, Seconds driven, std::size_t remaining) {
    if (remaining == 0) {
      leaf(driven);
      return;
    }
    for (std::size_t i = 0; i < items_.size(); ++i) {
      const Item& it = items_[i];
      if (state_[i] == 0) {
        const Seconds reach = now + network_.travel_time(at, it.origin);
        if (std::max(reach, it.request_time) - it.request_time > constraints_.max_wait) return;
      } else if (state_[i] == 1) {
        const Seconds reach = now + network_.travel_time(at, it.destination);
        if (reach - it.request_time - it.direct > constraints_.max_delay) return;
      }
    }
    for (std::size_t i = 0; i < items_.size(); ++i) {
      const Item& it = items_[i];
      if (state_[i] == 0) {
        if (load + it.party > ctx_.capacity) continue;
        if (constraints_.fifo && !fifo_ok(i)) continue;
        const Seconds leg = network_.travel_time(at, it.origin);
        const Seconds t = std::max(now + leg, it.request_time);
        state_[i] = 1;
        pickup_[i] = t;
        path_.push_back({it.origin, StopAction::kPickup, it.id, t});
        search(it.origin, t, load + it.party, driven + leg, remaining - 1);
        path_.pop_back();
        state_[i] = 0;
      } else if (state_[i] == 1) {
        const Seconds leg = network_.travel_time(at, it.destination);
        const Seconds t = now + leg;
        if (t - it.request_time - it.direct > constraints_.max_delay) continue;
        state_[i] = 2;
        dropoff_[i] = t;
        path_.push_back({it.destination, StopAction::kDropoff, it.id, t});
        search(it.destination, t, load - it.party, driven + leg, remaining - 1);
        path_.pop_back();
        state_[i] = 1;
      }
    }
  }

  bool fifo_ok(std::size_t i) const {
    for (std::size_t j = 0; j < items_.size(); ++j) {
      if (j != i && state_[j] == 0 && items_[j].request_time < items_[i].request_time) return false;
    }
    return true;
  }

  void leaf(Seconds driven) {
    StopPlan plan;
    plan.stops = path_;
    plan.total_length = driven;
    Scored s = price(std::move(plan));
    if (!best_ || s.anticipatory < best_->anticipatory) best_ = std::move(s);
  }

  const RoutingContext& ctx_;
  const Constraints& constraints_;
  const CostParams& params_;
  const RoadNetwork& network_;
  std::span<const Request> requests_;
  std::vector<Item> items_;
  int onboard_seats_ = 0;

  std::vector<int> state_;  // 0 awaiting pickup, 1 onboard, 2 delivered
  std::vector<Seconds> pickup_;
  std::vector<Seconds> dropoff_;
  std::vector<Stop> path_;
  std::optional<Scored> best_;
};

}  // namespace

std::optional<RoutedMatch> best_route(const RoutingContext& context,
                                      std::span<const RequestId> trip,
                                      const Constraints& constraints, const CostParams& params,
                                      const RoadNetwork& network,
                                      std::span<const Request> requests) {
  RouteProblem problem(context, trip, constraints, params, network, requests);
  auto scored = problem.size() <= kExhaustiveRouteLimit ? problem.exhaustive() : problem.insertion();
  if (!scored) return std::nullopt;
  RoutedMatch match;
  match.vehicle = context.vehicle;
  match.trip.assign(trip.begin(), trip.end());
  std::sort(match.trip.begin(), match.trip.end());
  match.route = std::move(scored->plan);
  match.base_cost = scored->base;
  match.reward = scored->reward;
  match.anticipatory_cost = scored->anticipatory;
  return match;
}

double base_cost(const RoutingContext& context, std::span<const RequestId> trip,
                 const StopPlan& route, const CostParams& params, const RoadNetwork& network,
                 std::span<const Request> requests) {
  Constraints unused;
  RouteProblem problem(context, trip, unused, params, network, requests);
  return problem.base_cost_of(route);
}

std::optional<std::size_t> idle_stop(const RoutingContext& context, const StopPlan& route,
                                     std::span<const Request> requests) {
  int seats = 0;
  for (RequestId id : context.onboard) seats += requests[static_cast<std::size_t>(id)].party_size;
  const auto free = seats_free_profile(context.capacity, seats, route.stops, requests);
  if (!free || route.stops.empty()) return std::nullopt;
  // free[j + 1] is the number of free seats after stop j.
  std::size_t idle = 0;
  for (std::size_t j = 0; j < route.stops.size(); ++j) {
    if ((*free)[j + 1] <= 0) idle = j + 1;
  }
  return std::min(idle, route.stops.size() - 1);
}

double reward(const RoutingContext& context, const StopPlan& route, const RateField& field,
              RewardNode mode, std::span<const Request> requests) {
  if (route.stops.empty()) return field.at(context.anchor.node);
  if (mode == RewardNode::kLastNode) return field.at(route.stops.back().node);
  const auto idle = idle_stop(context, route, requests);
  return field.at(route.stops[idle.value_or(route.stops.size() - 1)].node);
}

bool route_satisfies_constraints(const RoutingContext& context, std::span<const RequestId> trip,
                                 const StopPlan& route, const Constraints& constraints,
                                 const RoadNetwork& network, std::span<const Request> requests) {
  std::vector<RequestId> must_pick(context.assigned.begin(), context.assigned.end());
  must_pick.insert(must_pick.end(), trip.begin(), trip.end());
  std::vector<RequestId> riding(context.onboard.begin(), context.onboard.end());
  int seats = 0;
  for (RequestId id : riding) seats += requests[static_cast<std::size_t>(id)].party_size;

  NodeIndex at = context.anchor.node;
  Seconds now = context.anchor.time;
  std::size_t delivered = 0;
  for (const Stop& s : route.stops) {
    now += network.travel_time(at, s.node);
    at = s.node;
    if (s.action == StopAction::kRebalance) continue;
    const Request& r = requests[static_cast<std::size_t>(s.request)];
    if (s.node != (s.action == StopAction::kPickup ? r.origin : r.destination)) return false;
    if (s.action == StopAction::kPickup) {
      auto it = std::find(must_pick.begin(), must_pick.end(), s.request);
      if (it == must_pick.end()) return false;
      must_pick.erase(it);
      now = std::max(now, r.request_time);
      if (now - r.request_time > constraints.max_wait) return false;
      seats += r.party_size;
      if (seats > context.capacity) return false;
      riding.push_back(s.request);
    } else {
      auto it = std::find(riding.begin(), riding.end(), s.request);
      if (it == riding.end()) return false;
      riding.erase(it);
      seats -= r.party_size;
      if (now - r.request_time - network.travel_time(r.origin, r.destination) > constraints.max_delay) {
        return false;
      }
      ++delivered;
    }
    if (s.scheduled != now) return false;
  }
  return must_pick.empty() && riding.empty() &&
         delivered == context.onboard.size() + context.assigned.size() + trip.size();
}

}  // namespace ridepool
