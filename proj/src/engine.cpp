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

#include "ridepool/engine.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "ridepool/errors.hpp"

namespace ridepool {

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::kNone: return "none";
    case Mode::kRewards: return "rewards";
    case Mode::kArtificial: return "artificial";
    case Mode::kBoth: return "both";
  }
  return "?";
}

std::optional<Mode> parse_mode(std::string_view text) {
  if (text == "none") return Mode::kNone;
  if (text == "rewards") return Mode::kRewards;
  if (text == "artificial") return Mode::kArtificial;
  if (text == "both") return Mode::kBoth;
  return std::nullopt;
}

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::kPickup: return "pickup";
    case EventKind::kDropoff: return "dropoff";
    case EventKind::kReject: return "reject";
  }
  return "?";
}

void SimConfig::validate() const {
  if (interval <= 0) throw InputError("decision interval must be positive");
  if (horizon < 0 || horizon % interval != 0) {
    throw InputError("horizon must be a nonnegative multiple of the decision interval");
  }
  if (constraints.max_wait <= 0 || constraints.max_delay <= 0) {
    throw InputError("waiting and delay bounds must be positive");
  }
  if (prices.wait_price < 0 || prices.ride_price < 0 || prices.operator_price < 0 ||
      prices.reject_penalty < 0) {
    throw InputError("prices must be nonnegative");
  }
  if (theta < 0) throw InputError("theta must be nonnegative");
  const bool rewards = mode == Mode::kRewards || mode == Mode::kBoth;
  const bool injecting = mode == Mode::kArtificial || mode == Mode::kBoth;
  if (!rewards && theta != 0) throw InputError("theta is set but rewards are not enabled");
  if (!injecting && artificial.penalty_ratio != 0) {
    throw InputError("gamma is set but artificial requests are not enabled");
  }
  if (artificial.penalty_ratio < 0 || artificial.penalty_ratio >= 1) {
    throw InputError("gamma must lie in [0, 1)");
  }
  if (artificial.count < 0 || artificial.spacing <= 0) {
    throw InputError("artificial requests need m >= 0 and phi > 0");
  }
  if (artificial_active() && artificial_rates.kind != RateKind::kGeneration) {
    throw InputError("artificial origins are drawn from generation rates");
  }
  auto fraction_ok = [](double f) { return f > 0 && f <= 1; };
  if (!fraction_ok(keep_fraction) || !fraction_ok(artificial_keep_fraction)) {
    throw InputError("keep fractions must lie in (0, 1]");
  }
  if (max_trip_size < 0) throw InputError("max trip size must be nonnegative");
  if (zone_radius <= 0) throw InputError("zone radius must be positive");
  if (workers < 1) throw InputError("worker count must be at least 1");
  if (length_window <= 0) throw InputError("length window must be positive");
}

bool SimConfig::rewards_active() const {
  return (mode == Mode::kRewards || mode == Mode::kBoth) && theta != 0;
}

bool SimConfig::artificial_active() const {
  return (mode == Mode::kArtificial || mode == Mode::kBoth) && artificial.penalty_ratio > 0 &&
         artificial.count > 0;
}

MismatchResult zone_mismatch(std::span<const NodeIndex> vehicle_nodes,
                             std::span<const NodeIndex> origins, const ZonePartition& zones) {
  const auto z = static_cast<std::size_t>(zones.zone_count());
  MismatchResult out;
  out.vehicle_share.assign(z, 0.0);
  out.request_share.assign(z, 0.0);
  out.mismatch.assign(z, 0.0);
  for (NodeIndex u : vehicle_nodes) {
    out.vehicle_share[static_cast<std::size_t>(zones.zone_of[static_cast<std::size_t>(u)])] += 1.0;
  }
  for (NodeIndex u : origins) {
    out.request_share[static_cast<std::size_t>(zones.zone_of[static_cast<std::size_t>(u)])] += 1.0;
  }
  if (!vehicle_nodes.empty()) {
    for (double& v : out.vehicle_share) v /= static_cast<double>(vehicle_nodes.size());
  }
  out.no_requests = origins.empty();
  if (!origins.empty()) {
    for (double& r : out.request_share) r /= static_cast<double>(origins.size());
  }
  for (std::size_t k = 0; k < z; ++k) {
    out.mismatch[k] = std::abs(out.vehicle_share[k] - out.request_share[k]);
  }
  if (z > 0) {
    double sum = 0.0;
    for (double m : out.mismatch) sum += m;
    out.mean = sum / static_cast<double>(z);
    std::vector<double> sorted = out.mismatch;
    std::sort(sorted.begin(), sorted.end());
    out.median = z % 2 ? sorted[z / 2] : 0.5 * (sorted[z / 2 - 1] + sorted[z / 2]);
  }
  return out;
}

AuditResult audit_events(std::span<const EventRecord> events, const Constraints& constraints,
                         int capacity) {
  AuditResult out;
  std::map<RequestId, Seconds> picked;
  std::map<RequestId, bool> finished;
  for (const EventRecord& e : events) {
    if (e.kind == EventKind::kReject) {
      if (picked.count(e.request) || finished.count(e.request)) ++out.order_violations;
      finished[e.request] = true;
      continue;
    }
    if (e.load < 0 || e.load > capacity) ++out.capacity_violations;
    if (e.kind == EventKind::kPickup) {
      if (picked.count(e.request) || finished.count(e.request)) ++out.order_violations;
      picked[e.request] = e.time;
      if (e.time - e.request_time > constraints.max_wait) ++out.wait_violations;
    } else {
      if (!picked.count(e.request) || finished.count(e.request)) ++out.order_violations;
      finished[e.request] = true;
      ++out.served;
      if (e.time - e.request_time - e.direct_time > constraints.max_delay) ++out.delay_violations;
    }
  }
  return out;
}

namespace {

Seconds mean_direct_time(const DemandTrace& trace, const RoadNetwork& network) {
  if (trace.requests.empty()) return 0;
  Seconds sum = 0;
  for (const Request& r : trace.requests) sum += network.travel_time(r.origin, r.destination);
  return static_cast<Seconds>(std::llround(static_cast<double>(sum) /
                                           static_cast<double>(trace.requests.size())));
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

}  // namespace

Simulation::Simulation(const RoadNetwork& network, const DemandTrace& trace,
                       std::vector<DemandTrace> history, std::vector<Vehicle> fleet,
                       SimConfig config)
    : network_(network), config_(std::move(config)), history_(std::move(history)),
      requests_(trace.requests), vehicles_(std::move(fleet)),
      lengths_(config_.length_window, mean_direct_time(trace, network)),
      artificial_rng_(derive_seed(config_.seed, 3)) {
  config_.validate();
  zones_ = cluster_zones(network_, config_.zone_radius);
  real_count_ = requests_.size();
  for (std::size_t i = 0; i < requests_.size(); ++i) {
    Request& r = requests_[i];
    if (r.id != static_cast<RequestId>(i)) throw InputError("trace request ids must equal positions");
    if (i > 0 && r.request_time < requests_[i - 1].request_time) {
      throw InputError("trace must be sorted by request time");
    }
    r.status = RequestStatus::kEmerged;
    r.artificial = false;
    r.pickup_time = r.dropoff_time = -1;
  }
  for (std::size_t i = 0; i < vehicles_.size(); ++i) {
    if (vehicles_[i].id != static_cast<int>(i)) throw InputError("vehicle ids must equal positions");
    if (vehicles_[i].node < 0 || static_cast<std::size_t>(vehicles_[i].node) >= network_.node_count()) {
      throw InputError("vehicle placed on an unknown node");
    }
  }
  if (config_.rewards_active()) {
    reward_estimator_.emplace(network_, &zones_, config_.reward_rates, history_,
                              derive_seed(config_.seed, 1));
  }
  if (config_.artificial_active()) {
    artificial_estimator_.emplace(network_, &zones_, config_.artificial_rates, history_,
                                  derive_seed(config_.seed, 2));
  }
  stage_count_ = static_cast<int>(config_.horizon / config_.interval);
}

void Simulation::move_fleet(Seconds until, StageMetrics& metrics) {
  std::vector<FleetEvent> raw;
  for (Vehicle& v : vehicles_) {
    const Seconds before = v.moving_time;
    advance(v, until, network_, requests_, &raw);
    metrics.vht_increment += v.moving_time - before;
  }
  std::stable_sort(raw.begin(), raw.end(),
                   [](const FleetEvent& a, const FleetEvent& b) { return a.time < b.time; });
  Seconds wait = 0;
  Seconds detour = 0;
  for (const FleetEvent& e : raw) {
    const Request& r = requests_[static_cast<std::size_t>(e.request)];
    const Seconds direct = network_.travel_time(r.origin, r.destination);
    EventRecord rec{e.time,  e.kind == FleetEventKind::kPickup ? EventKind::kPickup : EventKind::kDropoff,
                    e.request, e.vehicle, e.load, r.request_time, direct};
    events_.push_back(rec);
    if (e.kind == FleetEventKind::kPickup) {
      ++metrics.pickups;
      wait += e.time - r.request_time;
    } else {
      ++metrics.dropoffs;
      detour += e.time - r.pickup_time - direct;
    }
  }
  if (metrics.pickups) metrics.mean_wait = static_cast<double>(wait) / metrics.pickups;
  if (metrics.dropoffs) metrics.mean_detour = static_cast<double>(detour) / metrics.dropoffs;
  for (Vehicle& v : vehicles_) strip_artificial(v, network_, requests_);
}

void Simulation::release_reassignable() {
  for (Vehicle& v : vehicles_) {
    RequestId next = -1;
    for (const Stop& s : v.plan.stops) {
      if (s.action == StopAction::kPickup && !requests_[static_cast<std::size_t>(s.request)].artificial) {
        next = s.request;
        break;
      }
    }
    bool released = false;
    for (RequestId q : v.assigned) {
      if (q == next) continue;
      requests_[static_cast<std::size_t>(q)].set_status(RequestStatus::kWaitingAssignment);
      pending_.push_back(q);
      released = true;
    }
    if (!released) continue;
    v.assigned.clear();
    if (next >= 0) v.assigned.push_back(next);
    std::vector<Stop> kept;
    for (const Stop& s : v.plan.stops) {
      const bool keep = s.action == StopAction::kRebalance || s.request == next ||
                        std::find(v.onboard.begin(), v.onboard.end(), s.request) != v.onboard.end();
      if (keep) kept.push_back(s);
    }
    v.plan = schedule_stops(planning_anchor(v, network_), std::move(kept), network_, requests_);
  }
}

bool Simulation::step() {
  if (finished_ || stage_ >= stage_count_) return false;
  ++stage_;
  const Seconds previous = now_;
  const Seconds tau = static_cast<Seconds>(stage_) * config_.interval;

  StageMetrics m;
  m.time = tau;
  move_fleet(tau, m);
  now_ = tau;
  release_reassignable();

  std::vector<NodeIndex> new_origins;
  while (next_request_ < real_count_ && requests_[next_request_].request_time <= tau) {
    Request& r = requests_[next_request_];
    r.set_status(RequestStatus::kWaitingAssignment);
    pending_.push_back(r.id);
    new_origins.push_back(r.origin);
    lengths_.add(r.request_time, network_.travel_time(r.origin, r.destination));
    ++next_request_;
  }
  m.new_requests = static_cast<int>(new_origins.size());
  std::sort(pending_.begin(), pending_.end());

  CostParams cost = config_.prices;
  cost.theta = 0.0;
  cost.reward_rate = nullptr;
  cost.reward_node = config_.reward_node;
  RateField reward_field;
  if (reward_estimator_) {
    reward_field = reward_estimator_->update(previous, tau, new_origins, last_rejected_origins_);
    cost.theta = config_.theta;
    cost.reward_rate = &reward_field;
  }

  std::vector<RequestId> waiting = pending_;
  std::vector<double> penalty(waiting.size(), config_.prices.reject_penalty);
  if (artificial_estimator_) {
    const RateField field =
        artificial_estimator_->update(previous, tau, new_origins, last_rejected_origins_);
    ArtificialConfig ac = config_.artificial;
    ac.length_target = lengths_.target(tau);
    auto fresh = make_artificial(field, ac, tau, network_, static_cast<RequestId>(requests_.size()),
                                 artificial_rng_);
    for (Request& r : fresh) {
      r.set_status(RequestStatus::kWaitingAssignment);
      waiting.push_back(r.id);
      penalty.push_back(config_.artificial.penalty_ratio * config_.prices.reject_penalty);
      requests_.push_back(r);
    }
    m.artificial_injected = static_cast<int>(fresh.size());
  }

  std::vector<RoutingContext> contexts;
  contexts.reserve(vehicles_.size());
  for (const Vehicle& v : vehicles_) contexts.push_back(make_routing_context(v, network_, requests_));

  EnumerationParams params;
  params.constraints = config_.constraints;
  params.cost = cost;
  const bool tightened = config_.mode == Mode::kArtificial || config_.mode == Mode::kBoth;
  params.keep_fraction = tightened ? config_.artificial_keep_fraction : config_.keep_fraction;
  params.max_trip_size = config_.max_trip_size;
  params.workers = config_.workers;
  const CandidateSet candidates = enumerate_candidates(waiting, contexts, params, network_, requests_);
  const Assignment assignment = solve_assignment(candidates, waiting, penalty);
  m.candidates = static_cast<int>(candidates.entries.size());
  m.objective = assignment.objective;

  std::vector<bool> newly_assigned(vehicles_.size(), false);
  for (const RoutedMatch& match : assignment.chosen) {
    Vehicle& v = vehicles_[static_cast<std::size_t>(match.vehicle)];
    for (RequestId q : match.trip) {
      Request& r = requests_[static_cast<std::size_t>(q)];
      r.set_status(RequestStatus::kAssigned);
      v.assigned.push_back(q);
      if (r.artificial) {
        ++m.artificial_assigned;
      } else {
        ++m.assigned;
      }
    }
    v.plan = match.route;
    newly_assigned[static_cast<std::size_t>(match.vehicle)] = true;
  }
  std::vector<NodeIndex> rejected_origins;
  for (RequestId q : assignment.rejected) {
    Request& r = requests_[static_cast<std::size_t>(q)];
    r.set_status(RequestStatus::kRejected);
    if (r.artificial) {
      ++m.artificial_rejected;
      continue;
    }
    ++m.rejected;
    rejected_origins.push_back(r.origin);
    events_.push_back({tau, EventKind::kReject, q, -1, 0, r.request_time,
                       network_.travel_time(r.origin, r.destination)});
  }
  pending_.clear();
  accumulated_rejections_ += m.rejected;

  if (config_.rebalancing && !rejected_origins.empty()) {
    std::vector<std::size_t> idle;
    std::vector<Anchor> anchors;
    for (std::size_t i = 0; i < vehicles_.size(); ++i) {
      if (vehicles_[i].idle() && !newly_assigned[i]) {
        idle.push_back(i);
        anchors.push_back(planning_anchor(vehicles_[i], network_));
      }
    }
    for (const RebalanceMove& move : rebalance(anchors, rejected_origins, network_)) {
      Vehicle& v = vehicles_[idle[static_cast<std::size_t>(move.vehicle)]];
      v.plan = schedule_stops(anchors[static_cast<std::size_t>(move.vehicle)],
                              {Stop{move.target, StopAction::kRebalance, -1, 0}}, network_, requests_);
    }
  }

  std::vector<NodeIndex> vehicle_nodes;
  for (const Vehicle& v : vehicles_) vehicle_nodes.push_back(nearest_node(v, network_));
  const MismatchResult mm = zone_mismatch(vehicle_nodes, new_origins, zones_);
  m.vehicle_share = mm.vehicle_share;
  m.request_share = mm.request_share;
  m.mismatch_mean = mm.mean;
  m.mismatch_median = mm.median;
  m.accumulated_rejections = accumulated_rejections_;
  m.vht_total = (stages_.empty() ? 0 : stages_.back().vht_total) + m.vht_increment;
  stages_.push_back(std::move(m));
  last_rejected_origins_ = std::move(rejected_origins);
  last_stage_origins_ = std::move(new_origins);
  check_invariants();
  return true;
}

void Simulation::drain() {
  for (Vehicle& v : vehicles_) {
    const bool rebalancing = std::any_of(v.plan.stops.begin(), v.plan.stops.end(), [](const Stop& s) {
      return s.action == StopAction::kRebalance;
    });
    if (!rebalancing) continue;
    std::vector<Stop> kept;
    for (const Stop& s : v.plan.stops) {
      if (s.action != StopAction::kRebalance) kept.push_back(s);
    }
    v.plan = schedule_stops(planning_anchor(v, network_), std::move(kept), network_, requests_);
  }
  auto busy = [&] {
    return std::any_of(vehicles_.begin(), vehicles_.end(),
                       [](const Vehicle& v) { return !v.plan.empty() || v.moving(); });
  };
  Seconds t = now_;
  for (int guard = 0; busy(); ++guard) {
    if (guard > 1000000) throw std::logic_error("vehicles never finished their plans");
    t += config_.interval;
    StageMetrics scratch;
    move_fleet(t, scratch);
  }
  now_ = t;
  finished_ = true;
}

void Simulation::check_invariants() const {
  std::vector<int> held(real_count_, 0);
  for (const Vehicle& v : vehicles_) {
    for (RequestId q : v.onboard) {
      if (static_cast<std::size_t>(q) >= real_count_ ||
          requests_[static_cast<std::size_t>(q)].status != RequestStatus::kOnboard) {
        throw std::logic_error("vehicle carries a request that is not onboard");
      }
      ++held[static_cast<std::size_t>(q)];
    }
    for (RequestId q : v.assigned) {
      if (static_cast<std::size_t>(q) >= real_count_) continue;  // artificial
      if (requests_[static_cast<std::size_t>(q)].status != RequestStatus::kAssigned) {
        throw std::logic_error("vehicle holds a request that is not assigned");
      }
      ++held[static_cast<std::size_t>(q)];
    }
  }
  std::vector<bool> pending(real_count_, false);
  for (RequestId q : pending_) {
    if (static_cast<std::size_t>(q) < real_count_) pending[static_cast<std::size_t>(q)] = true;
  }
  for (std::size_t i = 0; i < real_count_; ++i) {
    const Request& r = requests_[i];
    const bool emerged = i < next_request_;
    if (emerged != (r.status != RequestStatus::kEmerged)) {
      throw std::logic_error("request status disagrees with its request time");
    }
    switch (r.status) {
      case RequestStatus::kAssigned:
      case RequestStatus::kOnboard:
        if (held[i] != 1) throw std::logic_error("request held by " + std::to_string(held[i]) + " vehicles");
        break;
      case RequestStatus::kWaitingAssignment:
        if (!pending[i] || held[i] != 0) throw std::logic_error("waiting request is not pending");
        break;
      default:
        if (held[i] != 0 || pending[i]) throw std::logic_error("finished request still held");
    }
  }
}

RunResult Simulation::run() {
  while (step()) {
  }
  if (!finished_) drain();
  RunResult out;
  out.report = summarize();
  out.stages = stages_;
  out.events = events_;
  return out;
}

RunReport Simulation::summarize() const {
  RunReport rep;
  rep.stages = static_cast<int>(stages_.size());
  Seconds wait = 0;
  Seconds detour = 0;
  Seconds moving = 0;
  std::vector<double> rejected_by_zone(static_cast<std::size_t>(zones_.zone_count()), 0.0);
  for (std::size_t i = 0; i < next_request_; ++i) {
    const Request& r = requests_[i];
    ++rep.requests;
    if (r.status == RequestStatus::kCompleted) {
      ++rep.served;
      wait += r.pickup_time - r.request_time;
      detour += r.dropoff_time - r.pickup_time - network_.travel_time(r.origin, r.destination);
    } else if (r.status == RequestStatus::kRejected) {
      ++rep.rejected;
      rejected_by_zone[static_cast<std::size_t>(zones_.zone_of[static_cast<std::size_t>(r.origin)])] += 1.0;
    }
  }
  for (const Vehicle& v : vehicles_) moving += v.moving_time;
  const CostParams& p = config_.prices;
  rep.user_cost = (p.wait_price * static_cast<double>(wait) + p.ride_price * static_cast<double>(detour)) / 3600.0;
  rep.rejection_cost = p.reject_penalty * rep.rejected;
  rep.operator_cost = p.operator_price * static_cast<double>(moving) / 3600.0;
  rep.aposteriori_cost = rep.user_cost + rep.rejection_cost + rep.operator_cost;
  rep.rejection_rate = rep.requests ? static_cast<double>(rep.rejected) / rep.requests : 0.0;
  rep.vht_hours = static_cast<double>(moving) / 3600.0;
  if (rep.served) {
    rep.mean_wait = static_cast<double>(wait) / rep.served;
    rep.mean_detour = static_cast<double>(detour) / rep.served;
  }
  for (const StageMetrics& s : stages_) {
    rep.accumulated_rejections.push_back(s.accumulated_rejections);
    rep.artificial_injected += s.artificial_injected;
  }
  if (!stages_.empty()) {
    const StageMetrics& last = stages_.back();
    rep.mismatch_mean = last.mismatch_mean;
    rep.mismatch_median = last.mismatch_median;
    const auto members = zones_.members();
    for (int z = 0; z < zones_.zone_count(); ++z) {
      const auto k = static_cast<std::size_t>(z);
      ZoneRow row;
      row.zone = z;
      row.center = network_.node(zones_.centers[k]).id;
      row.size = static_cast<int>(members[k].size());
      row.vehicle_share = last.vehicle_share[k];
      row.request_share = last.request_share[k];
      row.mismatch = std::abs(row.vehicle_share - row.request_share);
      row.rejection_share = rep.rejected ? rejected_by_zone[k] / rep.rejected : 0.0;
      rep.zones.push_back(row);
    }
  }
  return rep;
}

std::string report_json(const RunReport& r) {
  nlohmann::ordered_json j;
  j["stages"] = r.stages;
  j["requests"] = r.requests;
  j["served"] = r.served;
  j["rejected"] = r.rejected;
  j["rejection_rate"] = r.rejection_rate;
  j["vht_hours"] = r.vht_hours;
  j["mean_wait_s"] = r.mean_wait;
  j["mean_detour_s"] = r.mean_detour;
  j["user_cost"] = r.user_cost;
  j["rejection_cost"] = r.rejection_cost;
  j["operator_cost"] = r.operator_cost;
  j["aposteriori_cost"] = r.aposteriori_cost;
  j["mismatch_mean"] = r.mismatch_mean;
  j["mismatch_median"] = r.mismatch_median;
  j["artificial_injected"] = r.artificial_injected;
  j["accumulated_rejections"] = r.accumulated_rejections;
  auto zones = nlohmann::ordered_json::array();
  for (const ZoneRow& z : r.zones) {
    zones.push_back({{"zone", z.zone},
                     {"center", z.center},
                     {"size", z.size},
                     {"vehicle_share", z.vehicle_share},
                     {"request_share", z.request_share},
                     {"mismatch", z.mismatch},
                     {"rejection_share", z.rejection_share}});
  }
  j["zones"] = std::move(zones);
  return j.dump(2) + "\n";
}

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out.precision(12);
  return out;
}

std::string join(const std::vector<double>& values) {
  std::ostringstream s;
  s.precision(12);
  for (std::size_t i = 0; i < values.size(); ++i) s << (i ? ";" : "") << values[i];
  return s.str();
}

}  // namespace

void write_stages_csv(std::span<const StageMetrics> stages, const std::filesystem::path& path) {
  auto out = open_output(path);
  out << "time_s,new_requests,assigned,rejected,accumulated_rejections,pickups,dropoffs,"
         "mean_wait_s,mean_detour_s,vht_increment_s,vht_total_s,objective,candidates,"
         "artificial_injected,artificial_assigned,artificial_rejected,mismatch_mean,"
         "mismatch_median,vehicle_shares,request_shares\n";
  for (const StageMetrics& s : stages) {
    out << s.time << ',' << s.new_requests << ',' << s.assigned << ',' << s.rejected << ','
        << s.accumulated_rejections << ',' << s.pickups << ',' << s.dropoffs << ',' << s.mean_wait
        << ',' << s.mean_detour << ',' << s.vht_increment << ',' << s.vht_total << ','
        << s.objective << ',' << s.candidates << ',' << s.artificial_injected << ','
        << s.artificial_assigned << ',' << s.artificial_rejected << ',' << s.mismatch_mean << ','
        << s.mismatch_median << ',' << join(s.vehicle_share) << ',' << join(s.request_share)
        << '\n';
  }
}

void write_zones_csv(std::span<const ZoneRow> zones, const std::filesystem::path& path) {
  auto out = open_output(path);
  out.precision(17);
  out << "zone,center_node,size,vehicle_share,request_share,mismatch,rejection_share\n";
  for (const ZoneRow& z : zones) {
    out << z.zone << ',' << z.center << ',' << z.size << ',' << z.vehicle_share << ','
        << z.request_share << ',' << z.mismatch << ',' << z.rejection_share << '\n';
  }
}

std::vector<ZoneRow> read_zones_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path.string());
  std::vector<ZoneRow> rows;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (number == 1 || line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    ZoneRow z;
    if (!(fields >> z.zone >> z.center >> z.size >> z.vehicle_share >> z.request_share >>
          z.mismatch >> z.rejection_share)) {
      throw ParseError(path.string(), number, "expected 7 zone fields");
    }
    rows.push_back(z);
  }
  return rows;
}

void write_events_log(std::span<const EventRecord> events, const std::filesystem::path& path) {
  auto out = open_output(path);
  out << "time_s,event,request,vehicle,load,request_time_s,direct_time_s\n";
  for (const EventRecord& e : events) {
    out << e.time << ',' << to_string(e.kind) << ',' << e.request << ',' << e.vehicle << ','
        << e.load << ',' << e.request_time << ',' << e.direct_time << '\n';
  }
}

void write_outputs(const RunResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    auto out = open_output(dir / "report.json");
    out << report_json(result.report);
  }
  write_stages_csv(result.stages, dir / "stages.csv");
  write_zones_csv(result.report.zones, dir / "zones.csv");
  write_events_log(result.events, dir / "events.log");
}

}  // namespace ridepool
