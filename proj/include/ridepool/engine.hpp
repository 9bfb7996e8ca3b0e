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
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ridepool/anticipatory.hpp"
#include "ridepool/demand.hpp"
#include "ridepool/fleet.hpp"
#include "ridepool/matching.hpp"
#include "ridepool/network.hpp"
#include "ridepool/rates.hpp"
#include "ridepool/routing.hpp"

namespace ridepool {

enum class Mode : std::uint8_t { kNone, kRewards, kArtificial, kBoth };

std::string_view to_string(Mode mode);
std::optional<Mode> parse_mode(std::string_view text);

struct SimConfig {
  Seconds interval = 60;   // delta
  Seconds horizon = 3600;  // PO, a multiple of interval
  Constraints constraints;
  CostParams prices;  // theta and the rate pointer are set by the engine

  Mode mode = Mode::kNone;
  double theta = 0.0;
  RewardNode reward_node = RewardNode::kLastNode;
  RateConfig reward_rates;

  ArtificialConfig artificial;  // penalty_ratio is Gamma
  RateConfig artificial_rates;  // generation rates for artificial origins
  Seconds length_window = 1800;

  double keep_fraction = 1.0;             // without artificial requests
  double artificial_keep_fraction = 0.5;  // tightened, with them
  int max_trip_size = 0;                  // 0: capacity

  bool rebalancing = true;
  Seconds zone_radius = 150;  // t_M
  int workers = 1;
  std::uint64_t seed = 1;

  // Throws InputError on inconsistent settings.
  void validate() const;
  bool rewards_active() const;
  bool artificial_active() const;
};

struct StageMetrics {
  Seconds time = 0;
  int new_requests = 0;
  int assigned = 0;  // real requests matched at this stage
  int rejected = 0;  // real requests rejected at this stage
  int accumulated_rejections = 0;
  int pickups = 0;   // real pickups since the previous stage
  int dropoffs = 0;
  double mean_wait = 0.0;    // over those pickups
  double mean_detour = 0.0;  // over those dropoffs
  Seconds vht_increment = 0;
  Seconds vht_total = 0;
  double objective = 0.0;
  int candidates = 0;
  int artificial_injected = 0;
  int artificial_assigned = 0;
  int artificial_rejected = 0;
  std::vector<double> vehicle_share;  // v_z
  std::vector<double> request_share;  // r_z
  double mismatch_mean = 0.0;
  double mismatch_median = 0.0;

  friend bool operator==(const StageMetrics&, const StageMetrics&) = default;
};

struct ZoneRow {
  int zone = 0;
  NodeId center = 0;
  int size = 0;
  double vehicle_share = 0.0;
  double request_share = 0.0;
  double mismatch = 0.0;
  double rejection_share = 0.0;

  friend bool operator==(const ZoneRow&, const ZoneRow&) = default;
};

struct RunReport {
  int stages = 0;
  int requests = 0;
  int served = 0;
  int rejected = 0;
  double rejection_rate = 0.0;
  double vht_hours = 0.0;
  double mean_wait = 0.0;    // seconds, over served requests
  double mean_detour = 0.0;  // seconds, over served requests
  double user_cost = 0.0;
  double rejection_cost = 0.0;
  double operator_cost = 0.0;
  double aposteriori_cost = 0.0;
  std::vector<int> accumulated_rejections;  // per stage
  double mismatch_mean = 0.0;    // at the final stage
  double mismatch_median = 0.0;
  std::vector<ZoneRow> zones;
  int artificial_injected = 0;

  friend bool operator==(const RunReport&, const RunReport&) = default;
};

enum class EventKind : std::uint8_t { kPickup, kDropoff, kReject };
std::string_view to_string(EventKind kind);

struct EventRecord {
  Seconds time = 0;
  EventKind kind = EventKind::kPickup;
  RequestId request = -1;
  int vehicle = -1;
  int load = 0;
  Seconds request_time = 0;
  Seconds direct_time = 0;

  friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

struct MismatchResult {
  std::vector<double> vehicle_share;
  std::vector<double> request_share;
  std::vector<double> mismatch;  // |v_z - r_z|
  double mean = 0.0;
  double median = 0.0;
  bool no_requests = false;  // request shares are all 0
};

// v_z from the vehicles' nearest nodes, r_z from `origins`.
MismatchResult zone_mismatch(std::span<const NodeIndex> vehicle_nodes,
                             std::span<const NodeIndex> origins, const ZonePartition& zones);

struct AuditResult {
  int wait_violations = 0;
  int delay_violations = 0;
  int capacity_violations = 0;
  int order_violations = 0;  // dropoff without pickup, duplicate service
  int served = 0;

  bool clean() const {
    return wait_violations == 0 && delay_violations == 0 && capacity_violations == 0 &&
           order_violations == 0;
  }
};

AuditResult audit_events(std::span<const EventRecord> events, const Constraints& constraints,
                         int capacity);

struct RunResult {
  RunReport report;
  std::vector<StageMetrics> stages;
  std::vector<EventRecord> events;
};

// Receding-horizon simulation over one network, one demand trace and one
// fleet. The network must outlive the simulation.
class Simulation {
 public:
  Simulation(const RoadNetwork& network, const DemandTrace& trace,
             std::vector<DemandTrace> history, std::vector<Vehicle> fleet, SimConfig config);

  // Runs the next decision stage; false once the horizon is exhausted.
  bool step();
  // Runs every remaining stage, then lets vehicles finish their plans.
  RunResult run();

  Seconds now() const { return now_; }
  const std::vector<Vehicle>& vehicles() const { return vehicles_; }
  const std::vector<Request>& requests() const { return requests_; }
  const ZonePartition& zones() const { return zones_; }
  const std::vector<StageMetrics>& stages() const { return stages_; }
  const std::vector<EventRecord>& events() const { return events_; }
  const SimConfig& config() const { return config_; }

  // Throws std::logic_error when the real requests do not partition into
  // not-yet-emerged, waiting, assigned, onboard, completed and rejected, or
  // when a request is held by two vehicles.
  void check_invariants() const;

 private:
  void move_fleet(Seconds until, StageMetrics& metrics);
  void release_reassignable();
  void drain();
  RunReport summarize() const;

  const RoadNetwork& network_;
  SimConfig config_;
  ZonePartition zones_;
  std::vector<DemandTrace> history_;
  std::vector<Request> requests_;  // real trace first, artificial appended
  std::size_t real_count_ = 0;
  std::vector<Vehicle> vehicles_;

  std::optional<RateEstimator> reward_estimator_;
  std::optional<RateEstimator> artificial_estimator_;
  TripLengthTracker lengths_;
  std::mt19937_64 artificial_rng_;

  int stage_ = 0;
  int stage_count_ = 0;
  Seconds now_ = 0;
  std::size_t next_request_ = 0;
  std::vector<RequestId> pending_;
  std::vector<NodeIndex> last_rejected_origins_;
  int accumulated_rejections_ = 0;
  std::vector<StageMetrics> stages_;
  std::vector<EventRecord> events_;
  std::vector<NodeIndex> last_stage_origins_;
  bool finished_ = false;
};

// report.json, stages.csv, zones.csv and events.log under `dir`.
void write_outputs(const RunResult& result, const std::filesystem::path& dir);
std::string report_json(const RunReport& report);
void write_stages_csv(std::span<const StageMetrics> stages, const std::filesystem::path& path);
void write_zones_csv(std::span<const ZoneRow> zones, const std::filesystem::path& path);
void write_events_log(std::span<const EventRecord> events, const std::filesystem::path& path);
std::vector<ZoneRow> read_zones_csv(const std::filesystem::path& path);

}  // namespace ridepool
