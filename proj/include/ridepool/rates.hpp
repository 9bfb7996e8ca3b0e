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
#include <string_view>
#include <vector>

#include "ridepool/demand.hpp"
#include "ridepool/network.hpp"

namespace ridepool {

enum class RateKind : std::uint8_t { kGeneration, kRejection };
enum class RateMethod : std::uint8_t { kBasic, kSmooth, kParticleFilter, kHistorical };

std::string_view to_string(RateKind kind);
std::string_view to_string(RateMethod method);
std::optional<RateKind> parse_rate_kind(std::string_view text);
std::optional<RateMethod> parse_rate_method(std::string_view text);

// Nonnegative intensity per node at one decision instant.
struct RateField {
  RateKind kind = RateKind::kGeneration;
  RateMethod method = RateMethod::kBasic;
  Seconds instant = 0;
  std::vector<double> values;  // per node index

  double at(NodeIndex u) const { return values[static_cast<std::size_t>(u)]; }
  double total() const;
};

struct BasicRates {
  RateField generation;
  RateField rejection;
};

// Counts of request origins per node: requests that emerged since the last
// instant, and requests rejected at the previous assignment (none at the
// first instant).
BasicRates basic_rates(std::span<const NodeIndex> emerged_origins,
                       std::span<const NodeIndex> rejected_origins, std::size_t node_count,
                       Seconds instant);

// value(u) = sum_w base(w) / (psi + t_V(u, w)) over every node w.
RateField smooth_rates(const RateField& base, const RoadNetwork& network, double psi);

// Sum of a node field over each zone.
std::vector<double> zone_totals(const RateField& field, const ZonePartition& zones);
// Broadcasts per-zone values onto the zones' nodes.
RateField zone_field(std::span<const double> zone_values, const ZonePartition& zones,
                     RateKind kind, RateMethod method, Seconds instant);

struct ParticleFilterParams {
  int particles = 100;      // eta
  double volatility = 0.05; // sigma^2 of the random-walk perturbation
  double floor = 1e-6;      // lower clamp on every particle
};

struct ParticleFilterState {
  ParticleFilterParams params;
  std::vector<std::vector<double>> lambda;  // [zone][particle]
  std::vector<std::vector<double>> weight;  // [zone][particle], sums to 1 per zone
  bool initialized = false;
};

ParticleFilterState make_particle_filter(int zone_count, const ParticleFilterParams& params);

// e^-lambda lambda^count / count!, evaluated in log space.
double poisson_pmf(double lambda, long count);
double poisson_log_pmf(double lambda, long count);

// One filtering step per zone: multinomial resampling by weight, Gaussian
// perturbation clamped at the floor, Poisson reweighting by the observed
// count, normalization. Returns the weighted-mean rate per zone. An
// uninitialized state first draws particles uniformly on
// [0, 2 * mean observed count] (or [0, 1] when nothing was observed).
std::vector<double> pf_update(ParticleFilterState& state, std::span<const double> zone_counts,
                              std::mt19937_64& rng);

// Historical generation rate per zone: mean over days of requests whose origin
// lies in the zone and whose time lies in (from, to].
RateField historical_rates(std::span<const DemandTrace> days, const ZonePartition& zones,
                           Seconds from, Seconds to);

// CSV `node_id,value`.
void write_rates_csv(const RateField& field, const RoadNetwork& network,
                     const std::filesystem::path& path);

struct RateConfig {
  RateMethod method = RateMethod::kBasic;
  RateKind kind = RateKind::kGeneration;
  double psi = 1.0;
  ParticleFilterParams filter;
};

// Stateful per-run estimator; call update() once per decision instant with
// the real requests that emerged since the previous instant and those rejected
// at the previous assignment.
class RateEstimator {
 public:
  RateEstimator(const RoadNetwork& network, const ZonePartition* zones, RateConfig config,
                std::span<const DemandTrace> history, std::uint64_t seed);

  RateField update(Seconds previous_instant, Seconds instant,
                   std::span<const NodeIndex> emerged_origins,
                   std::span<const NodeIndex> rejected_origins);

  const RateConfig& config() const { return config_; }
  const ParticleFilterState& filter_state() const { return filter_; }

 private:
  const RoadNetwork& network_;
  const ZonePartition* zones_;
  RateConfig config_;
  std::span<const DemandTrace> history_;
  ParticleFilterState filter_;
  std::mt19937_64 rng_;
};

}  // namespace ridepool
