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

#include "ridepool/rates.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "ridepool/errors.hpp"

namespace ridepool {

std::string_view to_string(RateKind kind) {
  return kind == RateKind::kGeneration ? "generation" : "rejection";
}

std::string_view to_string(RateMethod method) {
  switch (method) {
    case RateMethod::kBasic: return "basic";
    case RateMethod::kSmooth: return "smooth";
    case RateMethod::kParticleFilter: return "particle_filter";
    case RateMethod::kHistorical: return "historical";
  }
  return "?";
}

std::optional<RateKind> parse_rate_kind(std::string_view text) {
  if (text == "generation" || text == "gen") return RateKind::kGeneration;
  if (text == "rejection" || text == "rej") return RateKind::kRejection;
  return std::nullopt;
}

std::optional<RateMethod> parse_rate_method(std::string_view text) {
  if (text == "basic" || text == "B") return RateMethod::kBasic;
  if (text == "smooth" || text == "S") return RateMethod::kSmooth;
  if (text == "particle_filter" || text == "pf" || text == "PF") return RateMethod::kParticleFilter;
  if (text == "historical" || text == "H") return RateMethod::kHistorical;
  return std::nullopt;
}

double RateField::total() const { return std::accumulate(values.begin(), values.end(), 0.0); }

BasicRates basic_rates(std::span<const NodeIndex> emerged_origins,
                       std::span<const NodeIndex> rejected_origins, std::size_t node_count,
                       Seconds instant) {
  BasicRates out;
  out.generation = {RateKind::kGeneration, RateMethod::kBasic, instant,
                    std::vector<double>(node_count, 0.0)};
  out.rejection = {RateKind::kRejection, RateMethod::kBasic, instant,
                   std::vector<double>(node_count, 0.0)};
  for (NodeIndex u : emerged_origins) out.generation.values[static_cast<std::size_t>(u)] += 1.0;
  for (NodeIndex u : rejected_origins) out.rejection.values[static_cast<std::size_t>(u)] += 1.0;
  return out;
}

RateField smooth_rates(const RateField& base, const RoadNetwork& network, double psi) {
  if (!(psi > 0)) throw InputError("smoothing constant psi must be positive");
  const auto n = static_cast<NodeIndex>(network.node_count());
  RateField out{base.kind, RateMethod::kSmooth, base.instant, std::vector<double>(static_cast<std::size_t>(n), 0.0)};
  std::vector<NodeIndex> sources;
  for (NodeIndex w = 0; w < n; ++w) {
    if (base.at(w) != 0.0) sources.push_back(w);
  }
  for (NodeIndex u = 0; u < n; ++u) {
    double s = 0.0;
    for (NodeIndex w : sources) {
      s += base.at(w) / (psi + static_cast<double>(network.travel_time(u, w)));
    }
    out.values[static_cast<std::size_t>(u)] = s;
  }
  return out;
}

std::vector<double> zone_totals(const RateField& field, const ZonePartition& zones) {
  std::vector<double> totals(static_cast<std::size_t>(zones.zone_count()), 0.0);
  for (std::size_t u = 0; u < field.values.size(); ++u) {
    totals[static_cast<std::size_t>(zones.zone_of[u])] += field.values[u];
  }
  return totals;
}

RateField zone_field(std::span<const double> zone_values, const ZonePartition& zones,
                     RateKind kind, RateMethod method, Seconds instant) {
  RateField out{kind, method, instant, std::vector<double>(zones.zone_of.size(), 0.0)};
  for (std::size_t u = 0; u < zones.zone_of.size(); ++u) {
    out.values[u] = zone_values[static_cast<std::size_t>(zones.zone_of[u])];
  }
  return out;
}

ParticleFilterState make_particle_filter(int zone_count, const ParticleFilterParams& params) {
  if (params.particles < 1 || params.volatility < 0 || !(params.floor > 0)) {
    throw InputError("invalid particle filter parameters");
  }
  ParticleFilterState state;
  state.params = params;
  const auto eta = static_cast<std::size_t>(params.particles);
  state.lambda.assign(static_cast<std::size_t>(zone_count), std::vector<double>(eta, params.floor));
  state.weight.assign(static_cast<std::size_t>(zone_count),
                      std::vector<double>(eta, 1.0 / static_cast<double>(eta)));
  return state;
}

double poisson_log_pmf(double lambda, long count) {
  return -lambda + static_cast<double>(count) * std::log(lambda) -
         std::lgamma(static_cast<double>(count) + 1.0);
}

double poisson_pmf(double lambda, long count) { return std::exp(poisson_log_pmf(lambda, count)); }

std::vector<double> pf_update(ParticleFilterState& state, std::span<const double> zone_counts,
                              std::mt19937_64& rng) {
  const std::size_t zones = state.lambda.size();
  if (zone_counts.size() != zones) throw InputError("zone count mismatch in particle filter");
  const auto eta = static_cast<std::size_t>(state.params.particles);
  const double floor = state.params.floor;

  if (!state.initialized) {
    const double mean = zones ? std::accumulate(zone_counts.begin(), zone_counts.end(), 0.0) /
                                    static_cast<double>(zones)
                              : 0.0;
    std::uniform_real_distribution<double> init(0.0, mean > 0 ? 2.0 * mean : 1.0);
    for (auto& particles : state.lambda) {
      for (double& l : particles) l = std::max(floor, init(rng));
    }
    state.initialized = true;
  }

  const double sigma = std::sqrt(state.params.volatility);
  std::normal_distribution<double> noise(0.0, sigma > 0 ? sigma : 1.0);
  std::vector<double> rates(zones, 0.0);
  std::vector<double> sample(eta);
  std::vector<double> logw(eta);
  for (std::size_t z = 0; z < zones; ++z) {
    auto& lambda = state.lambda[z];
    auto& weight = state.weight[z];
    const long observed = std::lround(zone_counts[z]);

    std::discrete_distribution<std::size_t> pick(weight.begin(), weight.end());
    for (std::size_t l = 0; l < eta; ++l) sample[l] = lambda[pick(rng)];
    for (std::size_t l = 0; l < eta; ++l) {
      const double jitter = sigma > 0 ? noise(rng) : 0.0;
      lambda[l] = std::max(floor, sample[l] + jitter);
    }

    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t l = 0; l < eta; ++l) {
      logw[l] = poisson_log_pmf(lambda[l], observed);
      top = std::max(top, logw[l]);
    }
    double sum = 0.0;
    if (std::isfinite(top)) {
      for (std::size_t l = 0; l < eta; ++l) {
        weight[l] = std::exp(logw[l] - top);
        sum += weight[l];
      }
    }
    if (!(sum > 0) || !std::isfinite(sum)) {
      // Every likelihood underflowed: fall back to uniform weights.
      std::fill(weight.begin(), weight.end(), 1.0 / static_cast<double>(eta));
    } else {
      for (double& w : weight) w /= sum;
    }

    double rate = 0.0;
    for (std::size_t l = 0; l < eta; ++l) rate += weight[l] * lambda[l];
    rates[z] = rate;
  }
  return rates;
}

RateField historical_rates(std::span<const DemandTrace> days, const ZonePartition& zones,
                           Seconds from, Seconds to) {
  if (days.empty()) throw InputError("historical rates need at least one day of data");
  std::vector<double> per_zone(static_cast<std::size_t>(zones.zone_count()), 0.0);
  for (const DemandTrace& day : days) {
    auto first = std::upper_bound(day.requests.begin(), day.requests.end(), from,
                                  [](Seconds t, const Request& r) { return t < r.request_time; });
    for (auto it = first; it != day.requests.end() && it->request_time <= to; ++it) {
      per_zone[static_cast<std::size_t>(zones.zone_of[static_cast<std::size_t>(it->origin)])] += 1.0;
    }
  }
  for (double& v : per_zone) v /= static_cast<double>(days.size());
  return zone_field(per_zone, zones, RateKind::kGeneration, RateMethod::kHistorical, to);
}

void write_rates_csv(const RateField& field, const RoadNetwork& network,
                     const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out.precision(17);
  out << "node_id,value\n";
  for (std::size_t u = 0; u < field.values.size(); ++u) {
    out << network.node(static_cast<NodeIndex>(u)).id << ',' << field.values[u] << '\n';
  }
}

RateEstimator::RateEstimator(const RoadNetwork& network, const ZonePartition* zones,
                             RateConfig config, std::span<const DemandTrace> history,
                             std::uint64_t seed)
    : network_(network), zones_(zones), config_(config), history_(history), rng_(seed) {
  const bool zoned = config_.method == RateMethod::kParticleFilter ||
                     config_.method == RateMethod::kHistorical;
  if (zoned && zones_ == nullptr) throw InputError("zone-based rates need a zone partition");
  if (config_.method == RateMethod::kHistorical) {
    if (config_.kind != RateKind::kGeneration) {
      throw InputError("historical data only yields generation rates");
    }
    if (history_.empty()) throw InputError("historical rates need a non-empty dataset");
  }
  if (config_.method == RateMethod::kSmooth && !(config_.psi > 0)) {
    throw InputError("smoothing constant psi must be positive");
  }
  if (config_.method == RateMethod::kParticleFilter) {
    filter_ = make_particle_filter(zones_->zone_count(), config_.filter);
  }
}

RateField RateEstimator::update(Seconds previous_instant, Seconds instant,
                                std::span<const NodeIndex> emerged_origins,
                                std::span<const NodeIndex> rejected_origins) {
  BasicRates basic = basic_rates(emerged_origins, rejected_origins, network_.node_count(), instant);
  RateField& base = config_.kind == RateKind::kGeneration ? basic.generation : basic.rejection;
  switch (config_.method) {
    case RateMethod::kBasic: return std::move(base);
    case RateMethod::kSmooth: return smooth_rates(base, network_, config_.psi);
    case RateMethod::kParticleFilter: {
      const auto counts = zone_totals(base, *zones_);
      const auto rates = pf_update(filter_, counts, rng_);
      return zone_field(rates, *zones_, config_.kind, RateMethod::kParticleFilter, instant);
    }
    case RateMethod::kHistorical:
      return historical_rates(history_, *zones_, previous_instant, instant);
  }
  return std::move(base);
}

}  // namespace ridepool
