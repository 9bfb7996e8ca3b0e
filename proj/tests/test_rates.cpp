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

#include <cmath>
#include <numeric>

#include "doctest.h"
#include "ridepool/errors.hpp"
#include "ridepool/rates.hpp"
#include "testkit.hpp"

using namespace ridepool;

TEST_CASE("basic rates conserve mass") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 3 + trial % 9;
    std::vector<NodeIndex> emerged, rejected;
    std::uniform_int_distribution<NodeIndex> node(0, static_cast<NodeIndex>(n) - 1);
    for (int k = 0; k < trial; ++k) emerged.push_back(node(rng));
    for (int k = 0; k < trial / 3; ++k) rejected.push_back(emerged[static_cast<std::size_t>(k)]);
    const auto b = basic_rates(emerged, rejected, n, 60);
    CHECK(b.generation.total() == static_cast<double>(emerged.size()));
    CHECK(b.rejection.total() == static_cast<double>(rejected.size()));
    for (std::size_t u = 0; u < n; ++u) {
      CHECK(b.rejection.values[u] <= b.generation.values[u]);
      CHECK(b.generation.values[u] == static_cast<double>(std::count(emerged.begin(), emerged.end(),
                                                                     static_cast<NodeIndex>(u))));
    }
  }
}

TEST_CASE("smoothing: hand example and monotonicity") {
  auto g = parse_network("N 0 0 0\nN 1 1 0\nE 0 1 10\nE 1 0 10\n");
  RateField base{RateKind::kGeneration, RateMethod::kBasic, 0, {1.0, 0.0}};
  const RateField s = smooth_rates(base, *g, 1.0);
  CHECK(s.at(0) == doctest::Approx(1.0));
  CHECK(s.at(1) == doctest::Approx(1.0 / 11.0));
  CHECK(s.method == RateMethod::kSmooth);
  CHECK_THROWS_AS(smooth_rates(base, *g, 0.0), InputError);

  std::mt19937_64 rng(4);
  auto h = testkit::random_network(rng, 12, 20);
  std::uniform_int_distribution<int> count(0, 3);
  std::uniform_int_distribution<NodeIndex> node(0, 11);
  for (int pair = 0; pair < 100; ++pair) {
    RateField a{RateKind::kGeneration, RateMethod::kBasic, 0, std::vector<double>(12)};
    for (double& v : a.values) v = count(rng);
    RateField b = a;
    b.values[static_cast<std::size_t>(node(rng))] += 1.0 + count(rng);
    const double psi = 0.5 + pair % 7;
    const RateField sa = smooth_rates(a, *h, psi);
    const RateField sb = smooth_rates(b, *h, psi);
    for (NodeIndex u = 0; u < 12; ++u) CHECK(sb.at(u) > sa.at(u));
  }
}

TEST_CASE("Poisson likelihood") {
  CHECK(poisson_pmf(2.0, 2) == doctest::Approx(4.0 * std::exp(-2.0) / 2.0).epsilon(1e-12));
  CHECK(poisson_pmf(2.0, 2) == doctest::Approx(0.2707).epsilon(1e-4));
  CHECK(poisson_pmf(3.5, 0) == doctest::Approx(std::exp(-3.5)));
  double sum = 0.0;
  for (long k = 0; k < 60; ++k) sum += poisson_pmf(7.0, k);
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("particle filter keeps normalized weights and tracks the counts") {
  ParticleFilterParams params;
  params.particles = 200;
  params.volatility = 0.05;
  auto state = make_particle_filter(3, params);
  std::mt19937_64 rng(8);
  std::vector<double> rates;
  for (int step = 0; step < 40; ++step) {
    const std::vector<double> counts{0.0, 2.0, 9.0};
    rates = pf_update(state, counts, rng);
    for (const auto& w : state.weight) {
      CHECK(std::accumulate(w.begin(), w.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-9));
      for (double x : w) CHECK(x >= 0.0);
    }
    for (const auto& l : state.lambda) {
      for (double x : l) CHECK(x >= params.floor);
    }
  }
  CHECK(rates[0] < rates[1]);
  CHECK(rates[1] < rates[2]);
  CHECK(rates[2] == doctest::Approx(9.0).epsilon(0.35));

  CHECK_THROWS_AS(pf_update(state, std::vector<double>{1.0}, rng), InputError);
  params.particles = 0;
  CHECK_THROWS_AS(make_particle_filter(2, params), InputError);
}

TEST_CASE("historical rates average the same window over days") {
  auto g = parse_network("N 0 0 0\nN 1 1 0\nE 0 1 10\nE 1 0 10\n");
  ZonePartition zones;
  zones.centers = {0, 1};
  zones.zone_of = {0, 1};
  auto req = [](NodeIndex o, Seconds t) {
    Request r;
    r.origin = o;
    r.destination = 1 - o;
    r.request_time = t;
    return r;
  };
  DemandTrace day1, day2;
  day1.requests = {req(0, 10), req(0, 50), req(1, 70), req(0, 130)};
  day2.requests = {req(0, 60), req(1, 61), req(1, 62), req(1, 200)};
  const std::vector<DemandTrace> days{day1, day2};
  // window (0, 60]: day1 has two from zone 0; day2 one from zone 0
  const RateField f = historical_rates(days, zones, 0, 60);
  CHECK(f.at(0) == doctest::Approx(1.5));
  CHECK(f.at(1) == doctest::Approx(0.0));
  // window (60, 120]: day1 one from zone 1; day2 two from zone 1
  const RateField h = historical_rates(days, zones, 60, 120);
  CHECK(h.at(0) == doctest::Approx(0.0));
  CHECK(h.at(1) == doctest::Approx(1.5));
  CHECK_THROWS_AS(historical_rates({}, zones, 0, 60), InputError);
}

TEST_CASE("rate estimator validation and dispatch") {
  auto g = make_grid(3, 3, 60);
  const ZonePartition zones = cluster_zones(*g, 60);
  RateConfig cfg;
  cfg.method = RateMethod::kParticleFilter;
  CHECK_THROWS_AS(RateEstimator(*g, nullptr, cfg, {}, 1), InputError);
  cfg.method = RateMethod::kHistorical;
  CHECK_THROWS_AS(RateEstimator(*g, &zones, cfg, {}, 1), InputError);
  cfg.kind = RateKind::kRejection;
  const std::vector<DemandTrace> days(1);
  CHECK_THROWS_AS(RateEstimator(*g, &zones, cfg, days, 1), InputError);
  cfg.method = RateMethod::kSmooth;
  cfg.psi = -1;
  CHECK_THROWS_AS(RateEstimator(*g, &zones, cfg, {}, 1), InputError);

  cfg.method = RateMethod::kBasic;
  cfg.kind = RateKind::kRejection;
  RateEstimator est(*g, nullptr, cfg, {}, 1);
  const std::vector<NodeIndex> emerged{1, 1, 4};
  const std::vector<NodeIndex> rejected{1};
  const RateField f = est.update(0, 60, emerged, rejected);
  CHECK(f.kind == RateKind::kRejection);
  CHECK(f.total() == 1.0);
  CHECK(f.at(1) == 1.0);

  cfg.method = RateMethod::kParticleFilter;
  RateEstimator pf(*g, &zones, cfg, {}, 5);
  const RateField p = pf.update(0, 60, emerged, rejected);
  for (std::size_t u = 0; u < 9; ++u) {
    CHECK(p.values[u] == p.values[static_cast<std::size_t>(zones.centers[static_cast<std::size_t>(zones.zone_of[u])])]);
  }

  CHECK(parse_rate_method("PF") == RateMethod::kParticleFilter);
  CHECK(parse_rate_kind("rej") == RateKind::kRejection);
  CHECK_FALSE(parse_rate_method("nope"));
}
