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
#include <map>
#include <numeric>
#include <sstream>
#include <tuple>

#include "doctest.h"
#include "ridepool/errors.hpp"
#include "ridepool/matching.hpp"
#include "testkit.hpp"

using namespace ridepool;

namespace {

RoutedMatch match(int vehicle, std::vector<RequestId> trip, double cost) {
  RoutedMatch m;
  m.vehicle = vehicle;
  m.trip = std::move(trip);
  m.base_cost = cost;
  m.anticipatory_cost = cost;
  return m;
}

// Random candidate set over `n` requests and `v` vehicles with trips of up to
// three requests; costs may be negative to mimic large rewards.
CandidateSet random_candidates(std::mt19937_64& rng, int n, int v) {
  CandidateSet c;
  std::uniform_real_distribution<double> cost(-0.5, 4.0);
  for (int veh = 0; veh < v; ++veh) {
    std::set<std::vector<RequestId>> seen;
    const int count = 1 + static_cast<int>(rng() % 6);
    for (int k = 0; k < count; ++k) {
      std::set<RequestId> trip;
      const int size = 1 + static_cast<int>(rng() % 3);
      while (static_cast<int>(trip.size()) < std::min(size, n)) trip.insert(static_cast<RequestId>(rng() % static_cast<unsigned>(n)));
      std::vector<RequestId> t(trip.begin(), trip.end());
      if (seen.insert(t).second) c.entries.push_back(match(veh, t, cost(rng)));
    }
  }
  return c;
}

// Set of feasible trips per vehicle, by exhaustive subset enumeration and the
// oracle router, keeping a trip only when all of its one-smaller subsets are
// kept.
std::map<std::pair<int, std::vector<RequestId>>, double> brute_candidates(
    const std::vector<RequestId>& waiting, const std::vector<RoutingContext>& vehicles,
    const Constraints& cons, const CostParams& params, const RoadNetwork& g,
    const std::vector<Request>& reqs) {
  std::map<std::pair<int, std::vector<RequestId>>, double> out;
  const auto n = waiting.size();
  for (const RoutingContext& ctx : vehicles) {
    std::vector<std::uint32_t> masks(1u << n);
    std::iota(masks.begin(), masks.end(), 0u);
    std::stable_sort(masks.begin(), masks.end(),
                     [](auto a, auto b) { return std::popcount(a) < std::popcount(b); });
    std::set<std::uint32_t> kept;
    for (std::uint32_t mask : masks) {
      const int size = std::popcount(mask);
      if (size == 0 || size > ctx.capacity) continue;
      bool closed = true;
      for (std::size_t i = 0; i < n && size > 1; ++i) {
        if (mask >> i & 1) closed = closed && kept.count(mask & ~(1u << i));
      }
      if (!closed) continue;
      std::vector<RequestId> trip;
      for (std::size_t i = 0; i < n; ++i) {
        if (mask >> i & 1) trip.push_back(waiting[i]);
      }
      const auto r = testkit::route_oracle(ctx, trip, cons, params, g, reqs);
      if (!r) continue;
      kept.insert(mask);
      out[{ctx.vehicle, trip}] = r->anticipatory;
    }
  }
  return out;
}

}  // namespace

TEST_CASE("candidate enumeration matches brute force") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    auto g = testkit::random_network(rng, 10, 20, 20, 120);
    std::uniform_int_distribution<NodeIndex> node(0, 9);
    std::vector<Request> reqs;
    std::vector<RequestId> waiting;
    for (int k = 0; k < 6; ++k) {
      Request r;
      r.id = k;
      r.origin = node(rng);
      do {
        r.destination = node(rng);
      } while (r.destination == r.origin);
      r.request_time = 900 + static_cast<Seconds>(rng() % 120);
      reqs.push_back(r);
      waiting.push_back(k);
    }
    std::vector<RoutingContext> vehicles;
    for (int v = 0; v < 3; ++v) {
      RoutingContext ctx;
      ctx.vehicle = 10 + v;
      ctx.capacity = 1 + v;  // trips of up to three, four stops routed exactly
      ctx.anchor = {node(rng), 1000};
      vehicles.push_back(ctx);
    }
    Constraints cons;
    cons.max_wait = 300;
    cons.max_delay = 500;
    EnumerationParams params;
    params.constraints = cons;
    params.workers = 1 + trial % 3;
    const CandidateSet got = enumerate_candidates(waiting, vehicles, params, *g, reqs);
    const auto want = brute_candidates(waiting, vehicles, cons, params.cost, *g, reqs);
    REQUIRE(got.entries.size() == want.size());
    for (const RoutedMatch& m : got.entries) {
      const auto it = want.find({m.vehicle, m.trip});
      REQUIRE(it != want.end());
      CHECK(m.anticipatory_cost == doctest::Approx(it->second).epsilon(1e-12));
    }
    for (std::size_t i = 1; i < got.entries.size(); ++i) {
      const auto& a = got.entries[i - 1];
      const auto& b = got.entries[i];
      CHECK(std::tuple(a.vehicle, a.trip.size(), a.trip) < std::tuple(b.vehicle, b.trip.size(), b.trip));
    }
  }
}

TEST_CASE("cost-based pruning keeps the cheapest share of vehicles per request") {
  CandidateSet c;
  c.entries = {match(0, {1}, 4.0), match(0, {1, 2}, 5.0), match(1, {1}, 1.0), match(1, {2}, 1.0),
               match(2, {1}, 3.0), match(3, {1}, 2.0), match(3, {2}, 9.0)};
  const CandidateSet half = prune_costly(c, 0.5);
  std::vector<std::pair<int, std::vector<RequestId>>> kept;
  for (const auto& m : half.entries) kept.push_back({m.vehicle, m.trip});
  // request 1 has four options and keeps vehicles 1 and 3; request 2 has two
  // and keeps vehicle 1. Vehicle 0's pair uses a dropped option.
  const std::vector<std::pair<int, std::vector<RequestId>>> want{{1, {1}}, {1, {2}}, {3, {1}}};
  CHECK(kept == want);
  CHECK(prune_costly(c, 1.0).entries.size() == c.entries.size());
  CHECK_THROWS_AS(prune_costly(c, 0.0), InputError);
  CHECK_THROWS_AS(prune_costly(c, 1.5), InputError);
}

TEST_CASE("assignment matches exhaustive search") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 2 + trial % 7;
    const int v = 1 + trial % 4;
    const CandidateSet c = random_candidates(rng, n, v);
    std::vector<RequestId> waiting(static_cast<std::size_t>(n));
    std::iota(waiting.begin(), waiting.end(), 0);
    std::shuffle(waiting.begin(), waiting.end(), rng);
    std::vector<double> pen(waiting.size());
    for (double& p : pen) p = 0.5 + static_cast<double>(rng() % 5);
    const Assignment a = solve_assignment(c, waiting, pen);
    const double want = testkit::assignment_oracle(c, waiting, pen);
    CHECK(a.objective == doctest::Approx(want).epsilon(1e-9));

    std::set<RequestId> covered;
    std::set<int> used;
    for (const auto& m : a.chosen) {
      CHECK(used.insert(m.vehicle).second);
      for (RequestId q : m.trip) CHECK(covered.insert(q).second);
    }
    for (RequestId q : a.rejected) CHECK(covered.insert(q).second);
    CHECK(covered.size() == waiting.size());
    CHECK(a.objective == assignment_objective(a.chosen, a.rejected, waiting, pen));
  }
}

TEST_CASE("zero rejection penalty rejects everything at zero cost") {
  CandidateSet c;
  c.entries = {match(0, {0}, 0.3), match(0, {0, 1}, 0.5), match(1, {1}, 0.2)};
  const std::vector<RequestId> waiting{0, 1};
  const std::vector<double> pen{0.0, 0.0};
  const Assignment a = solve_assignment(c, waiting, pen);
  CHECK(a.objective == 0.0);
  CHECK(a.chosen.empty());
  CHECK(a.rejected == waiting);
}

TEST_CASE("empty programs") {
  const Assignment a = solve_assignment(CandidateSet{}, {}, {});
  CHECK(a.objective == 0.0);
  CHECK(a.rejected.empty());
  CHECK_THROWS_AS(solve_assignment(CandidateSet{}, std::vector<RequestId>{1}, {}), InputError);
}

TEST_CASE("rectangular matching and rebalancing agree with permutations") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 80; ++trial) {
    const int rows = 1 + trial % 5;
    const int cols = 1 + (trial / 5) % 5;
    std::vector<std::vector<Seconds>> cost(static_cast<std::size_t>(rows), std::vector<Seconds>(static_cast<std::size_t>(cols)));
    for (auto& row : cost) {
      for (auto& x : row) x = static_cast<Seconds>(rng() % 500);
    }
    const auto got = min_cost_matching(cost);
    Seconds total = 0;
    std::set<int> used;
    int matched = 0;
    for (int r = 0; r < rows; ++r) {
      const int c = got[static_cast<std::size_t>(r)];
      if (c < 0) continue;
      ++matched;
      CHECK(used.insert(c).second);
      total += cost[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
    }
    CHECK(matched == std::min(rows, cols));

    // brute force over injections of the smaller side into the larger
    const int small = std::min(rows, cols), large = std::max(rows, cols);
    std::vector<int> perm(static_cast<std::size_t>(large));
    std::iota(perm.begin(), perm.end(), 0);
    Seconds best = std::numeric_limits<Seconds>::max();
    do {
      Seconds s = 0;
      for (int i = 0; i < small; ++i) {
        const int j = perm[static_cast<std::size_t>(i)];
        s += rows <= cols ? cost[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]
                          : cost[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
      }
      best = std::min(best, s);
    } while (std::next_permutation(perm.begin(), perm.end()));
    CHECK(total == best);
  }

  auto g = testkit::random_network(rng, 8, 10);
  const std::vector<Anchor> idle{{0, 0}, {3, 0}, {5, 0}};
  const std::vector<NodeIndex> origins{7, 2};
  const auto moves = rebalance(idle, origins, *g);
  REQUIRE(moves.size() == 2);
  Seconds got = 0;
  for (const auto& m : moves) got += g->travel_time(idle[static_cast<std::size_t>(m.vehicle)].node, m.target);
  Seconds best = std::numeric_limits<Seconds>::max();
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      if (a != b) best = std::min(best, g->travel_time(idle[static_cast<std::size_t>(a)].node, 7) +
                                             g->travel_time(idle[static_cast<std::size_t>(b)].node, 2));
    }
  }
  CHECK(got == best);
  CHECK(rebalance({}, origins, *g).empty());
}

TEST_CASE("program text round-trips") {
  std::mt19937_64 rng(6);
  const CandidateSet c = random_candidates(rng, 5, 3);
  const std::vector<RequestId> waiting{4, 0, 1, 2, 3};
  const std::vector<double> pen{0.1, 3.09, 1.0 / 3.0, 2.5, 7.0};
  std::stringstream text;
  write_program(text, c, waiting, pen);
  const ProgramText p = read_program(text);
  REQUIRE(p.candidates.entries.size() == c.entries.size());
  for (std::size_t i = 0; i < c.entries.size(); ++i) {
    CHECK(p.candidates.entries[i].vehicle == c.entries[i].vehicle);
    CHECK(p.candidates.entries[i].trip == c.entries[i].trip);
    CHECK(p.candidates.entries[i].anticipatory_cost == c.entries[i].anticipatory_cost);
  }
  CHECK(p.waiting == waiting);
  CHECK(p.penalty == pen);
  CHECK(solve_assignment(p.candidates, p.waiting, p.penalty).objective ==
        solve_assignment(c, waiting, pen).objective);

  std::stringstream bad("CAND 0 1.5 3\nBOGUS 1\n");
  try {
    read_program(bad);
    FAIL("expected an error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
}
