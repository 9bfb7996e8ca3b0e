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

#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "doctest.h"
#include "ridepool/demand.hpp"
#include "ridepool/errors.hpp"

using namespace ridepool;

namespace {

std::filesystem::path write_temp(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << text;
  return path;
}

}  // namespace

TEST_CASE("request lifecycle") {
  using S = RequestStatus;
  CHECK(transition_allowed(S::kEmerged, S::kWaitingAssignment, false));
  CHECK(transition_allowed(S::kWaitingAssignment, S::kAssigned, false));
  CHECK(transition_allowed(S::kAssigned, S::kWaitingAssignment, false));
  CHECK(transition_allowed(S::kAssigned, S::kOnboard, false));
  CHECK(transition_allowed(S::kOnboard, S::kCompleted, false));
  CHECK(transition_allowed(S::kWaitingAssignment, S::kRejected, false));
  CHECK_FALSE(transition_allowed(S::kAssigned, S::kOnboard, true));
  CHECK_FALSE(transition_allowed(S::kEmerged, S::kAssigned, false));
  CHECK_FALSE(transition_allowed(S::kCompleted, S::kWaitingAssignment, false));
  CHECK_FALSE(transition_allowed(S::kRejected, S::kWaitingAssignment, false));

  Request r;
  r.id = 0;
  r.set_status(S::kWaitingAssignment);
  CHECK_THROWS_AS(r.set_status(S::kCompleted), std::logic_error);
}

TEST_CASE("trace loading") {
  auto g = make_grid(2, 3, 60);

  SUBCASE("empty file gives an empty trace") {
    CHECK(load_trace(write_temp("rp_empty.csv", ""), *g).requests.empty());
  }
  SUBCASE("rows are sorted by time and ids follow the order") {
    const auto t = load_trace(
        write_temp("rp_unsorted.csv", "time_s,origin,destination,party\n30,0,5,1\n10,1,4\n20,2,3,2\n"), *g);
    REQUIRE(t.requests.size() == 3);
    CHECK(t.requests[0].request_time == 10);
    CHECK(t.requests[1].request_time == 20);
    CHECK(t.requests[2].request_time == 30);
    CHECK(t.requests[1].party_size == 2);
    for (std::size_t i = 0; i < 3; ++i) CHECK(t.requests[i].id == static_cast<RequestId>(i));
    CHECK(t.period == 30);
  }
  SUBCASE("origin equal to destination is rejected") {
    CHECK_THROWS_AS(load_trace(write_temp("rp_same.csv", "time_s,origin,destination,party\n5,2,2,1\n"), *g),
                    ValidationError);
  }
  SUBCASE("unknown node names the row") {
    try {
      load_trace(write_temp("rp_unknown.csv", "time_s,origin,destination,party\n5,1,2,1\n6,1,99,1\n"), *g);
      FAIL("expected an error");
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find("99") != std::string::npos);
      CHECK(std::string(e.what()).find("3") != std::string::npos);
    }
  }
  SUBCASE("write then load round-trips") {
    const auto t = generate_synthetic(uniform_profile(*g, 25, 600), 4);
    const auto path = std::filesystem::temp_directory_path() / "rp_roundtrip.csv";
    write_trace(t, *g, path);
    const auto u = load_trace(path, *g, 600);
    REQUIRE(u.requests.size() == t.requests.size());
    for (std::size_t i = 0; i < t.requests.size(); ++i) {
      CHECK(u.requests[i].request_time == t.requests[i].request_time);
      CHECK(u.requests[i].origin == t.requests[i].origin);
      CHECK(u.requests[i].destination == t.requests[i].destination);
    }
  }
}

TEST_CASE("synthetic demand") {
  auto g = make_grid(4, 4, 60);
  SUBCASE("deterministic in the seed, sorted, within the period") {
    const auto p = uniform_profile(*g, 50, 900);
    const auto a = generate_synthetic(p, 17);
    const auto b = generate_synthetic(p, 17);
    REQUIRE(a.requests.size() == 50);
    for (std::size_t i = 0; i < 50; ++i) {
      CHECK(a.requests[i].request_time == b.requests[i].request_time);
      CHECK(a.requests[i].origin == b.requests[i].origin);
      CHECK(a.requests[i].destination == b.requests[i].destination);
      CHECK(a.requests[i].origin != a.requests[i].destination);
      CHECK(a.requests[i].request_time >= 0);
      CHECK(a.requests[i].request_time <= 900);
      if (i) CHECK(a.requests[i - 1].request_time <= a.requests[i].request_time);
    }
  }
  SUBCASE("count 0 gives an empty trace") {
    CHECK(generate_synthetic(uniform_profile(*g, 0, 900), 1).requests.empty());
  }
  SUBCASE("all-zero weights are an input error") {
    auto p = uniform_profile(*g, 5, 900);
    std::fill(p.origin_weights.begin(), p.origin_weights.end(), 0.0);
    CHECK_THROWS_AS(generate_synthetic(p, 1), InputError);
  }
  SUBCASE("circular profile: boundary origins, center destination") {
    auto city = make_circular_city(8, 3, 100);
    const NodeIndex center = city->index_of(0);
    const auto t = generate_synthetic(circular_profile(*city, center, 10, 600), 3);
    REQUIRE(t.requests.size() == 10);
    for (const Request& r : t.requests) {
      CHECK(r.destination == center);
      CHECK(city->travel_time(center, r.origin) == 300);
    }
  }
  SUBCASE("two-zone profile puts the requested share in the west half") {
    const auto p = two_zone_profile(*g, 0.8, 0.3, 100, 600);
    double west_o = 0, total_o = 0, west_d = 0, total_d = 0;
    for (NodeIndex u = 0; u < 16; ++u) {
      const bool west = g->node(u).x <= 1.5;
      total_o += p.origin_weights[static_cast<std::size_t>(u)];
      total_d += p.destination_weights[static_cast<std::size_t>(u)];
      if (west) {
        west_o += p.origin_weights[static_cast<std::size_t>(u)];
        west_d += p.destination_weights[static_cast<std::size_t>(u)];
      }
    }
    CHECK(west_o / total_o == doctest::Approx(0.8));
    CHECK(west_d / total_d == doctest::Approx(0.3));
  }
}
