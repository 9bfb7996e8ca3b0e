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

#include "ridepool/demand.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

#include "ridepool/errors.hpp"

namespace ridepool {

std::string_view to_string(RequestStatus status) {
  switch (status) {
    case RequestStatus::kEmerged: return "emerged";
    case RequestStatus::kWaitingAssignment: return "waiting_assignment";
    case RequestStatus::kAssigned: return "assigned";
    case RequestStatus::kOnboard: return "onboard";
    case RequestStatus::kCompleted: return "completed";
    case RequestStatus::kRejected: return "rejected";
  }
  return "?";
}

bool transition_allowed(RequestStatus from, RequestStatus to, bool artificial) {
  using S = RequestStatus;
  switch (from) {
    case S::kEmerged: return to == S::kWaitingAssignment;
    case S::kWaitingAssignment: return to == S::kAssigned || to == S::kRejected;
    case S::kAssigned:
      return to == S::kWaitingAssignment || (to == S::kOnboard && !artificial);
    case S::kOnboard: return to == S::kCompleted;
    case S::kCompleted:
    case S::kRejected: return false;
  }
  return false;
}

void Request::set_status(RequestStatus next) {
  if (!transition_allowed(status, next, artificial)) {
    throw std::logic_error("request " + std::to_string(id) + ": illegal transition " +
                           std::string(to_string(status)) + " -> " + std::string(to_string(next)));
  }
  status = next;
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    field.erase(0, field.find_first_not_of(" \t\r"));
    field.erase(field.find_last_not_of(" \t\r") + 1);
    out.push_back(field);
  }
  return out;
}

template <typename T>
T parse_number(const std::string& text, const std::string& source, std::size_t line,
               const char* what) {
  std::istringstream in(text);
  T value{};
  std::string rest;
  if (!(in >> value) || (in >> rest)) {
    throw ParseError(source, line, std::string("invalid ") + what + " `" + text + "`");
  }
  return value;
}

void finalize(DemandTrace& trace) {
  std::stable_sort(trace.requests.begin(), trace.requests.end(),
                   [](const Request& a, const Request& b) { return a.request_time < b.request_time; });
  for (std::size_t i = 0; i < trace.requests.size(); ++i) {
    trace.requests[i].id = static_cast<RequestId>(i);
  }
}

}  // namespace

DemandTrace load_trace(const std::filesystem::path& path, const RoadNetwork& network,
                       std::optional<Seconds> period) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open trace file " + path.string());
  const std::string source = path.string();
  DemandTrace trace;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (!header_seen) {
      header_seen = true;
      const auto cols = split_csv(line);
      if (cols.size() < 3 || cols[0] != "time_s" || cols[1] != "origin" || cols[2] != "destination") {
        throw ParseError(source, line_no, "expected header `time_s,origin,destination,party`");
      }
      continue;
    }
    const auto cols = split_csv(line);
    if (cols.size() != 3 && cols.size() != 4) {
      throw ParseError(source, line_no, "expected 3 or 4 fields");
    }
    Request r;
    r.request_time = parse_number<Seconds>(cols[0], source, line_no, "time");
    const auto origin = parse_number<NodeId>(cols[1], source, line_no, "origin");
    const auto destination = parse_number<NodeId>(cols[2], source, line_no, "destination");
    r.party_size = cols.size() == 4 ? parse_number<int>(cols[3], source, line_no, "party") : 1;
    const std::string row = source + " row " + std::to_string(line_no);
    if (r.request_time < 0) throw ValidationError(row + ": negative request time");
    if (r.party_size < 1) throw ValidationError(row + ": party size must be at least 1");
    if (!network.contains(origin)) {
      throw ValidationError(row + ": unknown origin node " + std::to_string(origin));
    }
    if (!network.contains(destination)) {
      throw ValidationError(row + ": unknown destination node " + std::to_string(destination));
    }
    if (origin == destination) throw ValidationError(row + ": origin equals destination");
    r.origin = network.index_of(origin);
    r.destination = network.index_of(destination);
    trace.requests.push_back(r);
  }
  finalize(trace);
  Seconds last = trace.requests.empty() ? 0 : trace.requests.back().request_time;
  trace.period = period.value_or(last);
  if (last > trace.period) {
    throw ValidationError(source + ": request at " + std::to_string(last) +
                          " s lies beyond the period of operation");
  }
  return trace;
}

void write_trace(const DemandTrace& trace, const RoadNetwork& network,
                 const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << "time_s,origin,destination,party\n";
  for (const Request& r : trace.requests) {
    out << r.request_time << ',' << network.node(r.origin).id << ','
        << network.node(r.destination).id << ',' << r.party_size << '\n';
  }
}

std::vector<DemandTrace> load_historical(const std::filesystem::path& dir,
                                         const RoadNetwork& network, Seconds period) {
  if (!std::filesystem::is_directory(dir)) {
    throw InputError("historical dataset directory not found: " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<DemandTrace> days;
  for (const auto& f : files) days.push_back(load_trace(f, network, period));
  if (days.empty()) throw InputError("historical dataset " + dir.string() + " has no day files");
  return days;
}

DemandTrace generate_synthetic(const DemandProfile& profile, std::uint64_t seed) {
  if (profile.count < 0 || profile.period < 0) throw InputError("invalid demand profile");
  const std::size_t n = profile.origin_weights.size();
  if (profile.destination_weights.size() != n) {
    throw InputError("origin and destination weights differ in length");
  }
  DemandTrace trace;
  trace.period = profile.period;
  if (profile.count == 0) return trace;

  auto positive_mass = [](const std::vector<double>& w) {
    double s = 0;
    for (double x : w) {
      if (x < 0) throw InputError("demand weights must be nonnegative");
      s += x;
    }
    return s > 0;
  };
  if (!positive_mass(profile.origin_weights) || !positive_mass(profile.destination_weights)) {
    throw InputError("demand profile has all-zero weights");
  }
  // Some origin must have a destination other than itself.
  bool servable = false;
  for (std::size_t o = 0; o < n && !servable; ++o) {
    if (profile.origin_weights[o] <= 0) continue;
    for (std::size_t d = 0; d < n && !servable; ++d) {
      servable = d != o && profile.destination_weights[d] > 0;
    }
  }
  if (!servable) throw InputError("demand profile admits no origin-destination pair");

  std::mt19937_64 rng(seed);
  std::discrete_distribution<std::size_t> origin_dist(profile.origin_weights.begin(),
                                                      profile.origin_weights.end());
  std::uniform_int_distribution<Seconds> time_dist(0, profile.period);
  for (int k = 0; k < profile.count; ++k) {
    Request r;
    std::size_t o = 0;
    std::vector<double> dest_w;
    for (;;) {
      o = origin_dist(rng);
      dest_w = profile.destination_weights;
      dest_w[o] = 0;
      if (std::accumulate(dest_w.begin(), dest_w.end(), 0.0) > 0) break;
    }
    std::discrete_distribution<std::size_t> dest_dist(dest_w.begin(), dest_w.end());
    r.origin = static_cast<NodeIndex>(o);
    r.destination = static_cast<NodeIndex>(dest_dist(rng));
    r.request_time = time_dist(rng);
    trace.requests.push_back(r);
  }
  finalize(trace);
  return trace;
}

DemandProfile circular_profile(const RoadNetwork& network, NodeIndex center, int count,
                               Seconds period) {
  const std::size_t n = network.node_count();
  DemandProfile p;
  p.count = count;
  p.period = period;
  p.origin_weights.assign(n, 0.0);
  p.destination_weights.assign(n, 0.0);
  Seconds far = 0;
  for (std::size_t u = 0; u < n; ++u) {
    far = std::max(far, network.travel_time(center, static_cast<NodeIndex>(u)));
  }
  for (std::size_t u = 0; u < n; ++u) {
    if (network.travel_time(center, static_cast<NodeIndex>(u)) == far) p.origin_weights[u] = 1.0;
  }
  p.destination_weights[static_cast<std::size_t>(center)] = 1.0;
  return p;
}

DemandProfile two_zone_profile(const RoadNetwork& network, double hot_origin_share,
                               double hot_destination_share, int count, Seconds period) {
  if (hot_origin_share < 0 || hot_origin_share > 1 || hot_destination_share < 0 ||
      hot_destination_share > 1) {
    throw InputError("zone shares must lie in [0, 1]");
  }
  const std::size_t n = network.node_count();
  std::vector<double> xs;
  for (const Node& node : network.nodes()) xs.push_back(node.x);
  std::vector<double> sorted = xs;
  std::sort(sorted.begin(), sorted.end());
  const double median = sorted[(n - 1) / 2];
  std::size_t hot = 0;
  for (double x : xs) hot += x <= median ? 1 : 0;
  const std::size_t cold = n - hot;

  DemandProfile p;
  p.count = count;
  p.period = period;
  p.origin_weights.resize(n);
  p.destination_weights.resize(n);
  for (std::size_t u = 0; u < n; ++u) {
    const bool in_hot = xs[u] <= median;
    const double o = in_hot ? hot_origin_share / static_cast<double>(hot)
                            : (cold ? (1 - hot_origin_share) / static_cast<double>(cold) : 0.0);
    const double d = in_hot ? hot_destination_share / static_cast<double>(hot)
                            : (cold ? (1 - hot_destination_share) / static_cast<double>(cold) : 0.0);
    p.origin_weights[u] = o;
    p.destination_weights[u] = d;
  }
  return p;
}

DemandProfile uniform_profile(const RoadNetwork& network, int count, Seconds period) {
  DemandProfile p;
  p.count = count;
  p.period = period;
  p.origin_weights.assign(network.node_count(), 1.0);
  p.destination_weights.assign(network.node_count(), 1.0);
  return p;
}

}  // namespace ridepool
