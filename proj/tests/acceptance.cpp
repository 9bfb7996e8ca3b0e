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

// Acceptance checks. Prints one PASS or FAIL line per criterion and exits
// with 1 when any criterion fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>

#include "ridepool/scenario.hpp"
#include "testkit.hpp"

using namespace ridepool;

namespace {

namespace fs = std::filesystem;

const fs::path kScenarios = RIDEPOOL_SCENARIO_DIR;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

// Every simulated run goes through here so criterion 4 covers all of them.
struct AuditTally {
  int runs = 0;
  int served = 0;
  AuditResult total;
} g_audit;

void audit(const RunResult& r, const Constraints& cons, int capacity) {
  const AuditResult a = audit_events(r.events, cons, capacity);
  ++g_audit.runs;
  g_audit.served += a.served;
  g_audit.total.wait_violations += a.wait_violations;
  g_audit.total.delay_violations += a.delay_violations;
  g_audit.total.capacity_violations += a.capacity_violations;
  g_audit.total.order_violations += a.order_violations;
}

RunResult audited_run(const Scenario& s, const ScenarioInputs& in, const Cell& cell) {
  RunResult r = run_cell(s, in, cell);
  audit(r, s.sim.constraints, s.fleet.capacity);
  return r;
}

double mean(const std::vector<double>& xs) {
  return xs.empty() ? 0.0 : std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

// ---------------------------------------------------------------------------

Verdict assignment_oracle() {
  std::mt19937_64 rng(601);
  int instances = 0, nonempty = 0;
  for (int trial = 0; instances < 200; ++trial) {
    const int n = 1 + trial % 8;
    const int v = 1 + (trial / 8) % 4;
    auto g = testkit::random_network(rng, 10, 20, 20, 120);
    std::uniform_int_distribution<NodeIndex> node(0, 9);
    std::vector<Request> reqs;
    std::vector<RequestId> waiting;
    std::vector<double> penalty;
    for (int k = 0; k < n; ++k) {
      Request r;
      r.id = k;
      r.origin = node(rng);
      do {
        r.destination = node(rng);
      } while (r.destination == r.origin);
      r.request_time = 900 + static_cast<Seconds>(rng() % 120);
      r.artificial = rng() % 4 == 0;
      reqs.push_back(r);
      waiting.push_back(k);
      penalty.push_back(r.artificial ? 3.09 / 60.0 : 3.09);
    }
    std::shuffle(waiting.begin(), waiting.end(), rng);
    std::vector<double> shuffled;
    for (RequestId q : waiting) shuffled.push_back(penalty[static_cast<std::size_t>(q)]);

    std::vector<RoutingContext> vehicles;
    for (int k = 0; k < v; ++k) {
      RoutingContext ctx;
      ctx.vehicle = 3 * k + static_cast<int>(rng() % 3);
      ctx.capacity = 1 + static_cast<int>(rng() % 3);
      ctx.anchor = {node(rng), 1000};
      vehicles.push_back(ctx);
    }
    RateField field{RateKind::kGeneration, RateMethod::kBasic, 1000, std::vector<double>(10)};
    for (double& x : field.values) x = static_cast<double>(rng() % 5);
    EnumerationParams params;
    params.constraints.max_wait = 300;
    params.constraints.max_delay = 500;
    params.cost.theta = static_cast<double>(rng() % 3) * 0.3;
    params.cost.reward_rate = &field;
    const CandidateSet cands = enumerate_candidates(waiting, vehicles, params, *g, reqs);
    const Assignment got = solve_assignment(cands, waiting, shuffled);
    const double want = testkit::assignment_oracle(cands, waiting, shuffled);
    ++instances;
    nonempty += !cands.entries.empty();
    if (got.objective != want) {
      return {false, format("instance %d: solver %.17g, enumeration %.17g", instances, got.objective, want)};
    }
  }
  return {true, format("%d instances (%d with candidates), all exactly equal", instances, nonempty)};
}

Verdict routing_oracle() {
  std::mt19937_64 rng(602);
  int compared = 0, feasible = 0;
  for (int trial = 0; compared < 200; ++trial) {
    Constraints cons;
    cons.max_wait = 240 + static_cast<Seconds>(rng() % 360);
    cons.max_delay = cons.max_wait + static_cast<Seconds>(rng() % 400);
    auto in = testkit::random_routing_instance(rng, cons, 4);
    if (!in) continue;
    CostParams params;
    params.theta = static_cast<double>(rng() % 3);
    params.reward_node = rng() % 2 ? RewardNode::kIdleNode : RewardNode::kLastNode;
    params.reward_rate = &in->rate;
    const auto want = testkit::route_oracle(in->ctx, in->trip, cons, params, *in->network, in->requests);
    const auto got = best_route(in->ctx, in->trip, cons, params, *in->network, in->requests);
    ++compared;
    if (want.has_value() != got.has_value()) {
      return {false, format("pair %d: feasibility differs", compared)};
    }
    if (!want) continue;
    ++feasible;
    if (got->anticipatory_cost != want->anticipatory) {
      return {false, format("pair %d: router %.17g, search %.17g", compared, got->anticipatory_cost,
                            want->anticipatory)};
    }
  }
  return {true, format("%d pairs (%d feasible), all exactly equal", compared, feasible)};
}

// ---------------------------------------------------------------------------

struct TwoZoneRuns {
  Scenario scenario;
  std::vector<double> thetas;
  std::vector<std::uint64_t> seeds;
  std::map<double, std::vector<RunReport>> by_theta;  // seed order
  double slowest = 0.0;                               // seconds, one run
};

TwoZoneRuns run_two_zone() {
  TwoZoneRuns out;
  out.scenario = load_scenario(kScenarios / "acceptance_rewards.scn");
  out.thetas = out.scenario.thetas;
  out.seeds = out.scenario.seeds;
  const ScenarioInputs in = load_inputs(out.scenario);
  for (const Cell& cell : sweep_cells(out.scenario)) {
    const auto t0 = std::chrono::steady_clock::now();
    RunResult r = audited_run(out.scenario, in, cell);
    out.slowest = std::max(out.slowest, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    out.by_theta[cell.theta].push_back(std::move(r.report));
  }
  return out;
}

double mean_of(const std::vector<RunReport>& reports, double RunReport::*field) {
  std::vector<double> xs;
  for (const auto& r : reports) xs.push_back(r.*field);
  return mean(xs);
}

// Reward weight with the lowest mean rejection rate among the nonzero ones.
double best_theta(const TwoZoneRuns& runs) {
  double best = 0.0, best_rate = std::numeric_limits<double>::infinity();
  for (double theta : runs.thetas) {
    if (theta == 0.0) continue;
    const double rate = mean_of(runs.by_theta.at(theta), &RunReport::rejection_rate);
    if (rate < best_rate) {
      best_rate = rate;
      best = theta;
    }
  }
  return best;
}

Verdict identity(const TwoZoneRuns& runs) {
  Scenario plain = runs.scenario;
  plain.sim.mode = Mode::kNone;
  plain.thetas = {0.0};
  const ScenarioInputs in = load_inputs(plain);
  const auto& zero = runs.by_theta.at(0.0);
  int checked = 0;
  for (std::size_t k = 0; k < runs.seeds.size() && checked < 10; ++k, ++checked) {
    Cell cell;
    cell.rate = plain.rates.front();
    cell.seed = runs.seeds[k];
    const RunResult r = audited_run(plain, in, cell);
    if (!(r.report == zero[k])) return {false, format("seed %llu differs", static_cast<unsigned long long>(cell.seed))};
  }
  return {checked == 10, format("%d seeds, reports identical", checked)};
}

Verdict rewards_direction(const TwoZoneRuns& runs, double theta) {
  const auto& base = runs.by_theta.at(0.0);
  const auto& best = runs.by_theta.at(theta);
  const double mz0 = mean_of(base, &RunReport::mismatch_mean);
  const double mz = mean_of(best, &RunReport::mismatch_mean);
  const double rej0 = mean_of(base, &RunReport::rejection_rate);
  const double rej = mean_of(best, &RunReport::rejection_rate);
  const double vht0 = mean_of(base, &RunReport::vht_hours);
  const double vht = mean_of(best, &RunReport::vht_hours);
  const double drop = 1.0 - rej / rej0;
  const double vht_rise = vht / vht0 - 1.0;
  const bool pass = mz < mz0 && drop >= 0.03 && vht_rise <= 0.25;
  return {pass, format("theta %g over %zu seeds: M_z %.4f vs %.4f, rejection %.4f vs %.4f (%+.1f%%), "
                       "VHT %+.1f%%",
                       theta, base.size(), mz, mz0, rej, rej0, -100.0 * drop, 100.0 * vht_rise)};
}

Verdict saved_rejections(const TwoZoneRuns& runs, double theta) {
  const auto& base = runs.by_theta.at(0.0);
  const auto& best = runs.by_theta.at(theta);
  int shaped = 0;
  for (std::size_t k = 0; k < base.size(); ++k) {
    const auto& a = base[k].accumulated_rejections;
    const auto& b = best[k].accumulated_rejections;
    const std::size_t quarter = a.size() / 4;
    bool early = false;
    for (std::size_t s = 0; s < quarter; ++s) early = early || a[s] - b[s] <= 0;
    const bool late = !a.empty() && a.back() - b.back() > 0;
    shaped += early && late;
  }
  const double share = static_cast<double>(shaped) / static_cast<double>(base.size());
  return {share >= 0.7, format("theta %g: %d of %zu seeds (%.0f%%) flat or negative early and positive at the end",
                               theta, shaped, base.size(), 100.0 * share)};
}

Verdict determinism(const TwoZoneRuns& runs, double theta) {
  const ScenarioInputs in = load_inputs(runs.scenario);
  Cell cell;
  cell.rate = runs.scenario.rates.front();
  cell.theta = theta;
  cell.seed = runs.seeds.front();
  const fs::path root = fs::temp_directory_path() / "ridepool_acceptance";
  fs::remove_all(root);
  for (const char* dir : {"a", "b"}) write_outputs(audited_run(runs.scenario, in, cell), root / dir);
  auto bytes = [](const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(f), {});
  };
  int files = 0;
  for (const auto& entry : fs::directory_iterator(root / "a")) {
    const fs::path other = root / "b" / entry.path().filename();
    if (!fs::exists(other) || bytes(entry.path()) != bytes(other)) {
      return {false, format("%s differs", entry.path().filename().string().c_str())};
    }
    ++files;
  }
  const bool fast = runs.slowest <= 30.0;
  return {fast && files > 0, format("%d output files byte-identical; slowest rewards run %.2f s", files, runs.slowest)};
}

// ---------------------------------------------------------------------------

Verdict artificial_direction() {
  const Scenario s = load_scenario(kScenarios / "acceptance_artificial.scn");
  const ScenarioInputs in = load_inputs(s);
  std::map<double, std::vector<RunReport>> by_gamma;
  for (const Cell& cell : sweep_cells(s)) by_gamma[cell.gamma].push_back(audited_run(s, in, cell).report);

  // Best ratio: the lowest mean a-posteriori cost.
  double best = 0.0, best_cost = std::numeric_limits<double>::infinity();
  for (const auto& [gamma, reports] : by_gamma) {
    if (gamma == 0.0) continue;
    const double cost = mean_of(reports, &RunReport::aposteriori_cost);
    if (cost < best_cost) {
      best_cost = cost;
      best = gamma;
    }
  }
  const auto& base = by_gamma.at(0.0);
  const auto& chosen = by_gamma.at(best);
  const double w0 = mean_of(base, &RunReport::mean_wait), w = mean_of(chosen, &RunReport::mean_wait);
  const double d0 = mean_of(base, &RunReport::mean_detour), d = mean_of(chosen, &RunReport::mean_detour);
  const double v0 = mean_of(base, &RunReport::vht_hours), v = mean_of(chosen, &RunReport::vht_hours);
  const bool pass = w < w0 && d < d0 && v > v0;
  return {pass, format("gamma 1/%.0f over %zu seeds: wait %.1f vs %.1f s, detour %.1f vs %.1f s, VHT %.2f vs %.2f h",
                       1.0 / best, base.size(), w, w0, d, d0, v, v0)};
}

Verdict circular_city() {
  const Scenario s = load_scenario(kScenarios / "acceptance_circular.scn");
  const ScenarioInputs in = load_inputs(s);
  const RoadNetwork& g = *in.network;
  const NodeIndex center = g.index_of(0);
  Seconds return_time = 0;
  for (NodeIndex u = 0; u < static_cast<NodeIndex>(g.node_count()); ++u) {
    return_time = std::max(return_time, g.travel_time(center, u));
  }
  if (return_time <= s.sim.constraints.max_wait) {
    return {false, format("return time %lld s does not exceed the waiting limit", static_cast<long long>(return_time))};
  }

  int late_new = 0, late_rejected = 0, outside = 0, vehicles = 0;
  for (const Cell& cell : sweep_cells(s)) {
    const DemandTrace demand = cell_demand(s, in, cell.seed);
    auto fleet = place_fleet(s.fleet, g, cell.seed, circular_profile(g, center, 1, s.sim.horizon).origin_weights);
    Simulation sim(g, demand, {}, std::move(fleet), cell_config(s, cell));
    while (sim.step()) {
    }
    const int center_zone = sim.zones().zone_of[static_cast<std::size_t>(center)];
    for (const Vehicle& v : sim.vehicles()) {
      ++vehicles;
      outside += sim.zones().zone_of[static_cast<std::size_t>(v.node)] != center_zone;
    }
    const RunResult r = sim.run();
    audit(r, s.sim.constraints, s.fleet.capacity);
    const std::size_t from = r.stages.size() - r.stages.size() / 4;
    for (std::size_t k = from; k < r.stages.size(); ++k) {
      late_new += r.stages[k].new_requests;
      late_rejected += r.stages[k].rejected;
    }
  }
  const double share = late_new ? static_cast<double>(late_rejected) / late_new : 0.0;
  return {late_new > 0 && share >= 0.95 && outside == 0,
          format("return %lld s > %lld s; late rejections %d of %d (%.1f%%); %d of %d vehicles outside the center zone",
                 static_cast<long long>(return_time), static_cast<long long>(s.sim.constraints.max_wait),
                 late_rejected, late_new, 100.0 * share, outside, vehicles)};
}

// ---------------------------------------------------------------------------

Verdict rate_properties() {
  std::vector<std::string> failures;

  // Filter weights at every stage of a two-zone demand stream.
  {
    auto g = make_grid(10, 10, 60);
    const ZonePartition zones = cluster_zones(*g, 150);
    const DemandTrace trace = generate_synthetic(two_zone_profile(*g, 0.8, 0.2, 400, 3600), 5);
    RateConfig cfg;
    cfg.method = RateMethod::kParticleFilter;
    RateEstimator est(*g, &zones, cfg, {}, 9);
    std::size_t next = 0;
    double worst = 0.0;
    int stages = 0;
    for (Seconds t = 60; t <= 3600; t += 60, ++stages) {
      std::vector<NodeIndex> emerged;
      while (next < trace.requests.size() && trace.requests[next].request_time <= t) {
        emerged.push_back(trace.requests[next++].origin);
      }
      est.update(t - 60, t, emerged, {});
      for (const auto& w : est.filter_state().weight) {
        worst = std::max(worst, std::abs(std::accumulate(w.begin(), w.end(), 0.0) - 1.0));
      }
    }
    if (worst > 1e-9) failures.push_back(format("weights off by %.3g", worst));
  }

  // Adding requests at one node raises the smoothed rate everywhere.
  {
    std::mt19937_64 rng(605);
    auto g = testkit::random_network(rng, 14, 24);
    std::uniform_int_distribution<int> count(0, 4);
    std::uniform_int_distribution<NodeIndex> node(0, 13);
    int bad = 0;
    for (int pair = 0; pair < 100; ++pair) {
      RateField a{RateKind::kGeneration, RateMethod::kBasic, 0, std::vector<double>(14)};
      for (double& x : a.values) x = count(rng);
      RateField b = a;
      b.values[static_cast<std::size_t>(node(rng))] += 1.0 + count(rng);
      const double psi = 0.25 + 0.5 * (pair % 9);
      const RateField sa = smooth_rates(a, *g, psi), sb = smooth_rates(b, *g, psi);
      for (NodeIndex u = 0; u < 14; ++u) bad += !(sb.at(u) > sa.at(u));
    }
    if (bad) failures.push_back(format("%d monotonicity violations", bad));
  }

  // Generation and rejection counts keep their mass.
  {
    std::mt19937_64 rng(606);
    int bad = 0;
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t n = 2 + trial % 20;
      std::uniform_int_distribution<NodeIndex> node(0, static_cast<NodeIndex>(n) - 1);
      std::vector<NodeIndex> emerged, rejected;
      for (int k = 0; k < trial; ++k) emerged.push_back(node(rng));
      for (int k = 0; k < trial / 2; ++k) rejected.push_back(node(rng));
      const BasicRates b = basic_rates(emerged, rejected, n, 60);
      bad += b.generation.total() != static_cast<double>(emerged.size());
      bad += b.rejection.total() != static_cast<double>(rejected.size());
    }
    if (bad) failures.push_back(format("%d mass mismatches", bad));
  }

  // Two days by hand: zone 0 = {0, 1}, zone 1 = {2}.
  {
    ZonePartition zones;
    zones.centers = {0, 2};
    zones.zone_of = {0, 0, 1};
    auto req = [](NodeIndex o, Seconds t) {
      Request r;
      r.origin = o;
      r.destination = o == 2 ? 0 : 2;
      r.request_time = t;
      return r;
    };
    DemandTrace monday, tuesday;
    monday.requests = {req(0, 5), req(1, 30), req(2, 60), req(2, 61), req(0, 119)};
    tuesday.requests = {req(1, 0), req(2, 20), req(0, 90), req(1, 100), req(2, 120)};
    const std::vector<DemandTrace> days{monday, tuesday};
    // (0, 60]: Monday 2 + Tuesday 0 in zone 0, Monday 1 + Tuesday 1 in zone 1.
    const RateField first = historical_rates(days, zones, 0, 60);
    // (60, 120]: Monday 1 + Tuesday 2 in zone 0, Monday 1 + Tuesday 1 in zone 1.
    const RateField second = historical_rates(days, zones, 60, 120);
    const std::vector<double> want_first{1.0, 1.0, 1.0}, want_second{1.5, 1.5, 1.0};
    if (first.values != want_first || second.values != want_second) failures.push_back("historical averages");
  }

  if (failures.empty()) {
    return {true, "filter weights normalized each stage, 100 smoothing pairs monotone, counts conserve mass, "
                  "historical toy matches"};
  }
  std::string detail;
  for (const auto& f : failures) detail += (detail.empty() ? "" : "; ") + f;
  return {false, detail};
}

}  // namespace

int main() {
  int failed = 0;
  auto report = [&](int id, const char* name, const Verdict& v) {
    std::printf("%s %d %s: %s\n", v.pass ? "PASS" : "FAIL", id, name, v.detail.c_str());
    std::fflush(stdout);
    failed += !v.pass;
  };
  auto guarded = [](auto fn) -> Verdict {
    try {
      return fn();
    } catch (const std::exception& e) {
      return {false, std::string("error: ") + e.what()};
    }
  };

  report(1, "assignment equals exhaustive enumeration", guarded(assignment_oracle));
  report(2, "routing equals exhaustive stop ordering", guarded(routing_oracle));

  TwoZoneRuns runs;
  std::string load_error;
  try {
    runs = run_two_zone();
  } catch (const std::exception& e) {
    load_error = e.what();
  }
  const double theta = load_error.empty() ? best_theta(runs) : 0.0;
  auto with_runs = [&](auto fn) -> Verdict {
    if (!load_error.empty()) return {false, "error: " + load_error};
    return guarded(fn);
  };

  report(3, "zero reward weight matches the plain run", with_runs([&] { return identity(runs); }));
  const Verdict artificial = guarded(artificial_direction);
  const Verdict circular = guarded(circular_city);
  const Verdict rates = guarded(rate_properties);
  const Verdict direction = with_runs([&] { return rewards_direction(runs, theta); });
  const Verdict saved = with_runs([&] { return saved_rejections(runs, theta); });
  const Verdict repeat = with_runs([&] { return determinism(runs, theta); });

  const bool clean = g_audit.total.clean() && g_audit.runs > 0;
  report(4, "no constraint violations in any run",
         {clean, format("%d runs, %d served; wait %d, delay %d, capacity %d, order %d", g_audit.runs,
                        g_audit.served, g_audit.total.wait_violations, g_audit.total.delay_violations,
                        g_audit.total.capacity_violations, g_audit.total.order_violations)});
  report(5, "rate estimator properties", rates);
  report(6, "rewards lower mismatch and rejections", direction);
  report(7, "artificial requests lower wait and detour", artificial);
  report(8, "circular city strands the fleet in the center", circular);
  report(9, "saved rejections start flat and end positive", saved);
  report(10, "deterministic outputs and run time", repeat);
  std::printf("%d of 10 criteria failed\n", failed);
  return failed ? 1 : 0;
}
