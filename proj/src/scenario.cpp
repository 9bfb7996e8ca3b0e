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

#include "ridepool/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace ridepool {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

// Reports errors against one line of the scenario text.
class LineReader {
 public:
  LineReader(const std::string& source, std::size_t line) : source_(source), line_(line) {}

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(source_, line_, what); }

  double number(const std::string& text) const {
    const auto slash = text.find('/');
    if (slash != std::string::npos) {
      const double den = number(trim(text.substr(slash + 1)));
      if (den == 0) fail("division by zero in '" + text + "'");
      return number(trim(text.substr(0, slash))) / den;
    }
    double v = 0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end || text.empty()) fail("expected a number, got '" + text + "'");
    return v;
  }

  long long integer(const std::string& text) const {
    long long v = 0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end || text.empty()) fail("expected an integer, got '" + text + "'");
    return v;
  }

  bool boolean(const std::string& text) const {
    if (text == "true" || text == "yes" || text == "on" || text == "1") return true;
    if (text == "false" || text == "no" || text == "off" || text == "0") return false;
    fail("expected true or false, got '" + text + "'");
  }

  std::vector<double> numbers(const std::string& text) const {
    std::vector<double> out;
    for (const auto& item : split(text, ',')) out.push_back(number(item));
    if (out.empty()) fail("empty list");
    return out;
  }

 private:
  const std::string& source_;
  std::size_t line_;
};

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& value) {
  std::filesystem::path p(value);
  return p.is_absolute() ? p : base / p;
}

std::uint64_t derive(std::uint64_t seed, std::uint32_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), stream};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

std::string format_number(double v) {
  std::ostringstream s;
  s.precision(10);
  s << v;
  return s.str();
}

}  // namespace

std::string rate_label(const RateConfig& rate) {
  std::string kind = rate.kind == RateKind::kGeneration ? "gen" : "rej";
  switch (rate.method) {
    case RateMethod::kBasic: return kind + "_B";
    case RateMethod::kSmooth: return kind + "_S";
    case RateMethod::kParticleFilter: return kind + "_PF";
    case RateMethod::kHistorical: return kind + "_H";
  }
  return kind;
}

std::optional<RateConfig> parse_rate_label(const std::string& text) {
  const auto sep = text.find('_');
  if (sep == std::string::npos) return std::nullopt;
  auto kind = parse_rate_kind(text.substr(0, sep));
  auto method = parse_rate_method(text.substr(sep + 1));
  if (!kind || !method) return std::nullopt;
  RateConfig rate;
  rate.kind = *kind;
  rate.method = *method;
  return rate;
}

Scenario parse_scenario(const std::string& text, const std::string& source,
                        const std::filesystem::path& base_dir) {
  Scenario sc;
  sc.base_dir = base_dir;
  double psi = 1.0;
  ParticleFilterParams filter;
  std::set<std::string> seen;

  std::istringstream in(text);
  std::string raw;
  std::size_t number = 0;
  while (std::getline(in, raw)) {
    ++number;
    const LineReader r(source, number);
    const std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) r.fail("expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (value.empty()) r.fail("missing value for '" + key + "'");
    if (!seen.insert(key).second) r.fail("duplicate key '" + key + "'");

    SimConfig& sim = sc.sim;
    if (key == "network") {
      sc.network = value;
    } else if (key == "trace") {
      sc.trace = resolve(base_dir, value);
    } else if (key == "history") {
      sc.history = resolve(base_dir, value);
    } else if (key == "demand") {
      if (value == "uniform") sc.demand = DemandKind::kUniform;
      else if (value == "two_zone") sc.demand = DemandKind::kTwoZone;
      else if (value == "circular") sc.demand = DemandKind::kCircular;
      else r.fail("demand must be uniform, two_zone or circular");
    } else if (key == "requests") {
      sc.request_count = static_cast<int>(r.integer(value));
    } else if (key == "hot_origin_share") {
      sc.hot_origin_share = r.number(value);
    } else if (key == "hot_destination_share") {
      sc.hot_destination_share = r.number(value);
    } else if (key == "vehicles") {
      sc.fleet.count = static_cast<int>(r.integer(value));
    } else if (key == "capacity") {
      sc.fleet.capacity = static_cast<int>(r.integer(value));
    } else if (key == "placement") {
      if (value == "demand") sc.fleet.placement = Placement::kDemandWeighted;
      else if (value == "uniform") sc.fleet.placement = Placement::kUniform;
      else if (value == "explicit") sc.fleet.placement = Placement::kExplicit;
      else r.fail("placement must be demand, uniform or explicit");
    } else if (key == "initial_nodes") {
      for (const auto& item : split(value, ',')) sc.fleet.initial_nodes.push_back(r.integer(item));
    } else if (key == "interval") {
      sim.interval = r.integer(value);
    } else if (key == "horizon") {
      sim.horizon = r.integer(value);
    } else if (key == "max_wait") {
      sim.constraints.max_wait = r.integer(value);
    } else if (key == "max_delay") {
      sim.constraints.max_delay = r.integer(value);
    } else if (key == "fifo") {
      sim.constraints.fifo = r.boolean(value);
    } else if (key == "wait_price") {
      sim.prices.wait_price = r.number(value);
    } else if (key == "ride_price") {
      sim.prices.ride_price = r.number(value);
    } else if (key == "operator_price") {
      sim.prices.operator_price = r.number(value);
    } else if (key == "reject_penalty") {
      sim.prices.reject_penalty = r.number(value);
    } else if (key == "mode") {
      auto mode = parse_mode(value);
      if (!mode) r.fail("mode must be none, rewards, artificial or both");
      sim.mode = *mode;
    } else if (key == "theta") {
      sc.thetas = r.numbers(value);
    } else if (key == "gamma") {
      sc.gammas = r.numbers(value);
    } else if (key == "rate") {
      sc.rates.clear();
      for (const auto& item : split(value, ',')) {
        auto rate = parse_rate_label(item);
        if (!rate) r.fail("unknown rate '" + item + "' (expected e.g. gen_B, rej_PF)");
        sc.rates.push_back(*rate);
      }
    } else if (key == "reward_node") {
      if (value == "last") sim.reward_node = RewardNode::kLastNode;
      else if (value == "idle") sim.reward_node = RewardNode::kIdleNode;
      else r.fail("reward_node must be last or idle");
    } else if (key == "psi") {
      psi = r.number(value);
    } else if (key == "pf_particles") {
      filter.particles = static_cast<int>(r.integer(value));
    } else if (key == "pf_volatility") {
      filter.volatility = r.number(value);
    } else if (key == "artificial_count") {
      sim.artificial.count = static_cast<int>(r.integer(value));
    } else if (key == "artificial_spacing") {
      sim.artificial.spacing = r.integer(value);
    } else if (key == "length_window") {
      sim.length_window = r.integer(value);
    } else if (key == "keep_fraction") {
      sim.keep_fraction = r.number(value);
    } else if (key == "artificial_keep_fraction") {
      sim.artificial_keep_fraction = r.number(value);
    } else if (key == "max_trip_size") {
      sim.max_trip_size = static_cast<int>(r.integer(value));
    } else if (key == "rebalancing") {
      sim.rebalancing = r.boolean(value);
    } else if (key == "zone_radius") {
      sim.zone_radius = r.integer(value);
    } else if (key == "seeds") {
      sc.seeds.clear();
      for (const auto& item : split(value, ',')) {
        const auto dots = item.find("..");
        if (dots == std::string::npos) {
          sc.seeds.push_back(static_cast<std::uint64_t>(r.integer(item)));
          continue;
        }
        const auto lo = r.integer(trim(item.substr(0, dots)));
        const auto hi = r.integer(trim(item.substr(dots + 2)));
        if (lo < 0 || hi < lo) r.fail("bad seed range '" + item + "'");
        for (auto s = lo; s <= hi; ++s) sc.seeds.push_back(static_cast<std::uint64_t>(s));
      }
    } else if (key == "output") {
      sc.output = value;
    } else {
      r.fail("unknown key '" + key + "'");
    }
  }

  if (sc.network.empty()) throw ParseError(source, 0, "missing required key 'network'");
  if (sc.rates.empty() || sc.thetas.empty() || sc.gammas.empty() || sc.seeds.empty()) {
    throw ParseError(source, 0, "sweep axes must be non-empty");
  }
  for (RateConfig& rate : sc.rates) {
    rate.psi = psi;
    rate.filter = filter;
  }
  sc.sim.reward_rates = sc.rates.front();
  sc.sim.artificial_rates = sc.rates.front();
  if (!sc.output.is_absolute()) sc.output = base_dir / sc.output;
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingInputError("cannot read scenario " + path.string());
  std::stringstream text;
  text << in.rdbuf();
  return parse_scenario(text.str(), path.string(), path.parent_path());
}

std::unique_ptr<RoadNetwork> build_network(const Scenario& scenario) {
  const std::string& spec = scenario.network;
  auto bad = [&] { return InputError("bad network generator '" + spec + "'"); };
  auto to_int = [&](const std::string& s) {
    long long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) throw bad();
    return v;
  };
  if (spec.rfind("grid:", 0) == 0) {
    const auto parts = split(spec.substr(5), ':');
    if (parts.size() != 2) throw bad();
    const auto dims = split(parts[0], 'x');
    if (dims.size() != 2) throw bad();
    return make_grid(static_cast<int>(to_int(dims[0])), static_cast<int>(to_int(dims[1])),
                     to_int(parts[1]));
  }
  if (spec.rfind("circular:", 0) == 0) {
    const auto parts = split(spec.substr(9), ':');
    if (parts.size() != 3) throw bad();
    return make_circular_city(static_cast<int>(to_int(parts[0])), static_cast<int>(to_int(parts[1])),
                              to_int(parts[2]));
  }
  const auto path = resolve(scenario.base_dir, spec);
  if (!std::filesystem::exists(path)) throw MissingInputError("network file not found: " + path.string());
  return load_network(path);
}

std::string Cell::label() const {
  return rate_label(rate) + "_t" + format_number(theta) + "_g" + format_number(gamma) + "_s" +
         std::to_string(seed);
}

std::vector<Cell> sweep_cells(const Scenario& scenario) {
  std::vector<Cell> cells;
  for (const RateConfig& rate : scenario.rates) {
    for (double theta : scenario.thetas) {
      for (double gamma : scenario.gammas) {
        for (std::uint64_t seed : scenario.seeds) cells.push_back({rate, theta, gamma, seed});
      }
    }
  }
  return cells;
}

SimConfig cell_config(const Scenario& scenario, const Cell& cell) {
  SimConfig sim = scenario.sim;
  sim.theta = cell.theta;
  sim.artificial.penalty_ratio = cell.gamma;
  sim.reward_rates = cell.rate;
  // Artificial origins always come from generation rates of the same method.
  sim.artificial_rates = cell.rate;
  sim.artificial_rates.kind = RateKind::kGeneration;
  sim.seed = cell.seed;
  return sim;
}

ScenarioInputs load_inputs(const Scenario& scenario) {
  ScenarioInputs in;
  in.network = build_network(scenario);
  if (scenario.trace) {
    if (!std::filesystem::exists(*scenario.trace)) {
      throw MissingInputError("trace file not found: " + scenario.trace->string());
    }
    in.trace = load_trace(*scenario.trace, *in.network, scenario.sim.horizon);
  }
  if (scenario.history) {
    if (!std::filesystem::is_directory(*scenario.history)) {
      throw MissingInputError("history directory not found: " + scenario.history->string());
    }
    in.history = load_historical(*scenario.history, *in.network, scenario.sim.horizon);
  }
  return in;
}

namespace {

DemandProfile scenario_profile(const Scenario& scenario, const RoadNetwork& network) {
  const Seconds period = scenario.sim.horizon;
  switch (scenario.demand) {
    case DemandKind::kTwoZone:
      return two_zone_profile(network, scenario.hot_origin_share, scenario.hot_destination_share,
                              scenario.request_count, period);
    case DemandKind::kCircular: {
      const NodeIndex center = network.contains(0) ? network.index_of(0) : 0;
      return circular_profile(network, center, scenario.request_count, period);
    }
    case DemandKind::kUniform: break;
  }
  return uniform_profile(network, scenario.request_count, period);
}

}  // namespace

DemandTrace cell_demand(const Scenario& scenario, const ScenarioInputs& inputs, std::uint64_t seed) {
  if (inputs.trace) return *inputs.trace;
  return generate_synthetic(scenario_profile(scenario, *inputs.network), derive(seed, 11));
}

RunResult run_cell(const Scenario& scenario, const ScenarioInputs& inputs, const Cell& cell) {
  const RoadNetwork& network = *inputs.network;
  const DemandTrace demand = cell_demand(scenario, inputs, cell.seed);
  std::vector<double> weights(network.node_count(), 0.0);
  if (inputs.trace) {
    for (const Request& r : demand.requests) weights[static_cast<std::size_t>(r.origin)] += 1.0;
  } else {
    weights = scenario_profile(scenario, network).origin_weights;
  }
  auto fleet = place_fleet(scenario.fleet, network, derive(cell.seed, 12), weights);
  Simulation sim(network, demand, inputs.history, std::move(fleet), cell_config(scenario, cell));
  return sim.run();
}

std::vector<SweepRow> run_sweep(const Scenario& scenario, int workers,
                                std::vector<std::string>* errors) {
  const ScenarioInputs inputs = load_inputs(scenario);
  const auto cells = sweep_cells(scenario);
  for (const Cell& cell : cells) cell_config(scenario, cell).validate();

  std::vector<std::optional<RunReport>> reports(cells.size());
  std::vector<std::string> failures(cells.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      try {
        const RunResult result = run_cell(scenario, inputs, cells[i]);
        write_outputs(result, scenario.output / "cells" / cells[i].label());
        reports[i] = result.report;
      } catch (const std::exception& e) {
        failures[i] = cells[i].label() + ": " + e.what();
      }
    }
  };
  const int threads = std::clamp(workers, 1, static_cast<int>(std::max<std::size_t>(cells.size(), 1)));
  {
    std::vector<std::jthread> pool;
    for (int t = 1; t < threads; ++t) pool.emplace_back(work);
    work();
  }

  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (reports[i]) rows.push_back({cells[i], *reports[i]});
    if (!failures[i].empty() && errors) errors->push_back(failures[i]);
  }
  std::filesystem::create_directories(scenario.output);
  write_sweep_csv(rows, scenario.output / "sweep.csv");
  return rows;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out.precision(12);
  out << "rate,theta,gamma,seed,requests,served,rejected,rejection_rate,vht_hours,mean_wait_s,"
         "mean_detour_s,aposteriori_cost,mismatch_mean\n";
  for (const SweepRow& row : rows) {
    const RunReport& r = row.report;
    out << rate_label(row.cell.rate) << ',' << row.cell.theta << ',' << row.cell.gamma << ','
        << row.cell.seed << ',' << r.requests << ',' << r.served << ',' << r.rejected << ','
        << r.rejection_rate << ',' << r.vht_hours << ',' << r.mean_wait << ',' << r.mean_detour
        << ',' << r.aposteriori_cost << ',' << r.mismatch_mean << '\n';
  }
}

std::vector<ZoneDelta> compare_zones(const std::vector<ZoneRow>& a, const std::vector<ZoneRow>& b) {
  if (a.size() != b.size()) throw InputError("reports use different zone partitions");
  std::vector<ZoneDelta> out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].zone != b[i].zone || a[i].center != b[i].center || a[i].size != b[i].size) {
      throw InputError("reports use different zone partitions");
    }
    out.push_back({a[i].zone, a[i].center, b[i].vehicle_share - a[i].vehicle_share,
                   b[i].rejection_share - a[i].rejection_share, b[i].mismatch - a[i].mismatch});
  }
  return out;
}

}  // namespace ridepool
