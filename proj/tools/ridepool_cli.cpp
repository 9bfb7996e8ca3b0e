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

// Command-line front end: run scenario sweeps, compare two runs zone by zone,
// cluster a network into zones, validate a scenario file.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ridepool/scenario.hpp"

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitMissingInput = 2;

int worker_count() {
  const char* env = std::getenv("RIDEPOOL_WORKERS");
  if (env == nullptr) return 1;
  try {
    return std::max(1, std::stoi(env));
  } catch (const std::exception&) {
    std::cerr << "ignoring invalid RIDEPOOL_WORKERS='" << env << "'\n";
    return 1;
  }
}

std::filesystem::path zones_file(const std::filesystem::path& p) {
  return std::filesystem::is_directory(p) ? p / "zones.csv" : p;
}

int run(const std::string& path) {
  const auto scenario = ridepool::load_scenario(path);
  std::vector<std::string> errors;
  const auto rows = ridepool::run_sweep(scenario, worker_count(), &errors);
  for (const auto& e : errors) std::cerr << "cell failed: " << e << '\n';
  std::cout << rows.size() << " run(s) written to " << (scenario.output / "sweep.csv").string()
            << '\n';
  return errors.empty() ? 0 : kExitFailure;
}

int compare(const std::string& a, const std::string& b) {
  const auto deltas =
      ridepool::compare_zones(ridepool::read_zones_csv(zones_file(a)), ridepool::read_zones_csv(zones_file(b)));
  std::cout.precision(12);
  std::cout << "zone,center_node,delta_vehicle_share,delta_rejection_share,delta_mismatch\n";
  for (const auto& d : deltas) {
    std::cout << d.zone << ',' << d.center << ',' << d.vehicle_share << ',' << d.rejection_share
              << ',' << d.mismatch << '\n';
  }
  return 0;
}

int zones(const std::string& network_path, long long radius, const std::string& output) {
  if (!std::filesystem::exists(network_path)) {
    throw ridepool::MissingInputError("network file not found: " + network_path);
  }
  const auto network = ridepool::load_network(network_path);
  const auto partition = ridepool::cluster_zones(*network, radius);
  if (!output.empty()) {
    ridepool::write_zones_csv(*network, partition, output);
  } else {
    std::cout << "node_id,zone_id\n";
    for (std::size_t u = 0; u < network->node_count(); ++u) {
      std::cout << network->node(static_cast<ridepool::NodeIndex>(u)).id << ','
                << partition.zone_of[u] << '\n';
    }
  }
  std::cerr << partition.zone_count() << " zones for t_M=" << radius << " s\n";
  return 0;
}

int validate(const std::string& path) {
  const auto scenario = ridepool::load_scenario(path);
  const auto inputs = ridepool::load_inputs(scenario);
  const auto cells = ridepool::sweep_cells(scenario);
  for (const auto& cell : cells) ridepool::cell_config(scenario, cell).validate();
  const auto zones = ridepool::cluster_zones(*inputs.network, scenario.sim.zone_radius);
  std::cout << "ok: " << inputs.network->node_count() << " nodes, " << zones.zone_count()
            << " zones, " << scenario.fleet.count << " vehicles, " << cells.size()
            << " sweep cell(s)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Anticipatory ridepooling simulator"};
  app.require_subcommand(1);

  std::string scenario_path;
  auto* run_cmd = app.add_subcommand("run", "Run every cell of a scenario sweep");
  run_cmd->add_option("scenario", scenario_path, "Scenario file")->required();

  std::string a, b;
  auto* compare_cmd = app.add_subcommand("compare", "Per-zone deltas between two runs (b - a)");
  compare_cmd->add_option("a", a, "Run directory or zones.csv")->required();
  compare_cmd->add_option("b", b, "Run directory or zones.csv")->required();

  std::string network_path, output;
  long long radius = 150;
  auto* zones_cmd = app.add_subcommand("zones", "Cluster a network into zones of radius t_M");
  zones_cmd->add_option("network", network_path, "Network file")->required();
  zones_cmd->add_option("t_M", radius, "Zone radius in seconds")->required();
  zones_cmd->add_option("-o,--output", output, "Write node_id,zone_id CSV here");

  std::string validate_path;
  auto* validate_cmd = app.add_subcommand("validate", "Check a scenario without running it");
  validate_cmd->add_option("scenario", validate_path, "Scenario file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) return run(scenario_path);
    if (*compare_cmd) return compare(a, b);
    if (*zones_cmd) return zones(network_path, radius, output);
    if (*validate_cmd) return validate(validate_path);
  } catch (const ridepool::MissingInputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitMissingInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}
