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
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ridepool/engine.hpp"
#include "ridepool/errors.hpp"

namespace ridepool {

// A file the scenario refers to does not exist.
class MissingInputError : public InputError {
 public:
  using InputError::InputError;
};

enum class DemandKind : std::uint8_t { kUniform, kTwoZone, kCircular };

struct Scenario {
  std::filesystem::path base_dir;  // relative paths resolve against this

  // A file path, or a generator: grid:<rows>x<cols>:<edge seconds>,
  // circular:<spokes>:<rings>:<ring seconds>.
  std::string network;
  std::optional<std::filesystem::path> trace;    // replaces synthetic demand
  std::optional<std::filesystem::path> history;  // directory of day traces

  DemandKind demand = DemandKind::kUniform;
  int request_count = 400;
  double hot_origin_share = 0.8;
  double hot_destination_share = 0.5;

  FleetConfig fleet;
  SimConfig sim;

  // Sweep axes; every combination is one run.
  std::vector<RateConfig> rates{RateConfig{}};
  std::vector<double> thetas{0.0};
  std::vector<double> gammas{0.0};
  std::vector<std::uint64_t> seeds{1};

  std::filesystem::path output = "out";
};

// key = value lines; see README for the grammar. `source` names the text in
// error messages.
Scenario parse_scenario(const std::string& text, const std::string& source,
                        const std::filesystem::path& base_dir);
Scenario load_scenario(const std::filesystem::path& path);

std::string rate_label(const RateConfig& rate);
std::optional<RateConfig> parse_rate_label(const std::string& text);

std::unique_ptr<RoadNetwork> build_network(const Scenario& scenario);

struct Cell {
  RateConfig rate;
  double theta = 0.0;
  double gamma = 0.0;
  std::uint64_t seed = 1;

  std::string label() const;
};

std::vector<Cell> sweep_cells(const Scenario& scenario);
SimConfig cell_config(const Scenario& scenario, const Cell& cell);

// Inputs shared by every cell of a sweep.
struct ScenarioInputs {
  std::unique_ptr<RoadNetwork> network;
  std::optional<DemandTrace> trace;
  std::vector<DemandTrace> history;
};
ScenarioInputs load_inputs(const Scenario& scenario);

// Demand and fleet for one seed (synthetic demand is drawn per seed).
DemandTrace cell_demand(const Scenario& scenario, const ScenarioInputs& inputs, std::uint64_t seed);
RunResult run_cell(const Scenario& scenario, const ScenarioInputs& inputs, const Cell& cell);

struct SweepRow {
  Cell cell;
  RunReport report;
};

// Runs every cell on `workers` threads, writes per-cell outputs under
// <output>/cells/<label>/ and the aggregate <output>/sweep.csv. Failed cells
// are reported in `errors` and left out of sweep.csv.
std::vector<SweepRow> run_sweep(const Scenario& scenario, int workers,
                                std::vector<std::string>* errors);

void write_sweep_csv(const std::vector<SweepRow>& rows, const std::filesystem::path& path);

struct ZoneDelta {
  int zone = 0;
  NodeId center = 0;
  double vehicle_share = 0.0;
  double rejection_share = 0.0;
  double mismatch = 0.0;
};

// b minus a per zone; throws InputError when the partitions differ.
std::vector<ZoneDelta> compare_zones(const std::vector<ZoneRow>& a, const std::vector<ZoneRow>& b);

}  // namespace ridepool
