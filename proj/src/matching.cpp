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

#include "ridepool/matching.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "ridepool/errors.hpp"

namespace ridepool {
namespace {

bool by_vehicle_then_trip(const RoutedMatch& a, const RoutedMatch& b) {
  if (a.vehicle != b.vehicle) return a.vehicle < b.vehicle;
  if (a.trip.size() != b.trip.size()) return a.trip.size() < b.trip.size();
  return a.trip < b.trip;
}

// Runs fn(i) for i in [0, n), spreading indices over `workers` threads.
template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn fn) {
  const std::size_t w = std::min<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), n);
  if (w <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> pool;
  for (std::size_t t = 0; t < w; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < n; i += w) fn(i);
    });
  }
}

std::vector<RoutedMatch> grow_trips(const RoutingContext& ctx, std::vector<RoutedMatch> singles,
                                    const EnumerationParams& params, const RoadNetwork& network,
                                    std::span<const Request> requests) {
  std::size_t limit = static_cast<std::size_t>(ctx.capacity);
  if (params.max_trip_size > 0) limit = std::min(limit, static_cast<std::size_t>(params.max_trip_size));

  std::vector<RoutedMatch> out = singles;
  std::vector<RoutedMatch> level = std::move(singles);
  for (std::size_t k = 1; k < limit && level.size() > 1; ++k) {
    std::vector<std::vector<RequestId>> known;
    known.reserve(level.size());
    for (const auto& m : level) known.push_back(m.trip);  // sorted: level is sorted by trip

    std::vector<RoutedMatch> next;
    for (std::size_t a = 0; a < level.size(); ++a) {
      const auto& ta = level[a].trip;
      for (std::size_t b = a + 1; b < level.size(); ++b) {
        const auto& tb = level[b].trip;
        if (!std::equal(ta.begin(), ta.end() - 1, tb.begin())) break;
        std::vector<RequestId> trip = ta;
        trip.push_back(tb.back());
        // Every k-subset must itself be feasible; the two that drop one of
        // the last elements are ta and tb.
        bool closed = true;
        std::vector<RequestId> sub;
        for (std::size_t drop = 0; closed && drop + 2 < trip.size(); ++drop) {
          sub.clear();
          for (std::size_t i = 0; i < trip.size(); ++i) {
            if (i != drop) sub.push_back(trip[i]);
          }
          closed = std::binary_search(known.begin(), known.end(), sub);
        }
        if (!closed) continue;
        auto match = best_route(ctx, trip, params.constraints, params.cost, network, requests);
        if (match) next.push_back(std::move(*match));
      }
    }
    out.insert(out.end(), next.begin(), next.end());
    level = std::move(next);
  }
  return out;
}

}  // namespace

CandidateSet enumerate_candidates(std::span<const RequestId> waiting,
                                  std::span<const RoutingContext> vehicles,
                                  const EnumerationParams& params, const RoadNetwork& network,
                                  std::span<const Request> requests) {
  std::vector<RequestId> order(waiting.begin(), waiting.end());
  std::sort(order.begin(), order.end());

  std::vector<std::vector<RoutedMatch>> singles(vehicles.size());
  parallel_for(vehicles.size(), params.workers, [&](std::size_t i) {
    const RoutingContext& ctx = vehicles[i];
    for (RequestId q : order) {
      const Request& r = requests[static_cast<std::size_t>(q)];
      const Seconds reach = ctx.anchor.time + network.travel_time(ctx.anchor.node, r.origin);
      if (reach - r.request_time > params.constraints.max_wait) continue;
      const RequestId trip[] = {q};
      auto match = best_route(ctx, trip, params.constraints, params.cost, network, requests);
      if (match) singles[i].push_back(std::move(*match));
    }
  });

  if (params.keep_fraction < 1.0) {
    CandidateSet flat;
    for (auto& s : singles) flat.entries.insert(flat.entries.end(), s.begin(), s.end());
    const CandidateSet kept = prune_costly(flat, params.keep_fraction);
    for (std::size_t i = 0; i < vehicles.size(); ++i) {
      std::erase_if(singles[i], [&](const RoutedMatch& m) {
        return !std::binary_search(kept.entries.begin(), kept.entries.end(), m,
                                   by_vehicle_then_trip);
      });
    }
  }

  std::vector<std::vector<RoutedMatch>> grown(vehicles.size());
  parallel_for(vehicles.size(), params.workers, [&](std::size_t i) {
    grown[i] = grow_trips(vehicles[i], std::move(singles[i]), params, network, requests);
  });

  CandidateSet out;
  for (auto& g : grown) {
    for (auto& m : g) out.entries.push_back(std::move(m));
  }
  std::sort(out.entries.begin(), out.entries.end(), by_vehicle_then_trip);
  return out;
}

CandidateSet prune_costly(const CandidateSet& candidates, double keep_fraction) {
  if (!(keep_fraction > 0.0) || keep_fraction > 1.0) {
    throw InputError("keep_fraction must lie in (0, 1]");
  }
  CandidateSet out;
  if (keep_fraction == 1.0) {
    out = candidates;
    std::sort(out.entries.begin(), out.entries.end(), by_vehicle_then_trip);
    return out;
  }
  std::map<RequestId, std::vector<std::pair<double, int>>> options;
  for (const auto& m : candidates.entries) {
    if (m.trip.size() == 1) options[m.trip[0]].push_back({m.anticipatory_cost, m.vehicle});
  }
  std::map<RequestId, std::vector<int>> allowed;
  for (auto& [q, list] : options) {
    std::sort(list.begin(), list.end());
    const auto keep = static_cast<std::size_t>(
        std::ceil(keep_fraction * static_cast<double>(list.size()) - 1e-9));
    auto& vehicles = allowed[q];
    for (std::size_t i = 0; i < std::max<std::size_t>(keep, 1) && i < list.size(); ++i) {
      vehicles.push_back(list[i].second);
    }
    std::sort(vehicles.begin(), vehicles.end());
  }
  for (const auto& m : candidates.entries) {
    const bool ok = std::all_of(m.trip.begin(), m.trip.end(), [&](RequestId q) {
      auto it = allowed.find(q);
      return it != allowed.end() &&
             std::binary_search(it->second.begin(), it->second.end(), m.vehicle);
    });
    if (ok) out.entries.push_back(m);
  }
  std::sort(out.entries.begin(), out.entries.end(), by_vehicle_then_trip);
  return out;
}

double assignment_objective(std::span<const RoutedMatch> chosen,
                            std::span<const RequestId> rejected, std::span<const RequestId> waiting,
                            std::span<const double> penalty) {
  std::vector<const RoutedMatch*> order;
  for (const auto& m : chosen) order.push_back(&m);
  std::sort(order.begin(), order.end(),
            [](const RoutedMatch* a, const RoutedMatch* b) { return a->vehicle < b->vehicle; });
  std::vector<std::pair<RequestId, double>> pens;
  for (RequestId q : rejected) {
    auto it = std::find(waiting.begin(), waiting.end(), q);
    if (it == waiting.end()) throw InputError("rejected request is not waiting");
    pens.push_back({q, penalty[static_cast<std::size_t>(it - waiting.begin())]});
  }
  std::sort(pens.begin(), pens.end());
  double total = 0.0;
  for (const RoutedMatch* m : order) total += m->anticipatory_cost;
  for (const auto& p : pens) total += p.second;
  return total;
}

namespace {

struct Cand {
  int vehicle = 0;  // dense
  double cost = 0.0;
  double share = 0.0;
  double saving = 0.0;    // cost minus the penalties of its requests
  std::vector<int> reqs;  // local request indices
  std::size_t entry = 0;
};

// Branch and bound over one connected block of requests and vehicles.
class BlockSolver {
 public:
  BlockSolver(std::vector<Cand> cands, std::vector<double> pen, std::vector<RequestId> ids,
              int vehicle_count)
      : cands_(std::move(cands)), pen_(std::move(pen)), ids_(std::move(ids)),
        covered_(pen_.size(), false), used_(static_cast<std::size_t>(vehicle_count), false),
        by_request_(pen_.size()), best_saving_(static_cast<std::size_t>(vehicle_count), 0.0) {
    for (std::size_t c = 0; c < cands_.size(); ++c) {
      cands_[c].saving = cands_[c].cost;
      for (int q : cands_[c].reqs) {
        by_request_[static_cast<std::size_t>(q)].push_back(c);
        cands_[c].saving -= pen_[static_cast<std::size_t>(q)];
      }
    }
    for (auto& list : by_request_) {
      std::stable_sort(list.begin(), list.end(), [&](std::size_t a, std::size_t b) {
        return cands_[a].share < cands_[b].share;
      });
    }
  }

  std::vector<std::size_t> solve() {
    greedy();
    std::vector<std::size_t> chosen;
    search(0.0, pen_.size(), chosen);
    return best_;
  }

 private:
  bool available(std::size_t c) const {
    const Cand& k = cands_[c];
    if (used_[static_cast<std::size_t>(k.vehicle)]) return false;
    return std::none_of(k.reqs.begin(), k.reqs.end(),
                        [&](int q) { return covered_[static_cast<std::size_t>(q)]; });
  }

  // Chosen costs by vehicle, then penalties by request id.
  double canonical(const std::vector<std::size_t>& chosen) const {
    std::vector<std::size_t> order = chosen;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return cands_[a].vehicle < cands_[b].vehicle;
    });
    std::vector<bool> cov(pen_.size(), false);
    double total = 0.0;
    for (std::size_t c : order) {
      total += cands_[c].cost;
      for (int q : cands_[c].reqs) cov[static_cast<std::size_t>(q)] = true;
    }
    for (std::size_t q = 0; q < pen_.size(); ++q) {  // ids_ ascending
      if (!cov[q]) total += pen_[q];
    }
    return total;
  }

  void offer(const std::vector<std::size_t>& chosen, double value) {
    const double tol = 1e-9 * std::max(1.0, std::abs(best_value_));
    if (value < best_value_ - tol) {
      best_ = chosen;
      best_value_ = value;
      best_canonical_ = canonical(chosen);
    } else if (value <= best_value_ + tol) {
      const double c = canonical(chosen);
      if (c < best_canonical_) {
        best_ = chosen;
        best_value_ = value;
        best_canonical_ = c;
      }
    }
  }

  void greedy() {
    std::vector<std::size_t> order(cands_.size());
    std::iota(order.begin(), order.end(), 0);
    auto savings = [&](std::size_t c) {
      double s = cands_[c].cost;
      for (int q : cands_[c].reqs) s -= pen_[static_cast<std::size_t>(q)];
      return s;
    };
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return savings(a) < savings(b); });
    std::vector<std::size_t> chosen;
    for (std::size_t c : order) {
      if (savings(c) >= 0.0) break;
      if (!available(c)) continue;
      take(c, true);
      chosen.push_back(c);
    }
    double value = 0.0;
    for (std::size_t c : chosen) value += cands_[c].cost;
    for (std::size_t q = 0; q < pen_.size(); ++q) {
      if (!covered_[q]) value += pen_[q];
    }
    best_ = chosen;
    best_value_ = value;
    best_canonical_ = canonical(chosen);
    for (std::size_t c : chosen) take(c, false);
  }

  void take(std::size_t c, bool on) {
    used_[static_cast<std::size_t>(cands_[c].vehicle)] = on;
    for (int q : cands_[c].reqs) covered_[static_cast<std::size_t>(q)] = on;
  }

  void search(double cost, std::size_t uncovered, std::vector<std::size_t>& chosen) {
    if (uncovered == 0) {
      offer(chosen, cost);
      return;
    }
    // Two lower bounds, the larger prunes. By request: every open request pays
    // at least its cheapest share of an available trip, or its penalty. By
    // vehicle: open penalties plus, per free vehicle, the largest saving one
    // of its available trips offers over rejecting that trip's requests.
    // Branch on the request with the fewest available options.
    double bound = cost;
    double open_penalty = cost;
    std::size_t pivot = pen_.size();
    std::size_t pivot_options = std::numeric_limits<std::size_t>::max();
    for (std::size_t q = 0; q < pen_.size(); ++q) {
      if (covered_[q]) continue;
      double lb = pen_[q];
      open_penalty += pen_[q];
      std::size_t options = 0;
      for (std::size_t c : by_request_[q]) {
        if (!available(c)) continue;
        if (options == 0) lb = std::min(lb, cands_[c].share);
        ++options;
      }
      bound += lb;
      if (options < pivot_options) {
        pivot_options = options;
        pivot = q;
      }
    }
    const double tol = 1e-9 * std::max(1.0, std::abs(best_value_));
    if (bound > best_value_ + tol) return;
    std::fill(best_saving_.begin(), best_saving_.end(), 0.0);
    for (std::size_t c = 0; c < cands_.size(); ++c) {
      if (!available(c)) continue;
      double& s = best_saving_[static_cast<std::size_t>(cands_[c].vehicle)];
      s = std::min(s, cands_[c].saving);
    }
    for (double s : best_saving_) open_penalty += s;
    if (open_penalty > best_value_ + tol) return;

    for (std::size_t c : by_request_[pivot]) {
      if (!available(c)) continue;
      take(c, true);
      chosen.push_back(c);
      search(cost + cands_[c].cost, uncovered - cands_[c].reqs.size(), chosen);
      chosen.pop_back();
      take(c, false);
    }
    covered_[pivot] = true;
    search(cost + pen_[pivot], uncovered - 1, chosen);
    covered_[pivot] = false;
  }

  std::vector<Cand> cands_;
  std::vector<double> pen_;
  std::vector<RequestId> ids_;
  std::vector<bool> covered_;
  std::vector<bool> used_;
  std::vector<std::vector<std::size_t>> by_request_;
  std::vector<double> best_saving_;  // scratch, per vehicle

  std::vector<std::size_t> best_;
  double best_value_ = std::numeric_limits<double>::infinity();
  double best_canonical_ = std::numeric_limits<double>::infinity();
};

constexpr std::size_t kMaxLayerStates = 1u << 22;

// Exact forward program over vehicles in ascending order. A state is the set
// of covered requests and keeps the smallest running sum of chosen costs.
// Sums are formed in the canonical order (chosen costs by vehicle, then
// penalties by request id) and rounding is monotone, so the kept minimum
// yields the minimum canonical objective. Gives up past `max_states`.
std::optional<std::vector<std::size_t>> solve_by_layers(const std::vector<Cand>& cands,
                                                        const std::vector<double>& pen,
                                                        std::size_t max_states) {
  if (pen.size() > 64) return std::nullopt;
  std::map<int, std::vector<std::size_t>> by_vehicle;
  std::vector<std::uint64_t> cover(cands.size(), 0);
  for (std::size_t c = 0; c < cands.size(); ++c) {
    by_vehicle[cands[c].vehicle].push_back(c);
    for (int q : cands[c].reqs) cover[c] |= std::uint64_t{1} << q;
  }

  struct State {
    std::uint64_t mask = 0;
    double sum = 0.0;
    std::uint32_t parent = 0;
    std::int32_t cand = -1;
  };
  // Pruning: a greedy incumbent caps the objective, and a state cannot end
  // below its sum plus its open penalties plus the best saving each later
  // vehicle could still offer. States on an optimal path never exceed the cap.
  std::vector<std::size_t> order(cands.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return cands[a].saving < cands[b].saving; });
  double cap = std::accumulate(pen.begin(), pen.end(), 0.0);
  {
    std::uint64_t covered = 0;
    std::set<int> used;
    for (std::size_t c : order) {
      if (cands[c].saving >= 0.0) break;
      if ((covered & cover[c]) || used.count(cands[c].vehicle)) continue;
      covered |= cover[c];
      used.insert(cands[c].vehicle);
      cap += cands[c].saving;
    }
  }
  std::vector<double> later_saving(by_vehicle.size() + 1, 0.0);
  {
    std::size_t k = by_vehicle.size();
    for (auto it = by_vehicle.rbegin(); it != by_vehicle.rend(); ++it, --k) {
      double best = 0.0;
      for (std::size_t c : it->second) best = std::min(best, cands[c].saving);
      later_saving[k - 1] = later_saving[k] + best;
    }
  }
  const double tol = 1e-9 * std::max(1.0, std::abs(cap));
  auto open_penalty = [&](std::uint64_t mask) {
    double total = 0.0;
    for (std::size_t q = 0; q < pen.size(); ++q) {
      if (!(mask >> q & 1)) total += pen[q];
    }
    return total;
  };

  std::vector<std::vector<State>> layers{{State{}}};
  std::size_t total = 1;
  std::size_t layer_index = 0;
  for (const auto& [vehicle, list] : by_vehicle) {
    ++layer_index;
    const std::vector<State>& prev = layers.back();
    std::vector<State> next;
    std::unordered_map<std::uint64_t, std::uint32_t> index;
    next.reserve(prev.size());
    for (std::uint32_t i = 0; i < prev.size(); ++i) {
      if (prev[i].sum + open_penalty(prev[i].mask) + later_saving[layer_index] > cap + tol) continue;
      index.emplace(prev[i].mask, static_cast<std::uint32_t>(next.size()));
      next.push_back({prev[i].mask, prev[i].sum, i, -1});
    }
    for (std::uint32_t i = 0; i < prev.size(); ++i) {
      for (std::size_t c : list) {
        if (prev[i].mask & cover[c]) continue;
        const std::uint64_t mask = prev[i].mask | cover[c];
        const double sum = prev[i].sum + cands[c].cost;
        if (sum + open_penalty(mask) + later_saving[layer_index] > cap + tol) continue;
        auto [it, fresh] = index.emplace(mask, static_cast<std::uint32_t>(next.size()));
        if (fresh) {
          next.push_back({mask, sum, i, static_cast<std::int32_t>(c)});
        } else if (sum < next[it->second].sum) {
          next[it->second] = {mask, sum, i, static_cast<std::int32_t>(c)};
        }
      }
    }
    total += next.size();
    if (total > max_states) return std::nullopt;
    layers.push_back(std::move(next));
  }

  std::size_t best = 0;
  double best_value = std::numeric_limits<double>::infinity();
  const std::vector<State>& last = layers.back();
  for (std::size_t i = 0; i < last.size(); ++i) {
    double value = last[i].sum;
    for (std::size_t q = 0; q < pen.size(); ++q) {
      if (!(last[i].mask >> q & 1)) value += pen[q];
    }
    if (value < best_value) {
      best_value = value;
      best = i;
    }
  }
  std::vector<std::size_t> chosen;
  for (std::size_t layer = layers.size() - 1; layer > 0; --layer) {
    const State& s = layers[layer][best];
    if (s.cand >= 0) chosen.push_back(static_cast<std::size_t>(s.cand));
    best = s.parent;
  }
  return chosen;
}

int find_root(std::vector<int>& parent, int x) {
  while (parent[static_cast<std::size_t>(x)] != x) {
    parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
    x = parent[static_cast<std::size_t>(x)];
  }
  return x;
}

}  // namespace

Assignment solve_assignment(const CandidateSet& candidates, std::span<const RequestId> waiting,
                            std::span<const double> penalty) {
  if (penalty.size() != waiting.size()) throw InputError("one penalty per waiting request");
  // Requests in ascending id order.
  std::vector<std::size_t> perm(waiting.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) { return waiting[a] < waiting[b]; });
  std::vector<RequestId> ids;
  std::vector<double> pen;
  for (std::size_t i : perm) {
    ids.push_back(waiting[i]);
    pen.push_back(penalty[i]);
  }
  auto local = [&](RequestId q) {
    auto it = std::lower_bound(ids.begin(), ids.end(), q);
    return (it != ids.end() && *it == q) ? static_cast<int>(it - ids.begin()) : -1;
  };

  // Dense vehicle indices follow vehicle ids.
  std::map<int, int> dense_vehicle;
  for (const RoutedMatch& m : candidates.entries) dense_vehicle.emplace(m.vehicle, 0);
  int rank = 0;
  for (auto& [id, dense] : dense_vehicle) dense = rank++;

  std::vector<Cand> all;
  for (std::size_t e = 0; e < candidates.entries.size(); ++e) {
    const RoutedMatch& m = candidates.entries[e];
    if (m.trip.empty()) continue;
    Cand c;
    c.cost = m.anticipatory_cost;
    c.entry = e;
    double pen_sum = 0.0;
    bool ok = true;
    for (RequestId q : m.trip) {
      const int l = local(q);
      if (l < 0) {
        ok = false;
        break;
      }
      c.reqs.push_back(l);
      pen_sum += pen[static_cast<std::size_t>(l)];
    }
    // A trip costing more than rejecting all of its requests never helps.
    if (!ok || c.cost > pen_sum) continue;
    c.share = c.cost / static_cast<double>(c.reqs.size());
    c.saving = c.cost - pen_sum;
    c.vehicle = dense_vehicle.at(m.vehicle);
    all.push_back(std::move(c));
  }

  // Blocks of requests linked through a shared trip or a shared vehicle.
  std::vector<int> parent(ids.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::vector<int> vehicle_anchor(dense_vehicle.size(), -1);
  for (const Cand& c : all) {
    int& a = vehicle_anchor[static_cast<std::size_t>(c.vehicle)];
    if (a < 0) a = c.reqs[0];
    for (int q : c.reqs) parent[static_cast<std::size_t>(find_root(parent, q))] = find_root(parent, a);
  }
  std::map<int, std::vector<int>> blocks;
  for (int q = 0; q < static_cast<int>(ids.size()); ++q) blocks[find_root(parent, q)].push_back(q);

  std::vector<bool> served(ids.size(), false);
  Assignment out;
  for (const auto& [root, members] : blocks) {
    std::vector<int> remap(ids.size(), -1);
    std::vector<double> block_pen;
    std::vector<RequestId> block_ids;
    for (int q : members) {
      remap[static_cast<std::size_t>(q)] = static_cast<int>(block_pen.size());
      block_pen.push_back(pen[static_cast<std::size_t>(q)]);
      block_ids.push_back(ids[static_cast<std::size_t>(q)]);
    }
    std::vector<Cand> block;
    for (const Cand& c : all) {
      if (find_root(parent, c.reqs[0]) != root) continue;
      Cand k = c;
      for (int& q : k.reqs) q = remap[static_cast<std::size_t>(q)];
      block.push_back(std::move(k));
    }
    if (block.empty()) continue;
    auto picked = solve_by_layers(block, block_pen, kMaxLayerStates);
    if (!picked) {
      picked = BlockSolver(block, block_pen, block_ids, static_cast<int>(dense_vehicle.size())).solve();
    }
    for (std::size_t c : *picked) {
      const RoutedMatch& m = candidates.entries[block[c].entry];
      for (RequestId q : m.trip) served[static_cast<std::size_t>(local(q))] = true;
      out.chosen.push_back(m);
    }
  }
  for (std::size_t q = 0; q < ids.size(); ++q) {
    if (!served[q]) out.rejected.push_back(ids[q]);
  }
  std::sort(out.chosen.begin(), out.chosen.end(),
            [](const RoutedMatch& a, const RoutedMatch& b) { return a.vehicle < b.vehicle; });
  out.objective = assignment_objective(out.chosen, out.rejected, waiting, penalty);
  return out;
}

std::vector<int> min_cost_matching(const std::vector<std::vector<Seconds>>& cost) {
  const std::size_t rows = cost.size();
  const std::size_t cols = rows ? cost[0].size() : 0;
  if (rows == 0 || cols == 0) return std::vector<int>(rows, -1);
  const bool transposed = rows > cols;
  const std::size_t n = transposed ? cols : rows;  // n <= m
  const std::size_t m = transposed ? rows : cols;
  auto a = [&](std::size_t i, std::size_t j) {  // 1-based
    return transposed ? cost[j - 1][i - 1] : cost[i - 1][j - 1];
  };

  // Shortest augmenting paths with potentials.
  constexpr Seconds kInf = std::numeric_limits<Seconds>::max() / 4;
  std::vector<Seconds> u(n + 1, 0), v(m + 1, 0);
  std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<Seconds> minv(m + 1, kInf);
    std::vector<bool> used(m + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = p[j0];
      Seconds delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const Seconds cur = a(i0, j) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> match(rows, -1);
  for (std::size_t j = 1; j <= m; ++j) {
    if (p[j] == 0) continue;
    if (transposed) {
      match[j - 1] = static_cast<int>(p[j] - 1);
    } else {
      match[p[j] - 1] = static_cast<int>(j - 1);
    }
  }
  return match;
}

std::vector<RebalanceMove> rebalance(std::span<const Anchor> idle_vehicles,
                                     std::span<const NodeIndex> rejected_origins,
                                     const RoadNetwork& network) {
  std::vector<RebalanceMove> moves;
  if (idle_vehicles.empty() || rejected_origins.empty()) return moves;
  std::vector<std::vector<Seconds>> cost(idle_vehicles.size(),
                                         std::vector<Seconds>(rejected_origins.size()));
  for (std::size_t i = 0; i < idle_vehicles.size(); ++i) {
    for (std::size_t j = 0; j < rejected_origins.size(); ++j) {
      cost[i][j] = network.travel_time(idle_vehicles[i].node, rejected_origins[j]);
    }
  }
  const auto match = min_cost_matching(cost);
  for (std::size_t i = 0; i < match.size(); ++i) {
    if (match[i] >= 0) {
      moves.push_back({static_cast<int>(i), rejected_origins[static_cast<std::size_t>(match[i])]});
    }
  }
  return moves;
}

void write_program(std::ostream& out, const CandidateSet& candidates,
                   std::span<const RequestId> waiting, std::span<const double> penalty) {
  const auto old = out.precision(17);
  for (const auto& m : candidates.entries) {
    out << "CAND " << m.vehicle << ' ' << m.anticipatory_cost;
    for (RequestId q : m.trip) out << ' ' << q;
    out << '\n';
  }
  for (std::size_t i = 0; i < waiting.size(); ++i) {
    out << "REJ " << waiting[i] << ' ' << penalty[i] << '\n';
  }
  out.precision(old);
}

ProgramText read_program(std::istream& in) {
  ProgramText prog;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::istringstream fields(line);
    std::string tag;
    if (!(fields >> tag)) continue;
    if (tag == "CAND") {
      RoutedMatch m;
      if (!(fields >> m.vehicle >> m.anticipatory_cost)) {
        throw ParseError("program", number, "expected CAND <vehicle> <cost> <requests...>");
      }
      m.base_cost = m.anticipatory_cost;
      RequestId q;
      while (fields >> q) m.trip.push_back(q);
      if (!fields.eof() || m.trip.empty()) {
        throw ParseError("program", number, "bad request list");
      }
      std::sort(m.trip.begin(), m.trip.end());
      prog.candidates.entries.push_back(std::move(m));
    } else if (tag == "REJ") {
      RequestId q;
      double p;
      std::string extra;
      if (!(fields >> q >> p) || (fields >> extra)) {
        throw ParseError("program", number, "expected REJ <request> <penalty>");
      }
      prog.waiting.push_back(q);
      prog.penalty.push_back(p);
    } else {
      throw ParseError("program", number, "unknown record '" + tag + "'");
    }
  }
  return prog;
}

}  // namespace ridepool
