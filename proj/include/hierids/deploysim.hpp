/*
 * Copyright 2026 The HierIDS Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "hierids/dataset.hpp"
#include "hierids/hierarchy.hpp"
#include "hierids/io.hpp"
#include "hierids/rng.hpp"

namespace hierids {

// Network parameters. Defaults describe a 1 km urban road segment.
struct SimConfig {
  double road_length_km = 1.0;
  double density_veh_per_km = 180.0;
  double min_distance_m = 2.0;
  double packet_interval_s = 1.0;
  double response_time_s = 1.5;
  double model_size_kb = 13.0;
  double model_update_period_s = 3600.0;
  double testing_time_s = 0.002;
  std::vector<double> attack_mix = iov_class_mix();  // per fine class
  double duration_s = 3600.0;
  std::size_t record_features = 152;
  std::uint64_t seed = 0;

  void validate() const;
};

struct TierTopology {
  std::size_t vehicles_per_rsu = 30;
  std::size_t rsus_per_edge = 3;
  // Fixed RSU count for the road; 0 derives it from vehicles_per_rsu.
  std::size_t rsu_count = 0;
};

struct SimState {
  SimConfig config;
  TierTopology topology;
  std::size_t vehicles = 0;
  std::size_t rsus = 0;
  std::size_t edges = 0;
  std::vector<std::size_t> rsu_of_vehicle;
  std::vector<std::size_t> edge_of_rsu;
};

SimState build_topology(const SimConfig& config, const TierTopology& topo);

// Verdict source for simulated traffic.
class TrafficClassifier {
 public:
  virtual ~TrafficClassifier() = default;
  virtual RoutedDecision classify(std::size_t vehicle, std::uint64_t packet, Rng& rng) = 0;
};

enum class StubMode {
  kBernoulli,  // independent draws per packet
  kQuota,      // packet n of a vehicle is an attack iff floor((n+1)p) > floor(np)
};

// Draws verdicts from fixed per-level probabilities.
class StubClassifier : public TrafficClassifier {
 public:
  StubClassifier(double p_attack, double p_spoofing_given_attack,
                 std::vector<double> spoofing_subtype_mix = {0.25, 0.25, 0.25, 0.25},
                 StubMode mode = StubMode::kBernoulli);
  // Level probabilities implied by a fine-class traffic mix.
  static StubClassifier from_mix(const std::vector<double>& mix,
                                 StubMode mode = StubMode::kBernoulli);

  RoutedDecision classify(std::size_t vehicle, std::uint64_t packet, Rng& rng) override;
  double p_attack() const { return p_attack_; }
  double p_spoofing_given_attack() const { return p_spoofing_; }

 private:
  double p_attack_;
  double p_spoofing_;
  std::vector<double> subtype_mix_;
  StubMode mode_;
};

// Runs a trained cascade on records sampled from a pool.
class ModelClassifier : public TrafficClassifier {
 public:
  ModelClassifier(const HierModel& model, const Dataset& pool) : model_(model), pool_(pool) {}
  RoutedDecision classify(std::size_t vehicle, std::uint64_t packet, Rng& rng) override;

 private:
  const HierModel& model_;
  const Dataset& pool_;
};

struct TierTraffic {
  std::uint64_t messages = 0;
  std::uint64_t bytes = 0;
  std::uint64_t classifications = 0;
  double messages_per_s = 0.0;
  double kb_per_s = 0.0;
  double messages_per_s_per_node = 0.0;
  double compute_s = 0.0;
};

struct OverheadReport {
  std::size_t vehicles = 0;
  std::size_t rsus = 0;
  std::size_t edges = 0;
  double duration_s = 0.0;
  std::uint64_t packets = 0;
  std::size_t record_bytes = 0;
  TierTraffic vehicle;  // messages = packets classified on board
  TierTraffic rsu;      // forwarded ATTACK verdicts
  TierTraffic edge;     // forwarded SPOOFING verdicts
  TierTraffic cloud;    // near-edge results reported upward
  double forwarded_to_rsu_rate = 0.0;
  double per_vehicle_memory_kb = 0.0;
  double response_time_overhead_pct = 0.0;
  std::uint64_t model_update_events = 0;
  std::uint64_t model_pushes_per_node = 0;
  double model_update_kb_total = 0.0;
  double model_update_kbps_per_vehicle = 0.0;
  double model_update_kbps_aggregate = 0.0;
};

std::size_t record_wire_bytes(std::size_t features);

OverheadReport run_sim(const SimState& state, TrafficClassifier& classifier);

struct SweepRanges {
  std::vector<double> densities;
  std::vector<double> durations;
  std::vector<std::pair<std::string, std::vector<double>>> attack_mixes;
};

struct SweepPoint {
  double density = 0.0;
  double duration = 0.0;
  std::string mix_name;
  OverheadReport report;
};

// Cartesian sweep with a mix-derived stub classifier at every point.
std::vector<SweepPoint> sweep(const SimConfig& base, const TierTopology& topo,
                              const SweepRanges& ranges);

Json to_json(const SimConfig& config);
SimConfig sim_config_from_json(const Json& doc, SimConfig base = {});
Json to_json(const TierTopology& topo);
Json to_json(const OverheadReport& report);
std::string overhead_csv(const OverheadReport& report);
std::string sweep_csv(const std::vector<SweepPoint>& points);

}  // namespace hierids
