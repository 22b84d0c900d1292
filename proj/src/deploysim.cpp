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

#include "hierids/deploysim.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <queue>

#include "hierids/errors.hpp"

namespace hierids {

void SimConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ConfigError(std::string(name) + " must be positive");
    }
  };
  positive(road_length_km, "road_length_km");
  positive(density_veh_per_km, "density_veh_per_km");
  positive(min_distance_m, "min_distance_m");
  positive(packet_interval_s, "packet_interval_s");
  positive(response_time_s, "response_time_s");
  positive(model_size_kb, "model_size_kb");
  positive(model_update_period_s, "model_update_period_s");
  positive(testing_time_s, "testing_time_s");
  if (duration_s < 0.0 || !std::isfinite(duration_s)) {
    throw ConfigError("duration_s must be non-negative");
  }
  if (record_features == 0) throw ConfigError("record_features must be positive");
  if (attack_mix.size() != static_cast<std::size_t>(LabelHierarchy::iov().num_fine())) {
    throw ConfigError("attack_mix needs one probability per fine class");
  }
  double total = 0.0;
  for (double p : attack_mix) {
    if (p < 0.0) throw ConfigError("attack_mix has a negative probability");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ConfigError("attack_mix must sum to 1");
  if (1000.0 / density_veh_per_km < min_distance_m) {
    throw ConfigError("density leaves less than the minimum inter-vehicle distance");
  }
}

SimState build_topology(const SimConfig& config, const TierTopology& topo) {
  config.validate();
  if (topo.vehicles_per_rsu == 0 || topo.rsus_per_edge == 0) {
    throw ConfigError("topology counts must be at least 1");
  }
  SimState s;
  s.config = config;
  s.topology = topo;
  s.vehicles = static_cast<std::size_t>(std::llround(config.density_veh_per_km * config.road_length_km));
  if (s.vehicles == 0) throw ConfigError("road holds no vehicles");
  s.rsus = topo.rsu_count ? topo.rsu_count
                          : (s.vehicles + topo.vehicles_per_rsu - 1) / topo.vehicles_per_rsu;
  s.edges = (s.rsus + topo.rsus_per_edge - 1) / topo.rsus_per_edge;
  s.rsu_of_vehicle.resize(s.vehicles);
  for (std::size_t v = 0; v < s.vehicles; ++v) s.rsu_of_vehicle[v] = v % s.rsus;
  s.edge_of_rsu.resize(s.rsus);
  for (std::size_t r = 0; r < s.rsus; ++r) s.edge_of_rsu[r] = r % s.edges;
  return s;
}

StubClassifier::StubClassifier(double p_attack, double p_spoofing_given_attack,
                               std::vector<double> spoofing_subtype_mix, StubMode mode)
    : p_attack_(p_attack), p_spoofing_(p_spoofing_given_attack),
      subtype_mix_(std::move(spoofing_subtype_mix)), mode_(mode) {
  if (p_attack_ < 0.0 || p_attack_ > 1.0 || p_spoofing_ < 0.0 || p_spoofing_ > 1.0) {
    throw ConfigError("stub probabilities must lie in [0, 1]");
  }
  if (subtype_mix_.size() != 4) throw ConfigError("spoofing subtype mix needs four entries");
  if (std::accumulate(subtype_mix_.begin(), subtype_mix_.end(), 0.0) <= 0.0) {
    subtype_mix_ = {0.25, 0.25, 0.25, 0.25};
  }
}

StubClassifier StubClassifier::from_mix(const std::vector<double>& mix, StubMode mode) {
  if (mix.size() != 6) throw ConfigError("mix needs one probability per fine class");
  const double attack = 1.0 - mix[kBenign];
  const double spoof = mix[2] + mix[3] + mix[4] + mix[5];
  return StubClassifier(attack, attack > 0.0 ? spoof / attack : 0.0,
                        {mix[2], mix[3], mix[4], mix[5]}, mode);
}

namespace {

// True when the n-th slot receives one of the floor(n p) quota hits.
bool quota_hit(std::uint64_t n, double p) {
  const double a = std::floor(static_cast<double>(n) * p);
  const double b = std::floor(static_cast<double>(n + 1) * p);
  return b > a;
}

}  // namespace

RoutedDecision StubClassifier::classify(std::size_t, std::uint64_t packet, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  RoutedDecision d;
  d.trace = {Tier::kVehicle};
  bool spoofing = false;
  if (mode_ == StubMode::kQuota) {
    d.level1 = quota_hit(packet, p_attack_) ? 1 : 0;
    const auto attack_index =
        static_cast<std::uint64_t>(std::floor(static_cast<double>(packet) * p_attack_));
    spoofing = d.level1 == 1 && quota_hit(attack_index, p_spoofing_);
  } else {
    d.level1 = unit(rng) < p_attack_ ? 1 : 0;
    spoofing = d.level1 == 1 && unit(rng) < p_spoofing_;
  }
  if (d.level1 == 0) {
    d.final_label = kBenign;
    return d;
  }
  d.trace.push_back(Tier::kRsu);
  d.level2 = spoofing ? 2 : 1;
  if (*d.level2 == 1) {
    d.final_label = kDos;
    return d;
  }
  d.trace.push_back(Tier::kNearEdge);
  std::discrete_distribution<int> pick(subtype_mix_.begin(), subtype_mix_.end());
  d.level3 = kSpoofingGas + pick(rng);
  d.final_label = *d.level3;
  return d;
}

RoutedDecision ModelClassifier::classify(std::size_t, std::uint64_t, Rng& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, pool_.size() - 1);
  return predict_routed(model_, pool_.records.row(pick(rng)), RoutingMode::kRouted);
}

std::size_t record_wire_bytes(std::size_t features) { return (features + 7) / 8 + 16; }

namespace {

std::int64_t to_micros(double seconds) { return std::llround(seconds * 1e6); }

enum class EventKind { kPacket, kModelPush };

struct Event {
  std::int64_t time_us;
  std::uint64_t seq;
  EventKind kind;
  std::size_t node;

  bool operator>(const Event& o) const {
    return time_us != o.time_us ? time_us > o.time_us : seq > o.seq;
  }
};

void finish_rates(TierTraffic& t, double duration, std::size_t nodes, double testing_time) {
  t.compute_s = static_cast<double>(t.classifications) * testing_time;
  if (duration <= 0.0) return;
  t.messages_per_s = static_cast<double>(t.messages) / duration;
  t.kb_per_s = static_cast<double>(t.bytes) / 1024.0 / duration;
  t.messages_per_s_per_node = nodes ? t.messages_per_s / static_cast<double>(nodes) : 0.0;
}

}  // namespace

OverheadReport run_sim(const SimState& state, TrafficClassifier& classifier) {
  const SimConfig& cfg = state.config;
  OverheadReport rep;
  rep.vehicles = state.vehicles;
  rep.rsus = state.rsus;
  rep.edges = state.edges;
  rep.duration_s = cfg.duration_s;
  rep.record_bytes = record_wire_bytes(cfg.record_features);
  rep.per_vehicle_memory_kb = cfg.model_size_kb;
  rep.response_time_overhead_pct = cfg.testing_time_s / cfg.response_time_s * 100.0;
  rep.model_update_kbps_per_vehicle = cfg.model_size_kb / cfg.model_update_period_s;
  const std::size_t nodes = state.vehicles + state.rsus + state.edges;
  rep.model_update_kbps_aggregate = rep.model_update_kbps_per_vehicle * static_cast<double>(nodes);

  const std::int64_t duration = to_micros(cfg.duration_s);
  const std::int64_t interval = to_micros(cfg.packet_interval_s);
  const std::int64_t period = to_micros(cfg.model_update_period_s);

  std::priority_queue<Event, std::vector<Event>, std::greater<>> queue;
  std::uint64_t seq = 0;
  if (duration > 0) {
    for (std::size_t v = 0; v < state.vehicles; ++v) {
      queue.push({0, seq++, EventKind::kPacket, v});
    }
    for (std::int64_t t = period; t <= duration; t += period) {
      queue.push({t, seq++, EventKind::kModelPush, 0});
    }
  }

  Rng rng = make_rng(cfg.seed, "run_sim");
  std::vector<std::uint64_t> emitted(state.vehicles, 0);
  while (!queue.empty()) {
    const Event ev = queue.top();
    queue.pop();
    if (ev.kind == EventKind::kModelPush) {
      ++rep.model_update_events;
      rep.model_update_kb_total += cfg.model_size_kb * static_cast<double>(nodes);
      continue;
    }
    const std::size_t v = ev.node;
    const RoutedDecision d = classifier.classify(v, emitted[v]++, rng);
    ++rep.packets;
    ++rep.vehicle.classifications;
    ++rep.vehicle.messages;
    rep.vehicle.bytes += rep.record_bytes;
    if (d.level1 == 1) {
      ++rep.rsu.messages;
      rep.rsu.bytes += rep.record_bytes;
      ++rep.rsu.classifications;
      if (d.level2 && *d.level2 == 2) {
        ++rep.edge.messages;
        rep.edge.bytes += rep.record_bytes;
        ++rep.edge.classifications;
        ++rep.cloud.messages;
        rep.cloud.bytes += rep.record_bytes;
      }
    }
    const std::int64_t next = ev.time_us + interval;
    if (next < duration) queue.push({next, seq++, EventKind::kPacket, v});
  }
  rep.model_pushes_per_node = rep.model_update_events;

  const double dur = cfg.duration_s;
  finish_rates(rep.vehicle, dur, state.vehicles, cfg.testing_time_s);
  finish_rates(rep.rsu, dur, state.rsus, cfg.testing_time_s);
  finish_rates(rep.edge, dur, state.edges, cfg.testing_time_s);
  finish_rates(rep.cloud, dur, 1, cfg.testing_time_s);
  rep.forwarded_to_rsu_rate =
      rep.packets ? static_cast<double>(rep.rsu.messages) / static_cast<double>(rep.packets) : 0.0;
  if (duration == 0) {
    rep.model_update_kbps_per_vehicle = 0.0;
    rep.model_update_kbps_aggregate = 0.0;
  }
  return rep;
}

std::vector<SweepPoint> sweep(const SimConfig& base, const TierTopology& topo,
                              const SweepRanges& ranges) {
  if (ranges.densities.empty() || ranges.durations.empty() || ranges.attack_mixes.empty()) {
    throw ConfigError("sweep ranges must be non-empty");
  }
  std::vector<SweepPoint> points;
  for (double density : ranges.densities) {
    for (double duration : ranges.durations) {
      for (const auto& [name, mix] : ranges.attack_mixes) {
        SimConfig cfg = base;
        cfg.density_veh_per_km = density;
        cfg.duration_s = duration;
        cfg.attack_mix = mix;
        const auto state = build_topology(cfg, topo);
        auto stub = StubClassifier::from_mix(mix);
        points.push_back({density, duration, name, run_sim(state, stub)});
      }
    }
  }
  return points;
}

Json to_json(const SimConfig& c) {
  const auto& h = LabelHierarchy::iov();
  Json mix = Json::object();
  for (int i = 0; i < h.num_fine(); ++i) mix[h.fine_name(i)] = c.attack_mix[i];
  return Json{{"density_veh_per_km", c.density_veh_per_km},
              {"minimum_distance_m", c.min_distance_m},
              {"packet_delivery_interval_s", c.packet_interval_s},
              {"response_time_s", c.response_time_s},
              {"model_size_kb", c.model_size_kb},
              {"model_update_s", c.model_update_period_s},
              {"testing_time_instance_s", c.testing_time_s},
              {"road_length_km", c.road_length_km},
              {"duration_s", c.duration_s},
              {"record_features", c.record_features},
              {"attack_mix", mix},
              {"seed", c.seed}};
}

SimConfig sim_config_from_json(const Json& doc, SimConfig c) {
  auto num = [&](const char* key, double& dst) {
    if (doc.contains(key)) dst = doc.at(key).get<double>();
  };
  num("density_veh_per_km", c.density_veh_per_km);
  num("minimum_distance_m", c.min_distance_m);
  num("packet_delivery_interval_s", c.packet_interval_s);
  num("response_time_s", c.response_time_s);
  num("model_size_kb", c.model_size_kb);
  num("model_update_s", c.model_update_period_s);
  num("testing_time_instance_s", c.testing_time_s);
  num("road_length_km", c.road_length_km);
  num("duration_s", c.duration_s);
  if (doc.contains("record_features")) c.record_features = doc.at("record_features").get<std::size_t>();
  if (doc.contains("seed")) c.seed = doc.at("seed").get<std::uint64_t>();
  if (doc.contains("attack_mix")) {
    const auto& m = doc.at("attack_mix");
    const auto& h = LabelHierarchy::iov();
    if (m.is_array()) {
      c.attack_mix = m.get<std::vector<double>>();
    } else {
      c.attack_mix.assign(h.num_fine(), 0.0);
      for (const auto& [key, value] : m.items()) {
        auto id = h.parse_fine(key);
        if (!id) throw ConfigError("unknown class in attack_mix: " + key);
        c.attack_mix[*id] = value.get<double>();
      }
    }
  }
  return c;
}

Json to_json(const TierTopology& t) {
  return Json{{"vehicles_per_rsu", t.vehicles_per_rsu},
              {"rsus_per_edge", t.rsus_per_edge},
              {"rsu_count", t.rsu_count}};
}

namespace {

Json tier_json(const TierTraffic& t) {
  return Json{{"messages", t.messages},
              {"bytes", t.bytes},
              {"classifications", t.classifications},
              {"messages_per_s", t.messages_per_s},
              {"kb_per_s", t.kb_per_s},
              {"messages_per_s_per_node", t.messages_per_s_per_node},
              {"compute_s", t.compute_s}};
}

}  // namespace

Json to_json(const OverheadReport& r) {
  return Json{{"vehicles", r.vehicles},
              {"rsus", r.rsus},
              {"edges", r.edges},
              {"duration_s", r.duration_s},
              {"packets", r.packets},
              {"record_bytes", r.record_bytes},
              {"per_vehicle_memory_kb", r.per_vehicle_memory_kb},
              {"response_time_overhead_pct", r.response_time_overhead_pct},
              {"forwarded_to_rsu_rate", r.forwarded_to_rsu_rate},
              {"model_update_events", r.model_update_events},
              {"model_pushes_per_node", r.model_pushes_per_node},
              {"model_update_kb_total", r.model_update_kb_total},
              {"model_update_kbps_per_vehicle", r.model_update_kbps_per_vehicle},
              {"model_update_kbps_aggregate", r.model_update_kbps_aggregate},
              {"tiers",
               {{"vehicle", tier_json(r.vehicle)},
                {"rsu", tier_json(r.rsu)},
                {"near_edge", tier_json(r.edge)},
                {"cloud", tier_json(r.cloud)}}}};
}

namespace {

const char* kReportHeader =
    "vehicles,rsus,edges,duration_s,packets,rsu_messages,edge_messages,cloud_messages,"
    "forwarded_to_rsu_rate,rsu_msgs_per_s_per_node,rsu_kb_per_s,edge_kb_per_s,"
    "per_vehicle_memory_kb,response_time_overhead_pct,model_update_kbps_per_vehicle,"
    "model_update_kbps_aggregate,model_pushes_per_node";

std::string report_row(const OverheadReport& r) {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "%zu,%zu,%zu,%.6g,%llu,%llu,%llu,%llu,%.8f,%.8f,%.8f,%.8f,%.6g,%.8f,%.10f,%.10f,%llu",
                r.vehicles, r.rsus, r.edges, r.duration_s,
                static_cast<unsigned long long>(r.packets),
                static_cast<unsigned long long>(r.rsu.messages),
                static_cast<unsigned long long>(r.edge.messages),
                static_cast<unsigned long long>(r.cloud.messages), r.forwarded_to_rsu_rate,
                r.rsu.messages_per_s_per_node, r.rsu.kb_per_s, r.edge.kb_per_s,
                r.per_vehicle_memory_kb, r.response_time_overhead_pct,
                r.model_update_kbps_per_vehicle, r.model_update_kbps_aggregate,
                static_cast<unsigned long long>(r.model_pushes_per_node));
  return buf;
}

}  // namespace

std::string overhead_csv(const OverheadReport& report) {
  return std::string(kReportHeader) + "\n" + report_row(report) + "\n";
}

std::string sweep_csv(const std::vector<SweepPoint>& points) {
  std::string out = std::string("density,duration,attack_mix,") + kReportHeader + "\n";
  char buf[64];
  for (const auto& p : points) {
    std::snprintf(buf, sizeof(buf), "%.6g,%.6g,", p.density, p.duration);
    out += buf + csv_escape(p.mix_name) + "," + report_row(p.report) + "\n";
  }
  return out;
}

}  // namespace hierids
