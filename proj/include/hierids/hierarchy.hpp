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

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hierids/classifier.hpp"
#include "hierids/dataset.hpp"
#include "hierids/io.hpp"
#include "hierids/metrics.hpp"

namespace hierids {

enum class RoutingMode { kRouted, kFullCascade };
enum class Tier { kVehicle, kRsu, kNearEdge };
std::string_view to_string(Tier t);

struct LevelConfig {
  LearnerSpec learner;
  std::vector<std::size_t> features;  // indices into the dataset schema
};

struct HierConfig {
  std::array<LevelConfig, 3> levels;
  RoutingMode mode = RoutingMode::kRouted;

  void validate(std::size_t num_features) const;
};

struct HierModel {
  std::array<Model, 3> models;
  std::array<std::vector<std::size_t>, 3> features;
  ScalerParams scaler;
  std::vector<std::string> feature_names;
  std::vector<std::string> warnings;
};

struct RoutedDecision {
  int level1 = 0;                 // 0 BENIGN, 1 ATTACK
  std::optional<int> level2;      // 0 BENIGN, 1 DOS, 2 SPOOFING
  std::optional<int> level3;      // fine class
  int final_label = 0;            // fine class
  bool consistent = true;
  std::vector<Tier> trace;

  int deepest_level() const { return level3 ? 3 : level2 ? 2 : 1; }
};

HierModel train_hierarchy(const Dataset& ds, const HierConfig& config,
                          std::span<const std::size_t> train_rows);

RoutedDecision predict_routed(const HierModel& model, std::span<const float> record,
                              RoutingMode mode = RoutingMode::kRouted);
// Batch form; level models run once over the rows routed to them.
std::vector<RoutedDecision> predict_routed(const HierModel& model, const Matrix& records,
                                           RoutingMode mode = RoutingMode::kRouted);

struct TimingReport {
  std::string setting;  // "hierarchical" or "flat"
  std::vector<double> train_seconds;  // per level (one entry when flat)
  double train_total = 0.0;
  double test_total = 0.0;
  double test_per_instance = 0.0;
  std::size_t test_instances = 0;
};

struct HierEvaluation {
  // Each level evaluated on its own label granularity, averaged over folds.
  std::array<MetricTable, 3> levels;
  // End-to-end routed pipeline against fine labels.
  MetricTable routed;
  std::size_t routed_to_level3 = 0;
  std::size_t disagreements = 0;
  double disagreement_rate = 0.0;
  std::vector<std::array<MetricTable, 3>> per_fold;
  std::vector<std::string> warnings;
  TimingReport timing;
};

HierEvaluation evaluate_hierarchy(const Dataset& ds, const HierConfig& config,
                                  const FoldAssignment& folds);

struct FlatEvaluation {
  MetricTable table;
  std::vector<MetricTable> per_fold;
  TimingReport timing;
};

FlatEvaluation flat_baseline(const Dataset& ds, const LearnerSpec& learner,
                             std::span<const std::size_t> features, const FoldAssignment& folds);

Json to_json(const HierConfig& config, std::span<const std::string> feature_names);
Json to_json(const HierEvaluation& eval);
Json to_json(const TimingReport& timing);
Json hier_model_to_json(const HierModel& model);
HierModel hier_model_from_json(const Json& doc);

}  // namespace hierids
