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
#include <span>
#include <string>
#include <vector>

#include "hierids/forest.hpp"
#include "hierids/io.hpp"
#include "hierids/matrix.hpp"

namespace hierids {

// Decision-path attribution: along each tree's root-to-leaf path, the change
// in node class distribution at every split is credited to the split feature.
// For every class, bias + sum of contributions equals the forest probability.
struct PathAttribution {
  std::vector<double> bias;  // mean root distribution, one entry per class
  ProbMatrix contributions;  // features x classes
};

PathAttribution path_contributions(const ForestModel& model, std::span<const float> record);

struct AttributionReport {
  std::vector<std::string> feature_names;
  std::vector<std::string> class_names;
  int target_class = 0;
  ProbMatrix mean_signed;    // features x classes
  ProbMatrix mean_absolute;  // features x classes
  // Mean of (2 x_j - 1) * contribution: positive when a high feature value
  // pushes toward the class, negative when it pushes away.
  ProbMatrix mean_directional;
  std::vector<double> score;  // mean over classes of mean |contribution|
  // Features whose directional contribution toward the target class is < 0.
  std::vector<std::size_t> flagged_negative;
};

AttributionReport attribution_report(const ForestModel& model, const Matrix& eval,
                                     int target_class,
                                     std::vector<std::string> feature_names = {},
                                     std::vector<std::string> class_names = {});

struct SubsetSearchConfig {
  double epsilon = 0.05;  // F1 points
  int patience = 3;
  double target_slack = 0.0;  // stop once weighted F1 >= 100 - slack
  ForestParams forest;
  std::uint64_t seed = 0;
  // Features probed only after every other rank.
  std::vector<std::size_t> flagged_negative;
};

struct SearchEvaluation {
  std::vector<std::size_t> features;
  double weighted_f1 = 0.0;
  double macro_f1 = 0.0;
  double best_so_far = 0.0;
  bool accepted = false;
};

struct SubsetSearchResult {
  std::vector<std::size_t> selected;
  std::vector<SearchEvaluation> trace;
  std::vector<std::size_t> skipped;  // feature indices passed over
  double best_weighted_f1 = 0.0;
  bool reached_target = false;
};

// Walks the ranking in prefix order, scoring each candidate set by stratified
// cross-validated weighted F1 at the given level. After `patience`
// consecutive non-improving ranks those ranks are skipped and deeper ranks are
// probed one at a time on top of the best set.
SubsetSearchResult guided_subset_search(std::span<const std::size_t> ranking, const Matrix& x,
                                        std::span<const int> fine_labels, int level,
                                        std::size_t budget, int cv_k,
                                        const SubsetSearchConfig& config);

Json to_json(const AttributionReport& report);
Json to_json(const SubsetSearchResult& result, std::span<const std::string> feature_names);
std::string trace_csv(const SubsetSearchResult& result, std::span<const std::string> feature_names);

}  // namespace hierids
