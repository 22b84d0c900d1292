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
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hierids/io.hpp"

namespace hierids {

struct ConfusionMatrix {
  std::vector<std::string> classes;
  // counts[t * K + p]: records of true class t predicted as p.
  std::vector<std::size_t> counts;

  std::size_t num_classes() const { return classes.size(); }
  std::size_t at(std::size_t t, std::size_t p) const { return counts[t * classes.size() + p]; }
  std::size_t total() const;
};

struct ClassMetrics {
  double precision = 0.0;  // percent
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
  bool degenerate = false;  // a zero denominator was hit
};

struct AverageMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Percent-valued metrics in the layout of a per-class report with macro and
// support-weighted averages.
struct MetricTable {
  std::vector<std::string> classes;
  std::vector<ClassMetrics> per_class;
  double accuracy = 0.0;
  AverageMetrics macro;
  AverageMetrics weighted;
  std::size_t support = 0;
};

ConfusionMatrix confusion(std::span<const int> y_true, std::span<const int> y_pred,
                          std::vector<std::string> classes);
MetricTable metric_table(const ConfusionMatrix& cm);
// Cell-wise mean over folds; supports are summed.
MetricTable cv_aggregate(std::span<const MetricTable> tables);

Json to_json(const ConfusionMatrix& cm);
Json to_json(const MetricTable& t);

// One row per class plus "macro avg" and "weighted avg"; three columns per
// named configuration; values rounded to two decimals.
std::string metric_tables_csv(const std::vector<std::pair<std::string, MetricTable>>& tables);
// Long format, one row per (table, class); tables may have different classes.
std::string metric_tables_long_csv(
    const std::vector<std::pair<std::string, MetricTable>>& tables);

}  // namespace hierids
