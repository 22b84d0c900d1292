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
#include <optional>
#include <span>
#include <vector>

#include "hierids/io.hpp"
#include "hierids/matrix.hpp"
#include "hierids/tree.hpp"

namespace hierids {

struct ForestParams {
  int num_trees = 100;
  int max_depth = kUnlimitedDepth;
  std::size_t min_leaf = 1;
  // nullopt: ceil(sqrt(M)).
  std::optional<std::size_t> features_per_split;
  bool bootstrap = true;
  bool random_thresholds = false;
  std::uint64_t seed = 0;

  // A single unbootstrapped tree examining every feature.
  static ForestParams decision_tree(std::uint64_t seed = 0);
  // Unbootstrapped trees with random thresholds.
  static ForestParams extra_trees(std::uint64_t seed = 0);

  std::size_t resolved_features_per_split(std::size_t num_features) const;
};

struct ForestModel {
  int num_classes = 0;
  std::size_t num_features = 0;
  std::vector<DecisionTree> trees;
  // Row indices drawn for each tree, size N each; empty when not retained.
  std::vector<std::vector<std::uint32_t>> bootstrap_indices;
  std::size_t num_training_rows = 0;

  // Rows never drawn for tree t.
  std::vector<std::size_t> oob_rows(std::size_t t) const;
  bool operator==(const ForestModel&) const = default;
};

struct ImportanceVector {
  std::vector<double> importance;
  std::vector<double> stddev;
  std::size_t trees_used = 0;
};

// OpenMP-parallel kernels. Every tree and every permutation draws from its own
// (seed, index) stream, so results are bit-identical to the serial reference.
ForestModel fit_forest(const Matrix& x, std::span<const int> y, int num_classes,
                       const ForestParams& params);
ProbMatrix predict_proba(const ForestModel& model, const Matrix& x);
// Mean OOB accuracy drop over trees when one feature is permuted within that
// tree's OOB rows; x and y must be the training data.
ImportanceVector permutation_importance(const ForestModel& model, const Matrix& x,
                                        std::span<const int> y, std::uint64_t seed);

namespace reference {

ForestModel fit_forest_serial(const Matrix& x, std::span<const int> y, int num_classes,
                              const ForestParams& params);
ProbMatrix predict_proba_serial(const ForestModel& model, const Matrix& x);
ImportanceVector permutation_importance_serial(const ForestModel& model, const Matrix& x,
                                               std::span<const int> y, std::uint64_t seed);

}  // namespace reference

// Fraction of OOB rows classified correctly, pooled over trees.
double oob_accuracy(const ForestModel& model, const Matrix& x, std::span<const int> y);

std::vector<int> argmax_rows(const ProbMatrix& proba);

Json to_json(const ForestModel& model, bool include_bootstrap = true);
ForestModel forest_from_json(const Json& doc);

}  // namespace hierids
