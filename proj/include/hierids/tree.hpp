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
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "hierids/io.hpp"
#include "hierids/matrix.hpp"
#include "hierids/rng.hpp"

namespace hierids {

inline constexpr int kUnlimitedDepth = std::numeric_limits<int>::max();

struct TreeParams {
  int max_depth = kUnlimitedDepth;
  std::size_t min_leaf = 1;
  // Candidate features examined per node; nullopt means all of them.
  std::optional<std::size_t> features_per_split;
  // Extra-trees style: one uniformly drawn threshold per real-valued feature.
  bool random_thresholds = false;
  std::uint64_t seed = 0;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  std::size_t count = 0;  // training rows (with bootstrap multiplicity)

  bool is_leaf() const { return feature < 0; }
  bool operator==(const TreeNode&) const = default;
};

// Binary classification tree. Every node, internal or leaf, keeps the class
// distribution of the training rows that reached it; rows go left when
// x[feature] <= threshold.
class DecisionTree {
 public:
  DecisionTree() = default;
  DecisionTree(int num_classes, std::size_t num_features)
      : num_classes_(num_classes), num_features_(num_features) {}

  int num_classes() const { return num_classes_; }
  std::size_t num_features() const { return num_features_; }
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  std::span<const double> distribution(int node) const {
    return {dist_.data() + static_cast<std::size_t>(node) * num_classes_,
            static_cast<std::size_t>(num_classes_)};
  }

  // Index of the leaf reached by a record; get_value(f) supplies feature f.
  template <typename Getter>
  int leaf_index(Getter&& get_value) const {
    int n = 0;
    while (!nodes_[n].is_leaf()) {
      const auto& node = nodes_[n];
      n = get_value(node.feature) <= node.threshold ? node.left : node.right;
    }
    return n;
  }
  int leaf_index(std::span<const float> record) const {
    return leaf_index([&](int f) { return static_cast<double>(record[f]); });
  }

  std::span<const double> predict_row(std::span<const float> record) const {
    return distribution(leaf_index(record));
  }
  ProbMatrix predict_proba(const Matrix& x) const;

  int depth() const;
  bool uses_feature(std::size_t feature) const;
  std::vector<bool> used_features() const;

  int add_node(const TreeNode& node, std::span<const double> dist);
  TreeNode& node(int i) { return nodes_[i]; }

  bool operator==(const DecisionTree&) const = default;

 private:
  int num_classes_ = 0;
  std::size_t num_features_ = 0;
  std::vector<TreeNode> nodes_;
  std::vector<double> dist_;
};

// Flags columns whose values are all 0 or 1; those get the single 0.5
// threshold without sorting.
std::vector<char> binary_columns(const Matrix& x);

DecisionTree fit_tree(const Matrix& x, std::span<const int> y, int num_classes,
                      const TreeParams& params);

// Fits on the given row multiset (bootstrap rows may repeat).
DecisionTree fit_tree_rows(const Matrix& x, std::span<const int> y, int num_classes,
                           std::span<const std::size_t> rows, const TreeParams& params,
                           std::span<const char> binary_cols, Rng& rng);

// Weighted Gini impurity of splitting `rows` on x[feature] <= threshold.
double split_impurity(const Matrix& x, std::span<const int> y, int num_classes,
                      std::span<const std::size_t> rows, std::size_t feature,
                      double threshold);
double gini(std::span<const std::size_t> class_counts, std::size_t total);

Json to_json(const DecisionTree& tree);
DecisionTree tree_from_json(const Json& doc);

}  // namespace hierids
