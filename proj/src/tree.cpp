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

#include "hierids/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hierids/errors.hpp"

namespace hierids {

namespace {

constexpr double kImpurityTol = 1e-12;

// Sum of squared counts over n, so that gini * n = n - sumsq / n.
double weighted_impurity(const std::vector<std::size_t>& left, std::size_t n_left,
                         const std::vector<std::size_t>& right, std::size_t n_right) {
  double sl = 0.0;
  double sr = 0.0;
  for (std::size_t c = 0; c < left.size(); ++c) {
    sl += static_cast<double>(left[c]) * static_cast<double>(left[c]);
    sr += static_cast<double>(right[c]) * static_cast<double>(right[c]);
  }
  const double n = static_cast<double>(n_left + n_right);
  return ((n_left - sl / n_left) + (n_right - sr / n_right)) / n;
}

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double impurity = std::numeric_limits<double>::infinity();

  bool worse_than(double imp, int f, double thr) const {
    if (imp < impurity - kImpurityTol) return true;
    if (imp > impurity + kImpurityTol) return false;
    return f < feature || (f == feature && thr < threshold);
  }
};

class Builder {
 public:
  Builder(const Matrix& x, std::span<const int> y, int num_classes, const TreeParams& params,
          std::span<const char> binary_cols, Rng& rng)
      : x_(x), y_(y), k_(num_classes), params_(params), binary_(binary_cols), rng_(rng),
        tree_(num_classes, x.cols()) {
    const std::size_t m = x.cols();
    mtry_ = params.features_per_split ? std::clamp<std::size_t>(*params.features_per_split, 1, m)
                                      : m;
    order_.resize(m);
  }

  DecisionTree build(std::vector<std::size_t> rows) {
    rows_ = std::move(rows);
    grow(0, rows_.size(), 0);
    return std::move(tree_);
  }

 private:
  int grow(std::size_t begin, std::size_t end, int depth) {
    const std::size_t n = end - begin;
    std::vector<std::size_t> counts(k_, 0);
    for (std::size_t i = begin; i < end; ++i) ++counts[y_[rows_[i]]];
    std::vector<double> dist(k_);
    for (int c = 0; c < k_; ++c) dist[c] = static_cast<double>(counts[c]) / n;

    TreeNode leaf;
    leaf.count = n;
    const int id = tree_.add_node(leaf, dist);

    const bool pure = std::count(counts.begin(), counts.end(), 0) >= k_ - 1;
    if (pure || depth >= params_.max_depth || n < 2 * params_.min_leaf) return id;

    const double parent = gini(counts, n);
    Split best = find_split(begin, end, counts);
    if (best.feature < 0 || best.impurity >= parent - kImpurityTol) return id;

    auto mid = std::partition(rows_.begin() + begin, rows_.begin() + end, [&](std::size_t r) {
      return static_cast<double>(x_(r, best.feature)) <= best.threshold;
    });
    const std::size_t split = static_cast<std::size_t>(mid - rows_.begin());
    const int left = grow(begin, split, depth + 1);
    const int right = grow(split, end, depth + 1);
    auto& node = tree_.node(id);
    node.feature = best.feature;
    node.threshold = best.threshold;
    node.left = left;
    node.right = right;
    return id;
  }

  Split find_split(std::size_t begin, std::size_t end, const std::vector<std::size_t>& counts) {
    const std::size_t m = x_.cols();
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    Split best;
    std::size_t visited = 0;
    // Draw features without replacement until mtry non-constant ones were
    // examined or the features run out.
    for (std::size_t i = 0; i < m && visited < mtry_; ++i) {
      if (mtry_ < m) {
        std::uniform_int_distribution<std::size_t> pick(i, m - 1);
        std::swap(order_[i], order_[pick(rng_)]);
      }
      const std::size_t f = order_[i];
      bool constant = binary_[f] ? scan_binary(f, begin, end, counts, best)
                                 : scan_real(f, begin, end, counts, best);
      if (!constant) ++visited;
    }
    return best;
  }

  bool scan_binary(std::size_t f, std::size_t begin, std::size_t end,
                   const std::vector<std::size_t>& counts, Split& best) {
    std::vector<std::size_t> left(k_, 0);
    std::size_t n_left = 0;
    for (std::size_t i = begin; i < end; ++i) {
      const std::size_t r = rows_[i];
      if (x_(r, f) == 0.0f) {
        ++left[y_[r]];
        ++n_left;
      }
    }
    const std::size_t n = end - begin;
    if (n_left == 0 || n_left == n) return true;
    const std::size_t n_right = n - n_left;
    if (n_left < params_.min_leaf || n_right < params_.min_leaf) return false;
    std::vector<std::size_t> right(k_);
    for (int c = 0; c < k_; ++c) right[c] = counts[c] - left[c];
    const double imp = weighted_impurity(left, n_left, right, n_right);
    if (best.worse_than(imp, static_cast<int>(f), 0.5)) {
      best = {static_cast<int>(f), 0.5, imp};
    }
    return false;
  }

  bool scan_real(std::size_t f, std::size_t begin, std::size_t end,
                 const std::vector<std::size_t>& counts, Split& best) {
    const std::size_t n = end - begin;
    pairs_.clear();
    for (std::size_t i = begin; i < end; ++i) {
      const std::size_t r = rows_[i];
      pairs_.emplace_back(x_(r, f), y_[r]);
    }
    std::sort(pairs_.begin(), pairs_.end());
    if (pairs_.front().first == pairs_.back().first) return true;

    if (params_.random_thresholds) {
      std::uniform_real_distribution<double> pick(pairs_.front().first, pairs_.back().first);
      const double thr = pick(rng_);
      std::vector<std::size_t> left(k_, 0);
      std::size_t n_left = 0;
      for (const auto& [v, c] : pairs_) {
        if (static_cast<double>(v) <= thr) {
          ++left[c];
          ++n_left;
        }
      }
      const std::size_t n_right = n - n_left;
      if (n_left < params_.min_leaf || n_right < params_.min_leaf || n_left == 0 ||
          n_right == 0) {
        return false;
      }
      std::vector<std::size_t> right(k_);
      for (int c = 0; c < k_; ++c) right[c] = counts[c] - left[c];
      const double imp = weighted_impurity(left, n_left, right, n_right);
      if (best.worse_than(imp, static_cast<int>(f), thr)) best = {static_cast<int>(f), thr, imp};
      return false;
    }

    std::vector<std::size_t> left(k_, 0);
    std::vector<std::size_t> right = counts;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const int c = pairs_[i].second;
      ++left[c];
      --right[c];
      if (pairs_[i].first == pairs_[i + 1].first) continue;
      const std::size_t n_left = i + 1;
      const std::size_t n_right = n - n_left;
      if (n_left < params_.min_leaf || n_right < params_.min_leaf) continue;
      const double thr =
          0.5 * (static_cast<double>(pairs_[i].first) + static_cast<double>(pairs_[i + 1].first));
      const double imp = weighted_impurity(left, n_left, right, n_right);
      if (best.worse_than(imp, static_cast<int>(f), thr)) best = {static_cast<int>(f), thr, imp};
    }
    return false;
  }

  const Matrix& x_;
  std::span<const int> y_;
  int k_;
  const TreeParams& params_;
  std::span<const char> binary_;
  Rng& rng_;
  DecisionTree tree_;
  std::size_t mtry_ = 0;
  std::vector<std::size_t> rows_;
  std::vector<std::size_t> order_;
  std::vector<std::pair<float, int>> pairs_;
};

void check_inputs(const Matrix& x, std::span<const int> y, int num_classes) {
  if (x.rows() == 0) throw EmptyInputError("cannot fit a tree on zero rows");
  if (y.size() != x.rows()) throw DimensionError("label count does not match row count");
  if (num_classes < 1) throw ConfigError("num_classes must be positive");
  for (int l : y) {
    if (l < 0 || l >= num_classes) throw SchemaError("label outside [0, num_classes)");
  }
}

}  // namespace

double gini(std::span<const std::size_t> class_counts, std::size_t total) {
  if (total == 0) return 0.0;
  double s = 0.0;
  for (auto c : class_counts) s += static_cast<double>(c) * static_cast<double>(c);
  return 1.0 - s / (static_cast<double>(total) * static_cast<double>(total));
}

double split_impurity(const Matrix& x, std::span<const int> y, int num_classes,
                      std::span<const std::size_t> rows, std::size_t feature,
                      double threshold) {
  std::vector<std::size_t> left(num_classes, 0);
  std::vector<std::size_t> right(num_classes, 0);
  std::size_t nl = 0;
  std::size_t nr = 0;
  for (auto r : rows) {
    if (static_cast<double>(x(r, feature)) <= threshold) {
      ++left[y[r]];
      ++nl;
    } else {
      ++right[y[r]];
      ++nr;
    }
  }
  const double n = static_cast<double>(nl + nr);
  return (nl * gini(left, nl) + nr * gini(right, nr)) / n;
}

std::vector<char> binary_columns(const Matrix& x) {
  std::vector<char> out(x.cols(), 1);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    auto row = x.row(r);
    for (std::size_t c = 0; c < x.cols(); ++c) {
      if (row[c] != 0.0f && row[c] != 1.0f) out[c] = 0;
    }
  }
  return out;
}

DecisionTree fit_tree(const Matrix& x, std::span<const int> y, int num_classes,
                      const TreeParams& params) {
  check_inputs(x, y, num_classes);
  std::vector<std::size_t> rows(x.rows());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  const auto bin = binary_columns(x);
  Rng rng = make_rng(params.seed, "fit_tree");
  return fit_tree_rows(x, y, num_classes, rows, params, bin, rng);
}

DecisionTree fit_tree_rows(const Matrix& x, std::span<const int> y, int num_classes,
                           std::span<const std::size_t> rows, const TreeParams& params,
                           std::span<const char> binary_cols, Rng& rng) {
  if (rows.empty()) throw EmptyInputError("cannot fit a tree on zero rows");
  if (params.max_depth < 0) throw ConfigError("max_depth must be non-negative");
  if (params.min_leaf < 1) throw ConfigError("min_leaf must be at least 1");
  Builder builder(x, y, num_classes, params, binary_cols, rng);
  return builder.build(std::vector<std::size_t>(rows.begin(), rows.end()));
}

int DecisionTree::add_node(const TreeNode& node, std::span<const double> dist) {
  nodes_.push_back(node);
  dist_.insert(dist_.end(), dist.begin(), dist.end());
  return static_cast<int>(nodes_.size()) - 1;
}

ProbMatrix DecisionTree::predict_proba(const Matrix& x) const {
  if (x.cols() != num_features_) {
    throw DimensionError("model expects " + std::to_string(num_features_) + " features, got " +
                         std::to_string(x.cols()));
  }
  ProbMatrix out(x.rows(), num_classes_);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    auto d = predict_row(x.row(r));
    std::copy(d.begin(), d.end(), out.row(r).begin());
  }
  return out;
}

int DecisionTree::depth() const {
  if (nodes_.empty()) return 0;
  std::vector<int> depth_of(nodes_.size(), 0);
  int best = 0;
  // Children always have larger indices than their parent.
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& n = nodes_[i];
    if (n.is_leaf()) continue;
    depth_of[n.left] = depth_of[n.right] = depth_of[i] + 1;
    best = std::max(best, depth_of[i] + 1);
  }
  return best;
}

bool DecisionTree::uses_feature(std::size_t feature) const {
  return std::any_of(nodes_.begin(), nodes_.end(),
                     [&](const TreeNode& n) { return n.feature == static_cast<int>(feature); });
}

std::vector<bool> DecisionTree::used_features() const {
  std::vector<bool> used(num_features_, false);
  for (const auto& n : nodes_) {
    if (!n.is_leaf()) used[n.feature] = true;
  }
  return used;
}

Json to_json(const DecisionTree& tree) {
  Json feature = Json::array(), threshold = Json::array(), left = Json::array(),
       right = Json::array(), count = Json::array(), dist = Json::array();
  for (std::size_t i = 0; i < tree.nodes().size(); ++i) {
    const auto& n = tree.nodes()[i];
    feature.push_back(n.feature);
    threshold.push_back(n.threshold);
    left.push_back(n.left);
    right.push_back(n.right);
    count.push_back(n.count);
    for (double p : tree.distribution(static_cast<int>(i))) dist.push_back(p);
  }
  return Json{{"num_classes", tree.num_classes()},
              {"num_features", tree.num_features()},
              {"feature", feature},
              {"threshold", threshold},
              {"left", left},
              {"right", right},
              {"count", count},
              {"distribution", dist}};
}

DecisionTree tree_from_json(const Json& doc) {
  DecisionTree tree(doc.at("num_classes").get<int>(), doc.at("num_features").get<std::size_t>());
  const auto& feature = doc.at("feature");
  const auto& dist = doc.at("distribution");
  const std::size_t k = static_cast<std::size_t>(tree.num_classes());
  if (dist.size() != feature.size() * k) throw SchemaError("tree distribution size mismatch");
  std::vector<double> d(k);
  for (std::size_t i = 0; i < feature.size(); ++i) {
    TreeNode n;
    n.feature = feature[i].get<int>();
    n.threshold = doc.at("threshold")[i].get<double>();
    n.left = doc.at("left")[i].get<int>();
    n.right = doc.at("right")[i].get<int>();
    n.count = doc.at("count")[i].get<std::size_t>();
    if (n.feature >= static_cast<int>(tree.num_features())) {
      throw SchemaError("tree split feature out of range");
    }
    for (std::size_t c = 0; c < k; ++c) d[c] = dist[i * k + c].get<double>();
    tree.add_node(n, d);
  }
  return tree;
}

}  // namespace hierids
