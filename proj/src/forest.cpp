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

#include "hierids/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hierids/errors.hpp"
#include "hierids/rng.hpp"

namespace hierids {

ForestParams ForestParams::decision_tree(std::uint64_t seed) {
  ForestParams p;
  p.num_trees = 1;
  p.bootstrap = false;
  p.features_per_split = std::numeric_limits<std::size_t>::max();
  p.seed = seed;
  return p;
}

ForestParams ForestParams::extra_trees(std::uint64_t seed) {
  ForestParams p;
  p.bootstrap = false;
  p.random_thresholds = true;
  p.seed = seed;
  return p;
}

std::size_t ForestParams::resolved_features_per_split(std::size_t num_features) const {
  if (features_per_split) return std::clamp<std::size_t>(*features_per_split, 1, num_features);
  const auto root = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(num_features))));
  return std::clamp<std::size_t>(root, 1, num_features);
}

std::vector<std::size_t> ForestModel::oob_rows(std::size_t t) const {
  std::vector<char> in_bag(num_training_rows, 0);
  for (auto r : bootstrap_indices.at(t)) in_bag[r] = 1;
  std::vector<std::size_t> out;
  for (std::size_t r = 0; r < num_training_rows; ++r) {
    if (!in_bag[r]) out.push_back(r);
  }
  return out;
}

namespace {

void check_fit_inputs(const Matrix& x, std::span<const int> y, int num_classes,
                      const ForestParams& params) {
  if (x.rows() == 0) throw EmptyInputError("cannot fit a forest on zero rows");
  if (y.size() != x.rows()) throw DimensionError("label count does not match row count");
  if (params.num_trees < 1) throw ConfigError("forest needs at least one tree");
  if (num_classes < 1) throw ConfigError("num_classes must be positive");
  for (int l : y) {
    if (l < 0 || l >= num_classes) throw SchemaError("label outside [0, num_classes)");
  }
}

ForestModel empty_model(const Matrix& x, int num_classes, const ForestParams& params) {
  ForestModel model;
  model.num_classes = num_classes;
  model.num_features = x.cols();
  model.num_training_rows = x.rows();
  model.trees.resize(params.num_trees);
  model.bootstrap_indices.resize(params.num_trees);
  return model;
}

void fit_one(ForestModel& model, std::size_t t, const Matrix& x, std::span<const int> y,
             const ForestParams& params, std::span<const char> bin) {
  Rng rng = make_rng(params.seed, "forest_tree", {t});
  const std::size_t n = x.rows();
  std::vector<std::size_t> rows(n);
  auto& drawn = model.bootstrap_indices[t];
  drawn.resize(n);
  if (params.bootstrap) {
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (std::size_t i = 0; i < n; ++i) rows[i] = pick(rng);
  } else {
    std::iota(rows.begin(), rows.end(), std::size_t{0});
  }
  for (std::size_t i = 0; i < n; ++i) drawn[i] = static_cast<std::uint32_t>(rows[i]);

  TreeParams tp;
  tp.max_depth = params.max_depth;
  tp.min_leaf = params.min_leaf;
  tp.features_per_split = params.resolved_features_per_split(x.cols());
  tp.random_thresholds = params.random_thresholds;
  model.trees[t] = fit_tree_rows(x, y, model.num_classes, rows, tp, bin, rng);
}

void predict_one(const ForestModel& model, const Matrix& x, std::size_t r, ProbMatrix& out) {
  auto dst = out.row(r);
  std::fill(dst.begin(), dst.end(), 0.0);
  for (const auto& tree : model.trees) {
    auto d = tree.predict_row(x.row(r));
    for (int c = 0; c < model.num_classes; ++c) dst[c] += d[c];
  }
  const double inv = 1.0 / static_cast<double>(model.trees.size());
  for (auto& v : dst) v *= inv;
}

void check_predict(const ForestModel& model, const Matrix& x) {
  if (x.cols() != model.num_features) {
    throw DimensionError("model expects " + std::to_string(model.num_features) +
                         " features, got " + std::to_string(x.cols()));
  }
}

int argmax(std::span<const double> d) {
  return static_cast<int>(std::max_element(d.begin(), d.end()) - d.begin());
}

// Per-tree OOB error and per-feature error increase, written into one row of
// `drops` (length M). Returns false when the tree has no OOB rows.
bool tree_drops(const ForestModel& model, std::size_t t, const Matrix& x,
                std::span<const int> y, std::uint64_t seed, std::span<double> drops) {
  const auto oob = model.oob_rows(t);
  std::fill(drops.begin(), drops.end(), 0.0);
  if (oob.empty()) return false;
  const auto& tree = model.trees[t];
  const double n = static_cast<double>(oob.size());

  std::size_t wrong = 0;
  for (auto r : oob) wrong += argmax(tree.predict_row(x.row(r))) != y[r];
  const double err_orig = wrong / n;

  const auto used = tree.used_features();
  std::vector<float> shuffled(oob.size());
  for (std::size_t f = 0; f < model.num_features; ++f) {
    // A feature the tree never tests cannot change its predictions.
    if (!used[f]) continue;
    for (std::size_t i = 0; i < oob.size(); ++i) shuffled[i] = x(oob[i], f);
    Rng rng = make_rng(seed, "permutation_importance", {t, f});
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    std::size_t wrong_perm = 0;
    for (std::size_t i = 0; i < oob.size(); ++i) {
      const auto rec = x.row(oob[i]);
      const int leaf = tree.leaf_index([&](int g) {
        return static_cast<double>(static_cast<std::size_t>(g) == f ? shuffled[i] : rec[g]);
      });
      wrong_perm += argmax(tree.distribution(leaf)) != y[oob[i]];
    }
    drops[f] = wrong_perm / n - err_orig;
  }
  return true;
}

ImportanceVector reduce_drops(const std::vector<double>& drops, const std::vector<char>& has_oob,
                              std::size_t m) {
  ImportanceVector out;
  out.importance.assign(m, 0.0);
  out.stddev.assign(m, 0.0);
  for (std::size_t t = 0; t < has_oob.size(); ++t) {
    if (!has_oob[t]) continue;
    ++out.trees_used;
    for (std::size_t f = 0; f < m; ++f) out.importance[f] += drops[t * m + f];
  }
  if (out.trees_used == 0) {
    throw Error("no tree has out-of-bag rows; permutation importance is undefined");
  }
  for (auto& v : out.importance) v /= static_cast<double>(out.trees_used);
  if (out.trees_used > 1) {
    for (std::size_t t = 0; t < has_oob.size(); ++t) {
      if (!has_oob[t]) continue;
      for (std::size_t f = 0; f < m; ++f) {
        const double d = drops[t * m + f] - out.importance[f];
        out.stddev[f] += d * d;
      }
    }
    for (auto& v : out.stddev) v = std::sqrt(v / static_cast<double>(out.trees_used - 1));
  }
  return out;
}

void check_importance(const ForestModel& model, const Matrix& x, std::span<const int> y) {
  check_predict(model, x);
  if (x.rows() != model.num_training_rows || y.size() != x.rows()) {
    throw DimensionError("permutation importance needs the training rows and labels");
  }
  if (model.bootstrap_indices.size() != model.trees.size()) {
    throw Error("model does not retain bootstrap indices");
  }
}

}  // namespace

ForestModel fit_forest(const Matrix& x, std::span<const int> y, int num_classes,
                       const ForestParams& params) {
  check_fit_inputs(x, y, num_classes, params);
  ForestModel model = empty_model(x, num_classes, params);
  const auto bin = binary_columns(x);
  const long trees = params.num_trees;
#pragma omp parallel for schedule(dynamic)
  for (long t = 0; t < trees; ++t) fit_one(model, static_cast<std::size_t>(t), x, y, params, bin);
  return model;
}

ProbMatrix predict_proba(const ForestModel& model, const Matrix& x) {
  check_predict(model, x);
  ProbMatrix out(x.rows(), model.num_classes);
  const long rows = static_cast<long>(x.rows());
#pragma omp parallel for schedule(static)
  for (long r = 0; r < rows; ++r) predict_one(model, x, static_cast<std::size_t>(r), out);
  return out;
}

ImportanceVector permutation_importance(const ForestModel& model, const Matrix& x,
                                        std::span<const int> y, std::uint64_t seed) {
  check_importance(model, x, y);
  const std::size_t m = model.num_features;
  const long trees = static_cast<long>(model.trees.size());
  std::vector<double> drops(model.trees.size() * m, 0.0);
  std::vector<char> has_oob(model.trees.size(), 0);
#pragma omp parallel for schedule(dynamic)
  for (long t = 0; t < trees; ++t) {
    const auto ut = static_cast<std::size_t>(t);
    has_oob[ut] = tree_drops(model, ut, x, y, seed, std::span<double>(drops).subspan(ut * m, m));
  }
  return reduce_drops(drops, has_oob, m);
}

namespace reference {

ForestModel fit_forest_serial(const Matrix& x, std::span<const int> y, int num_classes,
                              const ForestParams& params) {
  check_fit_inputs(x, y, num_classes, params);
  ForestModel model = empty_model(x, num_classes, params);
  const auto bin = binary_columns(x);
  for (std::size_t t = 0; t < model.trees.size(); ++t) fit_one(model, t, x, y, params, bin);
  return model;
}

ProbMatrix predict_proba_serial(const ForestModel& model, const Matrix& x) {
  check_predict(model, x);
  ProbMatrix out(x.rows(), model.num_classes);
  for (std::size_t r = 0; r < x.rows(); ++r) predict_one(model, x, r, out);
  return out;
}

ImportanceVector permutation_importance_serial(const ForestModel& model, const Matrix& x,
                                               std::span<const int> y, std::uint64_t seed) {
  check_importance(model, x, y);
  const std::size_t m = model.num_features;
  std::vector<double> drops(model.trees.size() * m, 0.0);
  std::vector<char> has_oob(model.trees.size(), 0);
  for (std::size_t t = 0; t < model.trees.size(); ++t) {
    has_oob[t] = tree_drops(model, t, x, y, seed, std::span<double>(drops).subspan(t * m, m));
  }
  return reduce_drops(drops, has_oob, m);
}

}  // namespace reference

double oob_accuracy(const ForestModel& model, const Matrix& x, std::span<const int> y) {
  std::size_t right = 0;
  std::size_t total = 0;
  for (std::size_t t = 0; t < model.trees.size(); ++t) {
    for (auto r : model.oob_rows(t)) {
      right += argmax(model.trees[t].predict_row(x.row(r))) == y[r];
      ++total;
    }
  }
  if (total == 0) throw Error("no out-of-bag rows");
  return static_cast<double>(right) / total;
}

std::vector<int> argmax_rows(const ProbMatrix& proba) {
  std::vector<int> out(proba.rows());
  for (std::size_t r = 0; r < proba.rows(); ++r) out[r] = argmax(proba.row(r));
  return out;
}

Json to_json(const ForestModel& model, bool include_bootstrap) {
  Json trees = Json::array();
  for (const auto& t : model.trees) trees.push_back(to_json(t));
  Json doc{{"num_classes", model.num_classes},
           {"num_features", model.num_features},
           {"num_training_rows", model.num_training_rows},
           {"trees", trees}};
  if (include_bootstrap) doc["bootstrap_indices"] = model.bootstrap_indices;
  return doc;
}

ForestModel forest_from_json(const Json& doc) {
  ForestModel model;
  model.num_classes = doc.at("num_classes").get<int>();
  model.num_features = doc.at("num_features").get<std::size_t>();
  model.num_training_rows = doc.at("num_training_rows").get<std::size_t>();
  for (const auto& t : doc.at("trees")) model.trees.push_back(tree_from_json(t));
  if (doc.contains("bootstrap_indices")) {
    model.bootstrap_indices =
        doc.at("bootstrap_indices").get<std::vector<std::vector<std::uint32_t>>>();
  }
  if (model.trees.empty()) throw SchemaError("forest document has no trees");
  return model;
}

}  // namespace hierids
