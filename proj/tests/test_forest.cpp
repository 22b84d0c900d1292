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

#include <doctest.h>

#include <cmath>

#include "hierids/errors.hpp"
#include "hierids/forest.hpp"
#include "test_support.hpp"

using namespace hierids;

namespace {

struct Planted {
  Matrix x;
  std::vector<int> y;
};

// Binary task where feature 0 equals the label with probability `bias`;
// the other features are coin flips.
Planted planted(std::size_t n, std::size_t m, double bias, std::uint64_t seed) {
  Rng rng(seed);
  std::bernoulli_distribution coin(0.5), keep(bias);
  Planted p{Matrix(n, m), std::vector<int>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    p.y[i] = coin(rng);
    for (std::size_t j = 0; j < m; ++j) p.x(i, j) = coin(rng) ? 1.0f : 0.0f;
    p.x(i, 0) = keep(rng) ? static_cast<float>(p.y[i]) : static_cast<float>(1 - p.y[i]);
  }
  return p;
}

}  // namespace

TEST_CASE("degenerate forest matches a tree on its bootstrap sample") {
  const Planted p = planted(150, 5, 0.8, 1);
  ForestParams fp;
  fp.num_trees = 1;
  fp.features_per_split = 5;
  fp.seed = 4;
  const ForestModel f = fit_forest(p.x, p.y, 2, fp);
  std::vector<std::size_t> rows(f.bootstrap_indices[0].begin(), f.bootstrap_indices[0].end());
  const Matrix xb = p.x.select_rows(rows);
  std::vector<int> yb;
  for (auto r : rows) yb.push_back(p.y[r]);
  const DecisionTree t = fit_tree(xb, yb, 2, {});
  CHECK(predict_proba(f, p.x) == t.predict_proba(p.x));
}

TEST_CASE("bootstrap bookkeeping") {
  const Planted p = planted(500, 4, 0.9, 2);
  ForestParams fp;
  fp.num_trees = 40;
  fp.seed = 8;
  const ForestModel f = fit_forest(p.x, p.y, 2, fp);
  REQUIRE(f.trees.size() == 40);
  REQUIRE(f.bootstrap_indices.size() == 40);
  for (std::size_t t = 0; t < f.trees.size(); ++t) {
    CHECK(f.bootstrap_indices[t].size() == 500);
    // Expected OOB share (1 - 1/N)^N ~ e^-1 = 0.368.
    const double share = static_cast<double>(f.oob_rows(t).size()) / 500.0;
    CHECK(share >= 0.30);
    CHECK(share <= 0.44);
  }
}

TEST_CASE("separable data reaches OOB accuracy >= 0.99") {
  const Planted p = planted(400, 6, 1.0, 3);
  ForestParams fp;
  fp.seed = 5;
  const ForestModel f = fit_forest(p.x, p.y, 2, fp);
  CHECK(oob_accuracy(f, p.x, p.y) >= 0.99);
}

TEST_CASE("parallel kernels equal the serial reference") {
  const auto ds = hierids::testing::separable_six_class(300, 8, 6);
  ForestParams fp;
  fp.num_trees = 24;
  fp.seed = 77;
  const ForestModel par = fit_forest(ds.records, ds.labels, 6, fp);
  const ForestModel ser = reference::fit_forest_serial(ds.records, ds.labels, 6, fp);
  CHECK(par == ser);
  CHECK(predict_proba(par, ds.records) == reference::predict_proba_serial(ser, ds.records));
  const auto a = permutation_importance(par, ds.records, ds.labels, 9);
  const auto b = reference::permutation_importance_serial(ser, ds.records, ds.labels, 9);
  CHECK(a.importance == b.importance);
  CHECK(a.stddev == b.stddev);
  CHECK(fit_forest(ds.records, ds.labels, 6, fp) == par);
}

TEST_CASE("probabilities sum to one and identical trees average to one tree") {
  const Planted p = planted(200, 5, 0.7, 4);
  ForestParams fp;
  fp.num_trees = 10;
  const ForestModel f = fit_forest(p.x, p.y, 2, fp);
  const ProbMatrix proba = predict_proba(f, p.x);
  for (std::size_t i = 0; i < proba.rows(); ++i) {
    CHECK(proba(i, 0) + proba(i, 1) == doctest::Approx(1.0).epsilon(1e-9));
  }
  ForestModel same = f;
  same.trees.assign(3, f.trees[0]);
  same.bootstrap_indices.assign(3, f.bootstrap_indices[0]);
  const ProbMatrix avg = predict_proba(same, p.x);
  const ProbMatrix one = f.trees[0].predict_proba(p.x);
  for (std::size_t i = 0; i < avg.data().size(); ++i) {
    CHECK(avg.data()[i] == doctest::Approx(one.data()[i]).epsilon(1e-15));
  }
}

TEST_CASE("permutation importance: planted beats noise, noise is near zero") {
  const Planted p = planted(600, 8, 0.9, 5);
  ForestParams fp;
  fp.num_trees = 60;
  fp.seed = 21;
  const ForestModel f = fit_forest(p.x, p.y, 2, fp);
  const ImportanceVector iv = permutation_importance(f, p.x, p.y, 3);
  REQUIRE(iv.importance.size() == 8);
  CHECK(iv.trees_used == 60);
  for (std::size_t j = 1; j < 8; ++j) {
    CHECK(iv.importance[0] > iv.importance[j]);
    CHECK(iv.stddev[j] >= 0.0);
  }
  CHECK(iv.importance[0] > 0.2);
  // Noise: |mean| within a loose multiple of its standard error.
  int outside = 0;
  for (std::size_t j = 1; j < 8; ++j) {
    if (std::abs(iv.importance[j]) >= 2.0 * iv.stddev[j] / std::sqrt(60.0) + 1e-12) ++outside;
  }
  CHECK(outside <= 2);
}

TEST_CASE("a feature no tree splits on contributes exactly zero") {
  Planted p = planted(300, 4, 1.0, 6);
  for (std::size_t i = 0; i < 300; ++i) p.x(i, 3) = 0.0f;  // constant, never split
  ForestParams fp;
  fp.num_trees = 15;
  const ForestModel f = fit_forest(p.x, p.y, 2, fp);
  const ImportanceVector iv = permutation_importance(f, p.x, p.y, 1);
  CHECK(iv.importance[3] == 0.0);
  CHECK(iv.stddev[3] == 0.0);
}

TEST_CASE("importance needs out-of-bag rows") {
  Matrix x(1, 2, 1.0f);
  const std::vector<int> y{1};
  ForestParams fp;
  fp.num_trees = 2;
  const ForestModel f = fit_forest(x, y, 2, fp);
  CHECK_THROWS_AS(permutation_importance(f, x, y, 0), Error);
  ForestModel no_boot = fit_forest(x, y, 2, ForestParams::decision_tree());
  CHECK_THROWS_AS(permutation_importance(no_boot, x, y, 0), Error);
}

TEST_CASE("presets and json") {
  CHECK(ForestParams{}.resolved_features_per_split(152) == 13);
  CHECK(ForestParams{}.resolved_features_per_split(16) == 4);
  const auto dt = ForestParams::decision_tree();
  CHECK(dt.num_trees == 1);
  CHECK_FALSE(dt.bootstrap);
  CHECK(dt.resolved_features_per_split(9) == 9);
  const auto et = ForestParams::extra_trees();
  CHECK(et.random_thresholds);
  CHECK_FALSE(et.bootstrap);

  const Planted p = planted(80, 3, 0.8, 7);
  ForestParams fp;
  fp.num_trees = 4;
  const ForestModel f = fit_forest(p.x, p.y, 2, fp);
  CHECK(forest_from_json(to_json(f)) == f);
  const ForestModel slim = forest_from_json(to_json(f, false));
  CHECK(predict_proba(slim, p.x) == predict_proba(f, p.x));
  CHECK(slim.bootstrap_indices.empty());
  CHECK_THROWS_AS(predict_proba(f, Matrix(2, 5)), DimensionError);
  CHECK_THROWS_AS(fit_forest(Matrix(0, 3), std::vector<int>{}, 2, fp), EmptyInputError);
}
