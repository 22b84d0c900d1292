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

#include <algorithm>
#include <cfloat>
#include <cmath>

#include "hierids/boruta.hpp"
#include "hierids/errors.hpp"

using namespace hierids;

namespace {

struct Data {
  Matrix x;
  std::vector<int> y;
};

// Binary labels; the first `informative` columns agree with the label with
// probability `bias`, the rest are coin flips.
Data planted(std::size_t n, std::size_t m, std::size_t informative, double bias,
             std::uint64_t seed) {
  Rng rng(seed);
  std::bernoulli_distribution coin(0.5), keep(bias);
  Data d{Matrix(n, m), std::vector<int>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    d.y[i] = coin(rng);
    for (std::size_t j = 0; j < m; ++j) {
      d.x(i, j) = j < informative ? static_cast<float>(keep(rng) ? d.y[i] : 1 - d.y[i])
                                  : static_cast<float>(coin(rng));
    }
  }
  return d;
}

BorutaConfig small_config(int max_runs, std::uint64_t seed) {
  BorutaConfig c;
  c.max_runs = max_runs;
  c.forest.num_trees = 40;
  c.seed = seed;
  return c;
}

double choose(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

TEST_CASE("make_shadow keeps originals and permutes each column") {
  Data d = planted(50, 4, 1, 0.9, 1);
  for (std::size_t i = 0; i < 50; ++i) d.x(i, 3) = 0.25f;
  Rng rng(2);
  const Matrix aug = make_shadow(d.x, rng);
  REQUIRE(aug.cols() == 8);
  std::vector<std::size_t> orig{0, 1, 2, 3};
  CHECK(aug.select_cols(orig) == d.x);
  for (std::size_t j = 0; j < 4; ++j) {
    std::vector<float> a, b;
    for (std::size_t i = 0; i < 50; ++i) {
      a.push_back(d.x(i, j));
      b.push_back(aug(i, 4 + j));
    }
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    CHECK(a == b);
  }
  for (std::size_t i = 0; i < 50; ++i) CHECK(aug(i, 7) == 0.25f);
}

TEST_CASE("shadow of an informative feature is uncorrelated with the label") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Data d = planted(1000, 1, 1, 0.95, 100 + seed);
    Rng rng(seed);
    const Matrix aug = make_shadow(d.x, rng);
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (std::size_t i = 0; i < 1000; ++i) {
      const double a = aug(i, 1), b = d.y[i];
      sx += a; sy += b; sxx += a * a; syy += b * b; sxy += a * b;
    }
    const double n = 1000;
    const double r = (sxy - sx * sy / n) /
                     std::sqrt((sxx - sx * sx / n) * (syy - sy * sy / n));
    CHECK(std::abs(r) < 0.1);
  }
}

TEST_CASE("zscores and sentinels") {
  ImportanceVector iv;
  iv.importance = {0.2, 0.0, 0.3, -0.1, 0.0};
  iv.stddev = {0.1, 0.0, 0.0, 0.0, 0.5};
  const auto z = zscores(iv);
  CHECK(z[0] == doctest::Approx(2.0));
  CHECK(z[1] == 0.0);
  CHECK(z[2] == DBL_MAX);
  CHECK(z[3] == -DBL_MAX);
  CHECK(z[4] == 0.0);
}

TEST_CASE("classify_run examples") {
  double mzsa = -1;
  std::vector<double> real{3.0, 0.1}, shadow{1.2, 0.8};
  auto v = classify_run(real, shadow, &mzsa);
  CHECK(mzsa == 1.2);
  CHECK(v[0] == RunVerdict::kHit);
  CHECK(v[1] == RunVerdict::kMiss);
  std::vector<double> zeros{0.0, 0.0}, pos{0.5, 0.0};
  v = classify_run(pos, zeros, &mzsa);
  CHECK(mzsa == 0.0);
  CHECK(v[0] == RunVerdict::kHit);
  CHECK(v[1] == RunVerdict::kMiss);  // equality is a miss
  std::vector<double> tie{1.2};
  CHECK(classify_run(tie, shadow)[0] == RunVerdict::kMiss);
  CHECK_THROWS_AS(classify_run(std::vector<double>{}, shadow), ConfigError);
}

TEST_CASE("binomial tails against direct summation") {
  for (int n = 1; n <= 30; ++n) {
    for (int k = 0; k <= n; ++k) {
      double upper = 0, lower = 0;
      for (int i = k; i <= n; ++i) upper += choose(n, i) * std::pow(0.5, n);
      for (int i = 0; i <= k; ++i) lower += choose(n, i) * std::pow(0.5, n);
      CHECK(binomial_upper_tail(k, n) == doctest::Approx(upper).epsilon(1e-10));
      CHECK(binomial_lower_tail(k, n) == doctest::Approx(lower).epsilon(1e-10));
    }
  }
}

TEST_CASE("planted features are confirmed and noise rejected") {
  const Data d = planted(600, 8, 2, 0.95, 7);
  const auto cfg = small_config(25, 3);
  const BorutaResult r = boruta_run(d.x, d.y, 2, {}, cfg);
  CHECK(r.status[0] == FeatureStatus::kConfirmed);
  CHECK(r.status[1] == FeatureStatus::kConfirmed);
  int rejected = 0;
  for (std::size_t j = 2; j < 8; ++j) rejected += r.status[j] == FeatureStatus::kUnimportant;
  CHECK(rejected >= 5);
  CHECK((r.ranking[0] <= 1 && r.ranking[1] <= 1));
  CHECK(ranked_names(r)[0].rfind("F", 0) == 0);

  SUBCASE("history invariants") {
    CHECK(r.z_history.size() == r.mzsa_history.size());
    CHECK(r.status_history.size() == r.runs());
    CHECK(r.runs() <= 25u);
    for (std::size_t run = 1; run < r.status_history.size(); ++run) {
      for (std::size_t j = 0; j < 8; ++j) {
        if (r.status_history[run - 1][j] != FeatureStatus::kTentative) {
          CHECK(r.status_history[run][j] == r.status_history[run - 1][j]);
        }
      }
    }
    std::vector<std::size_t> sorted = r.ranking;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t j = 0; j < 8; ++j) CHECK(sorted[j] == j);
  }
  SUBCASE("deterministic") {
    const BorutaResult again = boruta_run(d.x, d.y, 2, {}, cfg);
    CHECK(again.status == r.status);
    CHECK(again.ranking == r.ranking);
    CHECK(again.mzsa_history == r.mzsa_history);
  }
  SUBCASE("json") {
    const Json doc = to_json(r, cfg);
    CHECK(doc["ranking"].size() == 8);
    CHECK(doc["settings"]["max_runs"] == 25);
  }
}

TEST_CASE("all-noise data confirms nothing and hits stay near chance") {
  std::size_t hits = 0, present = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Data d = planted(300, 10, 0, 0.5, 500 + seed);
    auto cfg = small_config(10, seed);
    cfg.resolve_tentative = false;
    const BorutaResult r = boruta_run(d.x, d.y, 2, {}, cfg);
    for (std::size_t j = 0; j < 10; ++j) {
      CHECK(r.status[j] != FeatureStatus::kConfirmed);
      hits += r.hits[j];
      present += r.runs_present[j];
    }
  }
  CHECK(static_cast<double>(hits) / static_cast<double>(present) < 0.25);
}

TEST_CASE("one run cannot reach significance") {
  const Data d = planted(200, 5, 1, 0.95, 9);
  auto cfg = small_config(1, 1);
  cfg.resolve_tentative = false;
  const BorutaResult r = boruta_run(d.x, d.y, 2, {}, cfg);
  for (auto s : r.status) CHECK(s == FeatureStatus::kTentative);
}

TEST_CASE("rank_features sort contract") {
  BorutaResult r;
  r.feature_names = {"a", "b", "c", "d", "e"};
  r.status = {FeatureStatus::kUnimportant, FeatureStatus::kConfirmed, FeatureStatus::kConfirmed,
              FeatureStatus::kTentative, FeatureStatus::kUnimportant};
  r.z_history = {{0.1, 3.2, 5.1, 1.0, 0.1}};
  r.mzsa_history = {0.9};
  const auto order = rank_features(r);
  CHECK(order == std::vector<std::size_t>{2, 1, 3, 0, 4});
}

TEST_CASE("degenerate inputs") {
  const Data d = planted(40, 3, 1, 0.9, 2);
  const std::vector<int> one_class(40, 1);
  CHECK_THROWS_AS(boruta_run(d.x, one_class, 2, {}, small_config(5, 0)), ConfigError);
  BorutaConfig bad;
  bad.alpha = 1.5;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = {};
  bad.max_runs = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}
