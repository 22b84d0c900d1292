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
#include "hierids/rng.hpp"

namespace hierids {

enum class FeatureStatus { kTentative, kConfirmed, kUnimportant };
std::string_view to_string(FeatureStatus s);

struct BorutaConfig {
  int max_runs = 100;
  ForestParams forest;
  std::uint64_t seed = 0;
  double alpha = 0.05;
  // Settle features still tentative after max_runs by median Z against the
  // median best-shadow Z.
  bool resolve_tentative = true;

  void validate() const;
};

enum class RunVerdict { kMiss, kHit };

struct BorutaResult {
  std::vector<std::string> feature_names;
  std::vector<FeatureStatus> status;
  // z_history[run][feature]; NaN where the feature had already been dropped.
  std::vector<std::vector<double>> z_history;
  std::vector<double> mzsa_history;
  std::vector<int> hits;
  std::vector<int> runs_present;
  // Feature statuses after each run, to audit monotone termination.
  std::vector<std::vector<FeatureStatus>> status_history;
  std::vector<std::size_t> ranking;

  std::size_t runs() const { return mzsa_history.size(); }
  double median_z(std::size_t feature) const;
};

// Columns [X, X_shadow]: column M+i is a row permutation of column i.
Matrix make_shadow(const Matrix& x, Rng& rng);

// importance / stddev, with 0 for 0/0 and the largest finite magnitude (sign
// kept) for nonzero / 0.
std::vector<double> zscores(const ImportanceVector& importance);

// MZSA = max shadow Z; a feature is a hit iff its Z is strictly above.
std::vector<RunVerdict> classify_run(std::span<const double> z_real,
                                     std::span<const double> z_shadow, double* mzsa = nullptr);

// P(X >= hits) and P(X <= hits) for X ~ Binomial(trials, 0.5).
double binomial_upper_tail(int hits, int trials);
double binomial_lower_tail(int hits, int trials);

BorutaResult boruta_run(const Matrix& x, std::span<const int> y, int num_classes,
                        std::vector<std::string> feature_names, const BorutaConfig& config);

// Confirmed, then Tentative, then Unimportant; median Z descending inside a
// group, ties by feature index.
std::vector<std::size_t> rank_features(const BorutaResult& result);

Json to_json(const BorutaResult& result, const BorutaConfig& config);
std::vector<std::string> ranked_names(const BorutaResult& result);

}  // namespace hierids
