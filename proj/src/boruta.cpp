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

#include "hierids/boruta.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "hierids/errors.hpp"

namespace hierids {

std::string_view to_string(FeatureStatus s) {
  switch (s) {
    case FeatureStatus::kConfirmed: return "Confirmed";
    case FeatureStatus::kUnimportant: return "Unimportant";
    case FeatureStatus::kTentative: return "Tentative";
  }
  return "Tentative";
}

void BorutaConfig::validate() const {
  if (max_runs < 1) throw ConfigError("maxRuns must be at least 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  if (forest.num_trees < 1) throw ConfigError("Boruta forest needs at least one tree");
}

namespace {

double median(std::vector<double> v) {
  v.erase(std::remove_if(v.begin(), v.end(), [](double d) { return std::isnan(d); }), v.end());
  if (v.empty()) return -std::numeric_limits<double>::infinity();
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  double lo = *std::max_element(v.begin(), v.begin() + mid);
  return 0.5 * (lo + hi);
}

double log_choose(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace

double BorutaResult::median_z(std::size_t feature) const {
  std::vector<double> v;
  for (const auto& run : z_history) v.push_back(run[feature]);
  return median(std::move(v));
}

Matrix make_shadow(const Matrix& x, Rng& rng) {
  const std::size_t n = x.rows();
  const std::size_t m = x.cols();
  Matrix out(n, 2 * m);
  for (std::size_t r = 0; r < n; ++r) {
    auto src = x.row(r);
    std::copy(src.begin(), src.end(), out.row(r).begin());
  }
  std::vector<std::size_t> perm(n);
  for (std::size_t j = 0; j < m; ++j) {
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    for (std::size_t r = 0; r < n; ++r) out(r, m + j) = x(perm[r], j);
  }
  return out;
}

std::vector<double> zscores(const ImportanceVector& importance) {
  if (importance.importance.size() != importance.stddev.size()) {
    throw DimensionError("importance and stddev lengths differ");
  }
  std::vector<double> z(importance.importance.size());
  constexpr double kBig = std::numeric_limits<double>::max();
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double imp = importance.importance[i];
    const double sd = importance.stddev[i];
    if (sd > 0.0) {
      z[i] = imp / sd;
    } else if (imp == 0.0) {
      z[i] = 0.0;
    } else {
      z[i] = imp > 0.0 ? kBig : -kBig;
    }
  }
  return z;
}

std::vector<RunVerdict> classify_run(std::span<const double> z_real,
                                     std::span<const double> z_shadow, double* mzsa) {
  if (z_real.empty() || z_shadow.empty()) {
    throw ConfigError("classify_run needs real and shadow Z-scores");
  }
  const double best = *std::max_element(z_shadow.begin(), z_shadow.end());
  if (mzsa) *mzsa = best;
  std::vector<RunVerdict> out(z_real.size());
  for (std::size_t i = 0; i < z_real.size(); ++i) {
    out[i] = z_real[i] > best ? RunVerdict::kHit : RunVerdict::kMiss;
  }
  return out;
}

double binomial_upper_tail(int hits, int trials) {
  double p = 0.0;
  for (int k = std::max(hits, 0); k <= trials; ++k) {
    p += std::exp(log_choose(trials, k) - trials * std::log(2.0));
  }
  return std::min(p, 1.0);
}

double binomial_lower_tail(int hits, int trials) {
  double p = 0.0;
  for (int k = 0; k <= std::min(hits, trials); ++k) {
    p += std::exp(log_choose(trials, k) - trials * std::log(2.0));
  }
  return std::min(p, 1.0);
}

BorutaResult boruta_run(const Matrix& x, std::span<const int> y, int num_classes,
                        std::vector<std::string> feature_names, const BorutaConfig& config) {
  config.validate();
  const std::size_t m = x.cols();
  if (x.rows() == 0 || m == 0) throw EmptyInputError("Boruta needs a non-empty dataset");
  if (y.size() != x.rows()) throw DimensionError("labels are not aligned with the dataset");
  if (std::set<int>(y.begin(), y.end()).size() < 2) {
    throw ConfigError("Boruta needs at least two classes in the target labels");
  }
  if (feature_names.empty()) {
    for (std::size_t j = 0; j < m; ++j) feature_names.push_back("F" + std::to_string(j));
  }
  if (feature_names.size() != m) throw DimensionError("feature name count mismatch");

  BorutaResult result;
  result.feature_names = std::move(feature_names);
  result.status.assign(m, FeatureStatus::kTentative);
  result.hits.assign(m, 0);
  result.runs_present.assign(m, 0);

  // Each tail is tested at alpha / 2.
  const double tail = config.alpha / 2.0;
  const double nan = std::numeric_limits<double>::quiet_NaN();

  for (int run = 0; run < config.max_runs; ++run) {
    std::vector<std::size_t> alive;
    for (std::size_t j = 0; j < m; ++j) {
      if (result.status[j] != FeatureStatus::kUnimportant) alive.push_back(j);
    }
    bool any_tentative = std::any_of(result.status.begin(), result.status.end(),
                                     [](FeatureStatus s) { return s == FeatureStatus::kTentative; });
    if (!any_tentative) break;

    Rng rng = make_rng(config.seed, "boruta_shadow", {static_cast<std::uint64_t>(run)});
    const Matrix augmented = make_shadow(x.select_cols(alive), rng);
    ForestParams fp = config.forest;
    fp.seed = derive_seed(config.seed, "boruta_forest", {static_cast<std::uint64_t>(run)});
    const ForestModel forest = fit_forest(augmented, y, num_classes, fp);
    const auto imp = permutation_importance(
        forest, augmented, y,
        derive_seed(config.seed, "boruta_importance", {static_cast<std::uint64_t>(run)}));
    const auto z = zscores(imp);

    const std::size_t a = alive.size();
    std::span<const double> z_real(z.data(), a);
    std::span<const double> z_shadow(z.data() + a, a);
    double mzsa = 0.0;
    const auto verdicts = classify_run(z_real, z_shadow, &mzsa);

    std::vector<double> z_row(m, nan);
    for (std::size_t i = 0; i < a; ++i) {
      const std::size_t j = alive[i];
      z_row[j] = z_real[i];
      ++result.runs_present[j];
      if (verdicts[i] == RunVerdict::kHit) ++result.hits[j];
    }
    result.z_history.push_back(std::move(z_row));
    result.mzsa_history.push_back(mzsa);

    for (std::size_t j : alive) {
      if (result.status[j] != FeatureStatus::kTentative) continue;
      const int n = result.runs_present[j];
      if (binomial_upper_tail(result.hits[j], n) < tail) {
        result.status[j] = FeatureStatus::kConfirmed;
      } else if (binomial_lower_tail(result.hits[j], n) < tail) {
        result.status[j] = FeatureStatus::kUnimportant;
      }
    }
    result.status_history.push_back(result.status);
  }

  if (config.resolve_tentative) {
    const double shadow_median = median(result.mzsa_history);
    for (std::size_t j = 0; j < m; ++j) {
      if (result.status[j] != FeatureStatus::kTentative) continue;
      const double mz = result.median_z(j);
      if (mz > shadow_median) {
        result.status[j] = FeatureStatus::kConfirmed;
      } else if (mz < shadow_median) {
        result.status[j] = FeatureStatus::kUnimportant;
      }
    }
  }
  result.ranking = rank_features(result);
  return result;
}

std::vector<std::size_t> rank_features(const BorutaResult& result) {
  const std::size_t m = result.status.size();
  auto group = [](FeatureStatus s) {
    switch (s) {
      case FeatureStatus::kConfirmed: return 0;
      case FeatureStatus::kTentative: return 1;
      case FeatureStatus::kUnimportant: return 2;
    }
    return 2;
  };
  std::vector<double> med(m);
  for (std::size_t j = 0; j < m; ++j) med[j] = result.median_z(j);
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const int ga = group(result.status[a]);
    const int gb = group(result.status[b]);
    if (ga != gb) return ga < gb;
    if (med[a] != med[b]) return med[a] > med[b];
    return a < b;
  });
  return order;
}

std::vector<std::string> ranked_names(const BorutaResult& result) {
  std::vector<std::string> out;
  for (auto j : result.ranking) out.push_back(result.feature_names[j]);
  return out;
}

Json to_json(const BorutaResult& result, const BorutaConfig& config) {
  Json features = Json::array();
  for (std::size_t j = 0; j < result.status.size(); ++j) {
    Json z = Json::array();
    for (const auto& run : result.z_history) {
      z.push_back(std::isnan(run[j]) ? Json(nullptr) : Json(run[j]));
    }
    const double med = result.median_z(j);
    features.push_back({{"name", result.feature_names[j]},
                        {"status", to_string(result.status[j])},
                        {"hits", result.hits[j]},
                        {"runs_present", result.runs_present[j]},
                        {"median_z", std::isfinite(med) ? Json(med) : Json(nullptr)},
                        {"z_history", z}});
  }
  return Json{{"settings",
               {{"max_runs", config.max_runs},
                {"alpha", config.alpha},
                {"seed", config.seed},
                {"num_trees", config.forest.num_trees},
                {"resolve_tentative", config.resolve_tentative}}},
              {"runs", result.runs()},
              {"mzsa_history", result.mzsa_history},
              {"features", features},
              {"ranking", ranked_names(result)}};
}

}  // namespace hierids
