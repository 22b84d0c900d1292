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

#include "hierids/attribution.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>

#include "hierids/dataset.hpp"
#include "hierids/errors.hpp"
#include "hierids/metrics.hpp"

namespace hierids {

PathAttribution path_contributions(const ForestModel& model, std::span<const float> record) {
  if (record.size() != model.num_features) {
    throw DimensionError("record has " + std::to_string(record.size()) +
                         " features, model expects " + std::to_string(model.num_features));
  }
  const int k = model.num_classes;
  PathAttribution out;
  out.bias.assign(k, 0.0);
  out.contributions = ProbMatrix(model.num_features, k);
  for (const auto& tree : model.trees) {
    const auto& nodes = tree.nodes();
    int n = 0;
    auto root = tree.distribution(0);
    for (int c = 0; c < k; ++c) out.bias[c] += root[c];
    while (!nodes[n].is_leaf()) {
      const auto& node = nodes[n];
      const int next = static_cast<double>(record[node.feature]) <= node.threshold ? node.left
                                                                                   : node.right;
      auto before = tree.distribution(n);
      auto after = tree.distribution(next);
      auto dst = out.contributions.row(node.feature);
      for (int c = 0; c < k; ++c) dst[c] += after[c] - before[c];
      n = next;
    }
  }
  const double inv = 1.0 / static_cast<double>(model.trees.size());
  for (auto& v : out.bias) v *= inv;
  for (auto& v : out.contributions.data()) v *= inv;
  return out;
}

AttributionReport attribution_report(const ForestModel& model, const Matrix& eval,
                                     int target_class, std::vector<std::string> feature_names,
                                     std::vector<std::string> class_names) {
  if (eval.rows() == 0) throw EmptyInputError("attribution needs a non-empty evaluation set");
  if (target_class < 0 || target_class >= model.num_classes) {
    throw ConfigError("target class out of range");
  }
  const std::size_t m = model.num_features;
  const int k = model.num_classes;
  if (feature_names.empty()) {
    for (std::size_t j = 0; j < m; ++j) feature_names.push_back("F" + std::to_string(j));
  }
  if (class_names.empty()) {
    for (int c = 0; c < k; ++c) class_names.push_back(std::to_string(c));
  }
  AttributionReport report;
  report.feature_names = std::move(feature_names);
  report.class_names = std::move(class_names);
  report.target_class = target_class;
  report.mean_signed = ProbMatrix(m, k);
  report.mean_absolute = ProbMatrix(m, k);
  report.mean_directional = ProbMatrix(m, k);

  const long rows = static_cast<long>(eval.rows());
  std::vector<PathAttribution> per_row(eval.rows());
#pragma omp parallel for schedule(static)
  for (long r = 0; r < rows; ++r) per_row[r] = path_contributions(model, eval.row(r));
  for (std::size_t r = 0; r < per_row.size(); ++r) {
    const auto& contrib = per_row[r].contributions;
    for (std::size_t j = 0; j < m; ++j) {
      const double direction = 2.0 * static_cast<double>(eval(r, j)) - 1.0;
      for (int c = 0; c < k; ++c) {
        const double v = contrib(j, c);
        report.mean_signed(j, c) += v;
        report.mean_absolute(j, c) += std::abs(v);
        report.mean_directional(j, c) += direction * v;
      }
    }
  }
  const double inv = 1.0 / static_cast<double>(eval.rows());
  for (auto& v : report.mean_signed.data()) v *= inv;
  for (auto& v : report.mean_absolute.data()) v *= inv;
  for (auto& v : report.mean_directional.data()) v *= inv;

  report.score.assign(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    for (int c = 0; c < k; ++c) report.score[j] += report.mean_absolute(j, c);
    report.score[j] /= k;
    if (report.mean_directional(j, target_class) < 0.0) report.flagged_negative.push_back(j);
  }
  return report;
}

namespace {

struct CvScore {
  double weighted_f1 = 0.0;
  double macro_f1 = 0.0;
};

CvScore cv_score(const Matrix& x, std::span<const int> labels, int num_classes,
                 const FoldAssignment& folds, std::span<const std::size_t> features,
                 const ForestParams& params, const std::vector<std::string>& class_names) {
  const Matrix sub = x.select_cols(features);
  std::vector<MetricTable> tables;
  for (int f = 0; f < folds.k; ++f) {
    const auto train = folds.train_indices(f);
    const auto test = folds.test_indices(f);
    std::vector<int> ytr;
    std::vector<int> yte;
    for (auto i : train) ytr.push_back(labels[i]);
    for (auto i : test) yte.push_back(labels[i]);
    ForestParams p = params;
    p.seed = derive_seed(params.seed, "subset_search_fold", {static_cast<std::uint64_t>(f)});
    const auto model = fit_forest(sub.select_rows(train), ytr, num_classes, p);
    const auto pred = argmax_rows(predict_proba(model, sub.select_rows(test)));
    tables.push_back(metric_table(confusion(yte, pred, class_names)));
  }
  const auto agg = cv_aggregate(tables);
  return {agg.weighted.f1, agg.macro.f1};
}

}  // namespace

SubsetSearchResult guided_subset_search(std::span<const std::size_t> ranking, const Matrix& x,
                                        std::span<const int> fine_labels, int level,
                                        std::size_t budget, int cv_k,
                                        const SubsetSearchConfig& config) {
  if (budget == 0) throw ConfigError("subset search budget must be at least 1");
  if (ranking.empty()) throw ConfigError("subset search needs a non-empty ranking");
  if (budget > ranking.size()) throw ConfigError("budget exceeds the ranking length");
  if (config.patience < 1) throw ConfigError("patience must be at least 1");
  for (auto f : ranking) {
    if (f >= x.cols()) throw DimensionError("ranked feature index out of range");
  }
  const auto& h = LabelHierarchy::iov();
  const auto labels = coarsen_labels(fine_labels, h, level);
  const int k = h.num_classes(level);
  const auto folds = stratified_folds(labels, cv_k, derive_seed(config.seed, "subset_search"));

  std::set<std::size_t> flagged(config.flagged_negative.begin(), config.flagged_negative.end());
  std::vector<std::size_t> order;
  for (auto f : ranking) {
    if (!flagged.count(f)) order.push_back(f);
  }
  for (auto f : ranking) {
    if (flagged.count(f)) order.push_back(f);
  }

  SubsetSearchResult result;
  const double target = 100.0 - config.target_slack;
  double best = -std::numeric_limits<double>::infinity();
  std::vector<std::size_t> pending;
  bool probing = false;

  auto evaluate = [&](const std::vector<std::size_t>& cand) {
    ForestParams p = config.forest;
    p.seed = derive_seed(config.seed, "subset_search_forest");
    const auto s = cv_score(x, labels, k, folds, cand, p, h.class_names(level));
    SearchEvaluation e;
    e.features = cand;
    e.weighted_f1 = s.weighted_f1;
    e.macro_f1 = s.macro_f1;
    return e;
  };

  for (auto f : order) {
    if (result.reached_target) break;
    std::vector<std::size_t> cand = result.selected;
    if (!probing) cand.insert(cand.end(), pending.begin(), pending.end());
    cand.push_back(f);
    if (cand.size() > budget) break;

    auto e = evaluate(cand);
    if (e.weighted_f1 >= best + config.epsilon || result.trace.empty()) {
      e.accepted = true;
      best = e.weighted_f1;
      result.selected = cand;
      pending.clear();
    } else if (probing) {
      result.skipped.push_back(f);
    } else {
      pending.push_back(f);
      if (static_cast<int>(pending.size()) >= config.patience) {
        result.skipped.insert(result.skipped.end(), pending.begin(), pending.end());
        pending.clear();
        probing = true;
      }
    }
    e.best_so_far = best;
    result.trace.push_back(std::move(e));
    if (best >= target) result.reached_target = true;
  }
  result.skipped.insert(result.skipped.end(), pending.begin(), pending.end());
  result.best_weighted_f1 = best;
  return result;
}

Json to_json(const AttributionReport& report) {
  Json features = Json::array();
  for (std::size_t j = 0; j < report.feature_names.size(); ++j) {
    Json per_class = Json::object();
    for (std::size_t c = 0; c < report.class_names.size(); ++c) {
      per_class[report.class_names[c]] = {{"mean_signed", report.mean_signed(j, c)},
                                          {"mean_absolute", report.mean_absolute(j, c)},
                                          {"mean_directional", report.mean_directional(j, c)}};
    }
    features.push_back({{"name", report.feature_names[j]},
                        {"score", report.score[j]},
                        {"per_class", per_class}});
  }
  Json flagged = Json::array();
  for (auto j : report.flagged_negative) flagged.push_back(report.feature_names[j]);
  return Json{{"method", "path attribution"},
              {"target_class", report.class_names[report.target_class]},
              {"features", features},
              {"flagged_negative", flagged}};
}

namespace {

std::vector<std::string> names_of(std::span<const std::size_t> idx,
                                  std::span<const std::string> names) {
  std::vector<std::string> out;
  for (auto i : idx) out.push_back(i < names.size() ? names[i] : "F" + std::to_string(i));
  return out;
}

}  // namespace

Json to_json(const SubsetSearchResult& result, std::span<const std::string> feature_names) {
  Json trace = Json::array();
  for (const auto& e : result.trace) {
    trace.push_back({{"features", names_of(e.features, feature_names)},
                     {"weighted_f1", e.weighted_f1},
                     {"macro_f1", e.macro_f1},
                     {"best_so_far", e.best_so_far},
                     {"accepted", e.accepted}});
  }
  return Json{{"selected", names_of(result.selected, feature_names)},
              {"skipped", names_of(result.skipped, feature_names)},
              {"best_weighted_f1", result.best_weighted_f1},
              {"reached_target", result.reached_target},
              {"trace", trace}};
}

std::string trace_csv(const SubsetSearchResult& result, std::span<const std::string> feature_names) {
  std::string out = "set_size,features,weighted_f1,macro_f1\n";
  char buf[64];
  for (const auto& e : result.trace) {
    std::string joined;
    for (const auto& n : names_of(e.features, feature_names)) {
      if (!joined.empty()) joined += ';';
      joined += n;
    }
    std::snprintf(buf, sizeof(buf), ",%.6f,%.6f\n", e.weighted_f1, e.macro_f1);
    out += std::to_string(e.features.size()) + "," + csv_escape(joined) + buf;
  }
  return out;
}

}  // namespace hierids
