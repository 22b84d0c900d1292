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

#include "hierids/hierarchy.hpp"

#include <chrono>
#include <set>

#include "hierids/errors.hpp"

namespace hierids {

std::string_view to_string(Tier t) {
  switch (t) {
    case Tier::kVehicle: return "vehicle";
    case Tier::kRsu: return "rsu";
    case Tier::kNearEdge: return "near-edge";
  }
  return "vehicle";
}

void HierConfig::validate(std::size_t num_features) const {
  for (int l = 0; l < 3; ++l) {
    const auto& f = levels[l].features;
    if (f.empty()) throw ConfigError("level " + std::to_string(l + 1) + " has no features");
    for (auto j : f) {
      if (j >= num_features) {
        throw ConfigError("level " + std::to_string(l + 1) + " feature index out of range");
      }
    }
  }
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<int> labels_at(const Dataset& ds, std::span<const std::size_t> rows, int level) {
  const auto& h = LabelHierarchy::iov();
  std::vector<int> out;
  out.reserve(rows.size());
  for (auto r : rows) out.push_back(h.coarsen(ds.labels[r], level));
  return out;
}

}  // namespace

HierModel train_hierarchy(const Dataset& ds, const HierConfig& config,
                          std::span<const std::size_t> train_rows) {
  if (train_rows.empty()) throw EmptyInputError("training slice is empty");
  config.validate(ds.num_features());
  const auto& h = LabelHierarchy::iov();

  HierModel model;
  model.feature_names = ds.schema.feature_names;
  model.scaler = identity_scaler(ds.num_features());

  std::set<int> present;
  for (auto r : train_rows) present.insert(ds.labels[r]);
  for (int c = 0; c < h.num_fine(); ++c) {
    if (!present.count(c)) {
      model.warnings.push_back("training slice has no " + h.fine_name(c) + " records");
    }
  }

  const Matrix rows = ds.records.select_rows(train_rows);
  for (int l = 0; l < 3; ++l) {
    const int level = l + 1;
    const auto y = labels_at(ds, train_rows, level);
    if (std::set<int>(y.begin(), y.end()).size() < 2) {
      model.warnings.push_back("level " + std::to_string(level) +
                               " sees a single class; its model is a single leaf");
    }
    model.features[l] = config.levels[l].features;
    model.models[l] = fit_model(config.levels[l].learner, rows.select_cols(model.features[l]), y,
                                h.num_classes(level));
  }
  return model;
}

namespace {

// level2 / level3 hold exactly the levels that were run.
void finish_decision(RoutedDecision& d, RoutingMode mode) {
  const auto& h = LabelHierarchy::iov();
  d.trace = {Tier::kVehicle};
  d.final_label = kBenign;
  if (d.level1 == 1) {
    d.trace.push_back(Tier::kRsu);
    if (*d.level2 == 1) {
      d.final_label = kDos;
    } else if (*d.level2 == 2) {
      d.trace.push_back(Tier::kNearEdge);
      d.final_label = *d.level3;
    }
  }
  if (mode == RoutingMode::kFullCascade) d.trace = {Tier::kVehicle, Tier::kRsu, Tier::kNearEdge};
  d.consistent = !(d.level2 && d.level3) || h.coarsen(*d.level3, 2) == *d.level2;
}

void check_record_width(const HierModel& model, std::size_t width) {
  for (const auto& f : model.features) {
    for (auto j : f) {
      if (j >= width) {
        throw DimensionError("record has " + std::to_string(width) +
                             " features, model needs index " + std::to_string(j));
      }
    }
  }
}

}  // namespace

std::vector<RoutedDecision> predict_routed(const HierModel& model, const Matrix& records,
                                           RoutingMode mode) {
  check_record_width(model, records.cols());
  const std::size_t n = records.rows();
  std::vector<RoutedDecision> out(n);

  auto run_level = [&](int l, const std::vector<std::size_t>& rows) {
    if (rows.empty()) return std::vector<int>{};
    return predict(model.models[l], records.select_rows(rows).select_cols(model.features[l]));
  };

  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  const auto l1 = run_level(0, all);
  std::vector<std::size_t> to_l2;
  for (std::size_t i = 0; i < n; ++i) {
    out[i].level1 = l1[i];
    if (mode == RoutingMode::kFullCascade || l1[i] == 1) to_l2.push_back(i);
  }
  const auto l2 = run_level(1, to_l2);
  std::vector<std::size_t> to_l3;
  for (std::size_t i = 0; i < to_l2.size(); ++i) {
    const auto r = to_l2[i];
    out[r].level2 = l2[i];
    if (mode == RoutingMode::kFullCascade || (out[r].level1 == 1 && l2[i] == 2)) {
      to_l3.push_back(r);
    }
  }
  const auto l3 = run_level(2, to_l3);
  for (std::size_t i = 0; i < to_l3.size(); ++i) out[to_l3[i]].level3 = l3[i];
  for (auto& d : out) finish_decision(d, mode);
  return out;
}

RoutedDecision predict_routed(const HierModel& model, std::span<const float> record,
                              RoutingMode mode) {
  Matrix one(1, record.size(), std::vector<float>(record.begin(), record.end()));
  return predict_routed(model, one, mode).front();
}

HierEvaluation evaluate_hierarchy(const Dataset& ds, const HierConfig& config,
                                  const FoldAssignment& folds) {
  if (folds.k < 2) throw ConfigError("evaluation needs at least two folds");
  if (folds.fold_of.size() != ds.size()) throw DimensionError("fold map does not match dataset");
  config.validate(ds.num_features());
  const auto& h = LabelHierarchy::iov();

  HierEvaluation eval;
  eval.timing.setting = "hierarchical";
  eval.timing.train_seconds.assign(3, 0.0);
  std::vector<MetricTable> routed_tables;
  std::array<std::vector<MetricTable>, 3> level_tables;

  for (int f = 0; f < folds.k; ++f) {
    const auto train = folds.train_indices(f);
    const auto test = folds.test_indices(f);
    if (test.empty()) continue;

    // Train each level separately to time it.
    HierModel model;
    model.feature_names = ds.schema.feature_names;
    model.scaler = identity_scaler(ds.num_features());
    const Matrix train_x = ds.records.select_rows(train);
    for (int l = 0; l < 3; ++l) {
      const auto y = labels_at(ds, train, l + 1);
      model.features[l] = config.levels[l].features;
      const Matrix xl = train_x.select_cols(model.features[l]);
      const auto start = Clock::now();
      model.models[l] = fit_model(config.levels[l].learner, xl, y, h.num_classes(l + 1));
      eval.timing.train_seconds[l] += seconds_since(start);
    }

    const Matrix test_x = ds.records.select_rows(test);
    std::array<MetricTable, 3> fold_tables;
    for (int l = 0; l < 3; ++l) {
      const auto pred = predict(model.models[l], test_x.select_cols(model.features[l]));
      fold_tables[l] =
          metric_table(confusion(labels_at(ds, test, l + 1), pred, h.class_names(l + 1)));
      level_tables[l].push_back(fold_tables[l]);
    }
    eval.per_fold.push_back(fold_tables);

    const auto start = Clock::now();
    const auto decisions = predict_routed(model, test_x, config.mode);
    eval.timing.test_total += seconds_since(start);
    eval.timing.test_instances += test.size();

    std::vector<int> final_pred;
    for (const auto& d : decisions) {
      final_pred.push_back(d.final_label);
      if (d.level3 && d.level2 && *d.level2 == 2) {
        ++eval.routed_to_level3;
        if (!d.consistent) ++eval.disagreements;
      }
    }
    routed_tables.push_back(
        metric_table(confusion(labels_at(ds, test, 3), final_pred, h.class_names(3))));
  }
  for (int l = 0; l < 3; ++l) eval.levels[l] = cv_aggregate(level_tables[l]);
  eval.routed = cv_aggregate(routed_tables);
  eval.disagreement_rate =
      eval.routed_to_level3 ? static_cast<double>(eval.disagreements) / eval.routed_to_level3 : 0.0;
  for (double s : eval.timing.train_seconds) eval.timing.train_total += s;
  eval.timing.test_per_instance =
      eval.timing.test_instances ? eval.timing.test_total / eval.timing.test_instances : 0.0;
  return eval;
}

FlatEvaluation flat_baseline(const Dataset& ds, const LearnerSpec& learner,
                             std::span<const std::size_t> features, const FoldAssignment& folds) {
  if (folds.k < 2) throw ConfigError("evaluation needs at least two folds");
  if (features.empty()) throw ConfigError("flat baseline needs at least one feature");
  const auto& h = LabelHierarchy::iov();
  FlatEvaluation eval;
  eval.timing.setting = "flat";
  eval.timing.train_seconds.assign(1, 0.0);
  const Matrix x = ds.records.select_cols(features);
  for (int f = 0; f < folds.k; ++f) {
    const auto train = folds.train_indices(f);
    const auto test = folds.test_indices(f);
    if (test.empty()) continue;
    const auto y = labels_at(ds, train, 3);
    const Matrix train_x = x.select_rows(train);
    auto start = Clock::now();
    const Model model = fit_model(learner, train_x, y, h.num_fine());
    eval.timing.train_seconds[0] += seconds_since(start);
    const Matrix test_x = x.select_rows(test);
    start = Clock::now();
    const auto pred = predict(model, test_x);
    eval.timing.test_total += seconds_since(start);
    eval.timing.test_instances += test.size();
    eval.per_fold.push_back(metric_table(confusion(labels_at(ds, test, 3), pred, h.class_names(3))));
  }
  eval.table = cv_aggregate(eval.per_fold);
  eval.timing.train_total = eval.timing.train_seconds[0];
  eval.timing.test_per_instance =
      eval.timing.test_instances ? eval.timing.test_total / eval.timing.test_instances : 0.0;
  return eval;
}

Json to_json(const HierConfig& config, std::span<const std::string> feature_names) {
  Json levels = Json::array();
  for (int l = 0; l < 3; ++l) {
    Json names = Json::array();
    for (auto j : config.levels[l].features) {
      names.push_back(j < feature_names.size() ? feature_names[j] : std::to_string(j));
    }
    levels.push_back({{"level", l + 1},
                      {"learner", to_json(config.levels[l].learner)},
                      {"features", names}});
  }
  return Json{{"mode", config.mode == RoutingMode::kRouted ? "routed" : "full-cascade"},
              {"levels", levels}};
}

Json to_json(const TimingReport& t) {
  return Json{{"setting", t.setting},
              {"train_seconds", t.train_seconds},
              {"train_total", t.train_total},
              {"test_total", t.test_total},
              {"test_per_instance", t.test_per_instance},
              {"test_instances", t.test_instances}};
}

Json to_json(const HierEvaluation& eval) {
  Json levels = Json::array();
  for (int l = 0; l < 3; ++l) levels.push_back({{"level", l + 1}, {"metrics", to_json(eval.levels[l])}});
  return Json{{"levels", levels},
              {"routed", to_json(eval.routed)},
              {"routed_to_level3", eval.routed_to_level3},
              {"disagreements", eval.disagreements},
              {"disagreement_rate", eval.disagreement_rate},
              {"warnings", eval.warnings}};
}

Json hier_model_to_json(const HierModel& model) {
  Json levels = Json::array();
  for (int l = 0; l < 3; ++l) {
    levels.push_back({{"level", l + 1},
                      {"features", model.features[l]},
                      {"model", model_to_json(model.models[l])}});
  }
  return Json{{"format_version", kModelFormatVersion},
              {"feature_names", model.feature_names},
              {"scaler", {{"x_min", model.scaler.x_min}, {"x_max", model.scaler.x_max}}},
              {"levels", levels},
              {"warnings", model.warnings}};
}

HierModel hier_model_from_json(const Json& doc) {
  if (doc.value("format_version", 0) != kModelFormatVersion) {
    throw SchemaError("unsupported model bundle version");
  }
  HierModel model;
  model.feature_names = doc.at("feature_names").get<std::vector<std::string>>();
  model.scaler.x_min = doc.at("scaler").at("x_min").get<std::vector<double>>();
  model.scaler.x_max = doc.at("scaler").at("x_max").get<std::vector<double>>();
  const auto& levels = doc.at("levels");
  if (levels.size() != 3) throw SchemaError("model bundle needs three levels");
  const auto& h = LabelHierarchy::iov();
  for (int l = 0; l < 3; ++l) {
    model.features[l] = levels[l].at("features").get<std::vector<std::size_t>>();
    model.models[l] = model_from_json(levels[l].at("model"));
    if (num_classes(model.models[l]) != h.num_classes(l + 1)) {
      throw SchemaError("level " + std::to_string(l + 1) + " model has the wrong class count");
    }
  }
  if (doc.contains("warnings")) model.warnings = doc.at("warnings").get<std::vector<std::string>>();
  return model;
}

}  // namespace hierids
