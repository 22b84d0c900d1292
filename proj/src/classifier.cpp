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

#include "hierids/classifier.hpp"

#include <bit>

#include "hierids/errors.hpp"

namespace hierids {

std::string_view to_string(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::kForest: return "forest";
    case LearnerKind::kExtraTrees: return "extra-trees";
    case LearnerKind::kTree: return "tree";
    case LearnerKind::kLogistic: return "logistic";
  }
  return "forest";
}

LearnerKind parse_learner_kind(std::string_view name) {
  if (name == "forest" || name == "rf") return LearnerKind::kForest;
  if (name == "extra-trees" || name == "et") return LearnerKind::kExtraTrees;
  if (name == "tree" || name == "dt") return LearnerKind::kTree;
  if (name == "logistic" || name == "lr") return LearnerKind::kLogistic;
  throw ConfigError("unknown learner kind: " + std::string(name));
}

ForestParams LearnerSpec::effective_forest() const {
  ForestParams p = forest;
  switch (kind) {
    case LearnerKind::kTree: {
      auto preset = ForestParams::decision_tree(forest.seed);
      preset.max_depth = forest.max_depth;
      preset.min_leaf = forest.min_leaf;
      return preset;
    }
    case LearnerKind::kExtraTrees:
      p.bootstrap = false;
      p.random_thresholds = true;
      return p;
    default:
      return p;
  }
}

Model fit_model(const LearnerSpec& spec, const Matrix& x, std::span<const int> y,
                int num_classes) {
  if (spec.kind == LearnerKind::kLogistic) return fit_logistic(x, y, num_classes, spec.logistic);
  return fit_forest(x, y, num_classes, spec.effective_forest());
}

ProbMatrix predict_proba(const Model& model, const Matrix& x) {
  return std::visit([&](const auto& m) { return predict_proba(m, x); }, model);
}

std::vector<int> predict(const Model& model, const Matrix& x) {
  return argmax_rows(predict_proba(model, x));
}

int num_classes(const Model& model) {
  return std::visit([](const auto& m) { return m.num_classes; }, model);
}

std::size_t num_features(const Model& model) {
  return std::visit([](const auto& m) { return m.num_features; }, model);
}

Json to_json(const LearnerSpec& spec) {
  const auto f = spec.effective_forest();
  Json forest{{"num_trees", f.num_trees},
              {"max_depth", f.max_depth == kUnlimitedDepth ? Json(nullptr) : Json(f.max_depth)},
              {"min_leaf", f.min_leaf},
              {"features_per_split",
               f.features_per_split ? Json(*f.features_per_split) : Json(nullptr)},
              {"bootstrap", f.bootstrap},
              {"random_thresholds", f.random_thresholds},
              {"seed", f.seed}};
  Json logistic{{"learning_rate", spec.logistic.learning_rate},
                {"epochs", spec.logistic.epochs},
                {"seed", spec.logistic.seed}};
  return Json{{"kind", to_string(spec.kind)}, {"forest", forest}, {"logistic", logistic}};
}

LearnerSpec learner_spec_from_json(const Json& doc) {
  LearnerSpec spec;
  if (doc.contains("kind")) spec.kind = parse_learner_kind(doc.at("kind").get<std::string>());
  if (doc.contains("forest")) {
    const auto& f = doc.at("forest");
    auto& p = spec.forest;
    if (f.contains("num_trees")) p.num_trees = f.at("num_trees").get<int>();
    if (f.contains("max_depth") && !f.at("max_depth").is_null()) {
      p.max_depth = f.at("max_depth").get<int>();
    }
    if (f.contains("min_leaf")) p.min_leaf = f.at("min_leaf").get<std::size_t>();
    if (f.contains("features_per_split") && !f.at("features_per_split").is_null()) {
      p.features_per_split = f.at("features_per_split").get<std::size_t>();
    }
    if (f.contains("bootstrap")) p.bootstrap = f.at("bootstrap").get<bool>();
    if (f.contains("random_thresholds")) p.random_thresholds = f.at("random_thresholds").get<bool>();
    if (f.contains("seed")) p.seed = f.at("seed").get<std::uint64_t>();
  }
  if (doc.contains("logistic")) {
    const auto& l = doc.at("logistic");
    if (l.contains("learning_rate")) spec.logistic.learning_rate = l.at("learning_rate").get<double>();
    if (l.contains("epochs")) spec.logistic.epochs = l.at("epochs").get<int>();
    if (l.contains("seed")) spec.logistic.seed = l.at("seed").get<std::uint64_t>();
  }
  return spec;
}

Json model_to_json(const Model& model, bool include_bootstrap) {
  if (const auto* f = std::get_if<ForestModel>(&model)) {
    return Json{{"format_version", kModelFormatVersion},
                {"type", "forest"},
                {"model", to_json(*f, include_bootstrap)}};
  }
  return Json{{"format_version", kModelFormatVersion},
              {"type", "logistic"},
              {"model", to_json(std::get<LogisticModel>(model))}};
}

Model model_from_json(const Json& doc) {
  if (doc.value("format_version", 0) != kModelFormatVersion) {
    throw SchemaError("unsupported model format version");
  }
  const auto type = doc.at("type").get<std::string>();
  if (type == "forest") return forest_from_json(doc.at("model"));
  if (type == "logistic") return logistic_from_json(doc.at("model"));
  throw SchemaError("unknown model type: " + type);
}

std::uint64_t ceil_log2(std::uint64_t n) {
  if (n <= 1) return 0;
  return static_cast<std::uint64_t>(std::bit_width(n - 1));
}

ComplexityEstimate complexity_estimate(std::uint64_t trees, std::uint64_t features,
                                       std::uint64_t rows, std::uint64_t depth) {
  ComplexityEstimate e;
  e.train_ops = trees * features * rows * ceil_log2(rows);
  // Per record: every tree is traversed to the given depth, each node touching
  // the feature vector.
  e.predict_ops_per_record = trees * depth * features;
  return e;
}

std::uint64_t cascade_predict_ops(std::span<const LevelCost> levels, std::uint64_t features) {
  std::uint64_t sum = 0;
  for (const auto& l : levels) sum += l.trees * ceil_log2(l.training_rows);
  return sum * features;
}

}  // namespace hierids
