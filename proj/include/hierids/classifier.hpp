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
#include <string_view>
#include <variant>
#include <vector>

#include "hierids/forest.hpp"
#include "hierids/io.hpp"
#include "hierids/logistic.hpp"
#include "hierids/matrix.hpp"

namespace hierids {

enum class LearnerKind { kForest, kExtraTrees, kTree, kLogistic };

std::string_view to_string(LearnerKind kind);
LearnerKind parse_learner_kind(std::string_view name);

struct LearnerSpec {
  LearnerKind kind = LearnerKind::kForest;
  ForestParams forest;
  LogisticParams logistic;

  // Forest parameters after applying the kind's preset.
  ForestParams effective_forest() const;
};

using Model = std::variant<ForestModel, LogisticModel>;

Model fit_model(const LearnerSpec& spec, const Matrix& x, std::span<const int> y,
                int num_classes);
ProbMatrix predict_proba(const Model& model, const Matrix& x);
std::vector<int> predict(const Model& model, const Matrix& x);
int num_classes(const Model& model);
std::size_t num_features(const Model& model);

Json to_json(const LearnerSpec& spec);
LearnerSpec learner_spec_from_json(const Json& doc);

inline constexpr int kModelFormatVersion = 1;
// Versioned model document; forests omit bootstrap indices unless asked.
Json model_to_json(const Model& model, bool include_bootstrap = false);
Model model_from_json(const Json& doc);

struct ComplexityEstimate {
  std::uint64_t train_ops = 0;
  std::uint64_t predict_ops_per_record = 0;
};

struct LevelCost {
  std::uint64_t trees = 0;
  std::uint64_t training_rows = 0;
};

// T * M * N * ceil(log2 N) to train; sum_i T_i * ceil(log2 N_i) * M to push a
// record through a cascade of forests.
std::uint64_t ceil_log2(std::uint64_t n);
ComplexityEstimate complexity_estimate(std::uint64_t trees, std::uint64_t features,
                                       std::uint64_t rows, std::uint64_t depth);
std::uint64_t cascade_predict_ops(std::span<const LevelCost> levels, std::uint64_t features);

}  // namespace hierids
