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
#include <vector>

#include "hierids/io.hpp"
#include "hierids/matrix.hpp"

namespace hierids {

struct LogisticParams {
  double learning_rate = 0.5;
  int epochs = 300;
  std::uint64_t seed = 0;
};

// Multinomial logistic regression; weights are classes x features row-major.
struct LogisticModel {
  int num_classes = 0;
  std::size_t num_features = 0;
  std::vector<double> weights;
  std::vector<double> bias;
  // Mean cross-entropy on the training set before each epoch's step.
  std::vector<double> loss_history;

  bool operator==(const LogisticModel&) const = default;
};

struct LogisticGradient {
  double loss = 0.0;
  std::vector<double> weights;
  std::vector<double> bias;
};

// Full-batch gradient descent from zero weights. The applied step is
// min(learning_rate, 1/L) with L an upper bound on the loss curvature, which
// keeps the training loss non-increasing.
LogisticModel fit_logistic(const Matrix& x, std::span<const int> y, int num_classes,
                           const LogisticParams& params);
LogisticGradient logistic_loss_and_gradient(const LogisticModel& model, const Matrix& x,
                                            std::span<const int> y);
ProbMatrix predict_proba(const LogisticModel& model, const Matrix& x);

Json to_json(const LogisticModel& model);
LogisticModel logistic_from_json(const Json& doc);

}  // namespace hierids
