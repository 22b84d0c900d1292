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

#include "hierids/logistic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hierids/errors.hpp"

namespace hierids {

namespace {

void softmax_row(const LogisticModel& model, std::span<const float> x, std::span<double> out) {
  const std::size_t m = model.num_features;
  double zmax = -std::numeric_limits<double>::infinity();
  for (int c = 0; c < model.num_classes; ++c) {
    double z = model.bias[c];
    const double* w = model.weights.data() + c * m;
    for (std::size_t j = 0; j < m; ++j) z += w[j] * static_cast<double>(x[j]);
    out[c] = z;
    zmax = std::max(zmax, z);
  }
  double sum = 0.0;
  for (auto& v : out) {
    v = std::exp(v - zmax);
    sum += v;
  }
  for (auto& v : out) v /= sum;
}

}  // namespace

LogisticGradient logistic_loss_and_gradient(const LogisticModel& model, const Matrix& x,
                                            std::span<const int> y) {
  const std::size_t m = model.num_features;
  const int k = model.num_classes;
  LogisticGradient g;
  g.weights.assign(model.weights.size(), 0.0);
  g.bias.assign(k, 0.0);
  std::vector<double> p(k);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    auto row = x.row(r);
    softmax_row(model, row, p);
    g.loss -= std::log(std::max(p[y[r]], std::numeric_limits<double>::min()));
    for (int c = 0; c < k; ++c) {
      const double d = p[c] - (c == y[r] ? 1.0 : 0.0);
      g.bias[c] += d;
      double* gw = g.weights.data() + c * m;
      for (std::size_t j = 0; j < m; ++j) gw[j] += d * static_cast<double>(row[j]);
    }
  }
  const double inv = 1.0 / static_cast<double>(x.rows());
  g.loss *= inv;
  for (auto& v : g.weights) v *= inv;
  for (auto& v : g.bias) v *= inv;
  return g;
}

LogisticModel fit_logistic(const Matrix& x, std::span<const int> y, int num_classes,
                           const LogisticParams& params) {
  if (x.rows() == 0) throw EmptyInputError("cannot fit logistic regression on zero rows");
  if (y.size() != x.rows()) throw DimensionError("label count does not match row count");
  if (params.epochs < 0) throw ConfigError("epochs must be non-negative");
  for (int l : y) {
    if (l < 0 || l >= num_classes) throw SchemaError("label outside [0, num_classes)");
  }
  LogisticModel model;
  model.num_classes = num_classes;
  model.num_features = x.cols();
  model.weights.assign(static_cast<std::size_t>(num_classes) * x.cols(), 0.0);
  model.bias.assign(num_classes, 0.0);

  // Softmax cross-entropy has Hessian <= 0.5 * E[x x^T] (with the bias
  // column), whose largest eigenvalue is at most the mean squared norm.
  double mean_sq = 0.0;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    double s = 1.0;
    for (float v : x.row(r)) s += static_cast<double>(v) * v;
    mean_sq += s;
  }
  mean_sq /= static_cast<double>(x.rows());
  const double curvature = 0.5 * mean_sq;
  const double step = std::min(params.learning_rate, 1.0 / curvature);

  for (int e = 0; e < params.epochs; ++e) {
    auto g = logistic_loss_and_gradient(model, x, y);
    if (!std::isfinite(g.loss)) {
      std::ostringstream msg;
      msg << "logistic loss became non-finite with learning rate " << params.learning_rate;
      throw DivergenceError(msg.str());
    }
    model.loss_history.push_back(g.loss);
    for (std::size_t i = 0; i < model.weights.size(); ++i) model.weights[i] -= step * g.weights[i];
    for (int c = 0; c < num_classes; ++c) model.bias[c] -= step * g.bias[c];
  }
  for (double w : model.weights) {
    if (!std::isfinite(w)) {
      throw DivergenceError("logistic weights became non-finite with learning rate " +
                            std::to_string(params.learning_rate));
    }
  }
  return model;
}

ProbMatrix predict_proba(const LogisticModel& model, const Matrix& x) {
  if (x.cols() != model.num_features) {
    throw DimensionError("model expects " + std::to_string(model.num_features) +
                         " features, got " + std::to_string(x.cols()));
  }
  ProbMatrix out(x.rows(), model.num_classes);
  for (std::size_t r = 0; r < x.rows(); ++r) softmax_row(model, x.row(r), out.row(r));
  return out;
}

Json to_json(const LogisticModel& model) {
  return Json{{"num_classes", model.num_classes},
              {"num_features", model.num_features},
              {"weights", model.weights},
              {"bias", model.bias},
              {"loss_history", model.loss_history}};
}

LogisticModel logistic_from_json(const Json& doc) {
  LogisticModel m;
  m.num_classes = doc.at("num_classes").get<int>();
  m.num_features = doc.at("num_features").get<std::size_t>();
  m.weights = doc.at("weights").get<std::vector<double>>();
  m.bias = doc.at("bias").get<std::vector<double>>();
  if (doc.contains("loss_history")) {
    m.loss_history = doc.at("loss_history").get<std::vector<double>>();
  }
  if (m.weights.size() != static_cast<std::size_t>(m.num_classes) * m.num_features ||
      m.bias.size() != static_cast<std::size_t>(m.num_classes)) {
    throw SchemaError("logistic model dimensions do not match");
  }
  return m;
}

}  // namespace hierids
