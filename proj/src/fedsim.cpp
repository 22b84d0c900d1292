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

#include "hierids/fedsim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>

#include "hierids/dataset.hpp"
#include "hierids/errors.hpp"
#include "hierids/forest.hpp"

namespace hierids {

std::size_t mlp_param_count(std::span<const std::size_t> layer_sizes) {
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    n += layer_sizes[l + 1] * layer_sizes[l] + layer_sizes[l + 1];
  }
  return n;
}

std::size_t MLPModel::weight_offset(std::size_t layer) const {
  std::size_t off = 0;
  for (std::size_t l = 0; l < layer; ++l) {
    off += layer_sizes[l + 1] * layer_sizes[l] + layer_sizes[l + 1];
  }
  return off;
}

std::size_t MLPModel::bias_offset(std::size_t layer) const {
  return weight_offset(layer) + layer_sizes[layer + 1] * layer_sizes[layer];
}

MLPModel init_mlp(std::vector<std::size_t> layer_sizes, double dropout, std::uint64_t seed) {
  if (layer_sizes.size() < 2) throw ConfigError("an MLP needs input and output layers");
  for (auto s : layer_sizes) {
    if (s == 0) throw ConfigError("layer sizes must be positive");
  }
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("dropout must lie in [0, 1)");
  MLPModel model;
  model.layer_sizes = std::move(layer_sizes);
  model.dropout = dropout;
  model.params.assign(mlp_param_count(model.layer_sizes), 0.0);
  Rng rng = make_rng(seed, "init_mlp");
  for (std::size_t l = 0; l < model.num_layers(); ++l) {
    const double fan_in = static_cast<double>(model.layer_sizes[l]);
    const double fan_out = static_cast<double>(model.layer_sizes[l + 1]);
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> u(-limit, limit);
    const std::size_t w = model.weight_offset(l);
    for (std::size_t i = 0; i < model.layer_sizes[l + 1] * model.layer_sizes[l]; ++i) {
      model.params[w + i] = u(rng);
    }
  }
  return model;
}

namespace {

// Activations for one record; acts[0] is the input.
struct ForwardPass {
  std::vector<std::vector<double>> acts;
  std::vector<std::vector<double>> masks;  // dropout scale per hidden unit
};

void forward(const MLPModel& model, std::span<const float> input, Rng* dropout_rng,
             ForwardPass& pass) {
  const std::size_t layers = model.num_layers();
  pass.acts.resize(layers + 1);
  pass.masks.resize(layers);
  pass.acts[0].assign(input.begin(), input.end());
  std::bernoulli_distribution keep(1.0 - model.dropout);
  const double scale = 1.0 / (1.0 - model.dropout);
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t in = model.layer_sizes[l];
    const std::size_t out = model.layer_sizes[l + 1];
    const double* w = model.params.data() + model.weight_offset(l);
    const double* b = model.params.data() + model.bias_offset(l);
    auto& z = pass.acts[l + 1];
    z.assign(out, 0.0);
    const auto& prev = pass.acts[l];
    for (std::size_t o = 0; o < out; ++o) {
      double s = b[o];
      for (std::size_t i = 0; i < in; ++i) s += w[o * in + i] * prev[i];
      z[o] = s;
    }
    if (l + 1 < layers) {
      auto& mask = pass.masks[l];
      mask.assign(out, 1.0);
      for (std::size_t o = 0; o < out; ++o) {
        if (dropout_rng && model.dropout > 0.0) mask[o] = keep(*dropout_rng) ? scale : 0.0;
        z[o] = std::max(z[o], 0.0) * mask[o];
      }
    } else {
      const double zmax = *std::max_element(z.begin(), z.end());
      double sum = 0.0;
      for (auto& v : z) {
        v = std::exp(v - zmax);
        sum += v;
      }
      for (auto& v : z) v /= sum;
    }
  }
}

}  // namespace

MLPGradient mlp_loss_and_gradient(const MLPModel& model, const Matrix& x,
                                  std::span<const int> y, std::span<const std::size_t> rows,
                                  Rng* dropout_rng) {
  const std::size_t layers = model.num_layers();
  MLPGradient g;
  g.grad.assign(model.params.size(), 0.0);
  ForwardPass pass;
  std::vector<double> delta;
  std::vector<double> prev_delta;
  for (auto r : rows) {
    forward(model, x.row(r), dropout_rng, pass);
    const auto& out = pass.acts[layers];
    g.loss -= std::log(std::max(out[y[r]], std::numeric_limits<double>::min()));
    delta = out;
    delta[y[r]] -= 1.0;
    for (std::size_t l = layers; l-- > 0;) {
      const std::size_t in = model.layer_sizes[l];
      const std::size_t outn = model.layer_sizes[l + 1];
      const auto& a = pass.acts[l];
      double* gw = g.grad.data() + model.weight_offset(l);
      double* gb = g.grad.data() + model.bias_offset(l);
      for (std::size_t o = 0; o < outn; ++o) {
        gb[o] += delta[o];
        for (std::size_t i = 0; i < in; ++i) gw[o * in + i] += delta[o] * a[i];
      }
      if (l == 0) break;
      const double* w = model.params.data() + model.weight_offset(l);
      prev_delta.assign(in, 0.0);
      for (std::size_t o = 0; o < outn; ++o) {
        for (std::size_t i = 0; i < in; ++i) prev_delta[i] += w[o * in + i] * delta[o];
      }
      // acts[l] = relu(z) * mask, so d acts / d z = mask where acts > 0.
      const auto& mask = pass.masks[l - 1];
      for (std::size_t i = 0; i < in; ++i) prev_delta[i] = a[i] > 0.0 ? prev_delta[i] * mask[i] : 0.0;
      std::swap(delta, prev_delta);
    }
  }
  const double inv = rows.empty() ? 0.0 : 1.0 / static_cast<double>(rows.size());
  g.loss *= inv;
  for (auto& v : g.grad) v *= inv;
  return g;
}

double mlp_loss(const MLPModel& model, const Matrix& x, std::span<const int> y) {
  std::vector<std::size_t> rows(x.rows());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return mlp_loss_and_gradient(model, x, y, rows, nullptr).loss;
}

ProbMatrix mlp_predict_proba(const MLPModel& model, const Matrix& x) {
  if (x.cols() != model.num_inputs()) {
    throw DimensionError("network expects " + std::to_string(model.num_inputs()) +
                         " inputs, got " + std::to_string(x.cols()));
  }
  ProbMatrix out(x.rows(), model.num_outputs());
  ForwardPass pass;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    forward(model, x.row(r), nullptr, pass);
    std::copy(pass.acts.back().begin(), pass.acts.back().end(), out.row(r).begin());
  }
  return out;
}

void AdamState::apply(std::vector<double>& params, std::span<const double> grad,
                      double learning_rate) {
  if (m.size() != params.size()) {
    m.assign(params.size(), 0.0);
    v.assign(params.size(), 0.0);
  }
  ++step;
  const double c1 = 1.0 - std::pow(beta1, static_cast<double>(step));
  const double c2 = 1.0 - std::pow(beta2, static_cast<double>(step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m[i] = beta1 * m[i] + (1.0 - beta1) * grad[i];
    v[i] = beta2 * v[i] + (1.0 - beta2) * grad[i] * grad[i];
    const double mhat = m[i] / c1;
    const double vhat = v[i] / c2;
    params[i] -= learning_rate * mhat / (std::sqrt(vhat) + epsilon);
  }
}

void FedConfig::validate() const {
  if (n_clients < 1 || rounds < 1 || local_epochs < 1 || batch_size < 1) {
    throw ConfigError("federation counts must all be at least 1");
  }
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("dropout must lie in [0, 1)");
  if (!(test_fraction >= 0.0 && test_fraction < 1.0)) {
    throw ConfigError("test_fraction must lie in [0, 1)");
  }
  if (learning_rate < 0.0) throw ConfigError("learning rate must be non-negative");
}

std::vector<std::vector<std::size_t>> shard(std::span<const int> labels, int n_clients,
                                            std::uint64_t seed) {
  if (n_clients < 1) throw ConfigError("need at least one client");
  if (static_cast<std::size_t>(n_clients) > labels.size()) {
    throw ConfigError("more clients (" + std::to_string(n_clients) + ") than records (" +
                      std::to_string(labels.size()) + ")");
  }
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  Rng rng = make_rng(seed, "shard");
  std::vector<std::vector<std::size_t>> shards(n_clients);
  std::size_t next = 0;
  for (auto& [cls, idx] : by_class) {
    std::shuffle(idx.begin(), idx.end(), rng);
    for (auto i : idx) shards[next++ % n_clients].push_back(i);
  }
  for (auto& s : shards) std::sort(s.begin(), s.end());
  return shards;
}

MLPModel local_train(const MLPModel& model, const Matrix& x, std::span<const int> y,
                     const FedConfig& config, int client, int round) {
  if (x.rows() == 0) throw EmptyInputError("client shard is empty");
  if (x.cols() != model.num_inputs()) throw DimensionError("shard width does not match network");
  MLPModel out = model;
  AdamState adam;
  Rng rng = make_rng(config.seed, "local_train",
                     {static_cast<std::uint64_t>(client), static_cast<std::uint64_t>(round)});
  std::vector<std::size_t> order(x.rows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (int e = 0; e < config.local_epochs; ++e) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t b = 0; b < order.size(); b += config.batch_size) {
      const std::size_t end = std::min(order.size(), b + config.batch_size);
      std::span<const std::size_t> batch(order.data() + b, end - b);
      auto g = mlp_loss_and_gradient(out, x, y, batch, &rng);
      if (!std::isfinite(g.loss)) {
        throw DivergenceError("local training loss became non-finite (client " +
                              std::to_string(client) + ", round " + std::to_string(round) + ")");
      }
      adam.apply(out.params, g.grad, config.learning_rate);
    }
  }
  return out;
}

MLPModel fedavg(std::span<const MLPModel> models, std::span<const double> weights) {
  if (models.empty()) throw ConfigError("fedavg needs at least one model");
  if (models.size() != weights.size()) throw DimensionError("one weight per model required");
  double total = 0.0;
  for (std::size_t i = 0; i < models.size(); ++i) {
    if (!models[i].same_architecture(models[0]) ||
        models[i].params.size() != models[0].params.size()) {
      throw DimensionError("fedavg models have different architectures");
    }
    if (!(weights[i] > 0.0)) throw ConfigError("fedavg weights must be positive");
    total += weights[i];
  }
  MLPModel out = models[0];
  std::fill(out.params.begin(), out.params.end(), 0.0);
  for (std::size_t i = 0; i < models.size(); ++i) {
    const double c = weights[i] / total;
    for (std::size_t p = 0; p < out.params.size(); ++p) out.params[p] += c * models[i].params[p];
  }
  return out;
}

namespace {

std::vector<std::size_t> network_shape(std::size_t inputs, const FedConfig& config,
                                       int num_classes) {
  std::vector<std::size_t> sizes{inputs};
  sizes.insert(sizes.end(), config.hidden.begin(), config.hidden.end());
  sizes.push_back(static_cast<std::size_t>(num_classes));
  return sizes;
}

}  // namespace

FedRun federate(const Matrix& train_x, std::span<const int> train_y, const Matrix& test_x,
                std::span<const int> test_y, int num_classes, const FedConfig& config) {
  config.validate();
  const auto shards = shard(train_y, config.n_clients, config.seed);
  std::vector<Matrix> client_x;
  std::vector<std::vector<int>> client_y;
  for (const auto& s : shards) {
    client_x.push_back(train_x.select_rows(s));
    std::vector<int> ys;
    for (auto i : s) ys.push_back(train_y[i]);
    client_y.push_back(std::move(ys));
  }

  std::vector<std::string> classes;
  for (int c = 0; c < num_classes; ++c) classes.push_back(std::to_string(c));

  FedRun run;
  MLPModel global = init_mlp(network_shape(train_x.cols(), config, num_classes), config.dropout,
                             config.seed);
  double prev_loss = std::numeric_limits<double>::infinity();
  for (int r = 0; r < config.rounds; ++r) {
    std::vector<MLPModel> local(shards.size());
    const long clients = static_cast<long>(shards.size());
#pragma omp parallel for schedule(dynamic)
    for (long c = 0; c < clients; ++c) {
      local[c] = local_train(global, client_x[c], client_y[c], config, static_cast<int>(c), r);
    }
    std::vector<double> weights;
    FedRound round;
    round.round = r;
    for (const auto& s : shards) {
      weights.push_back(static_cast<double>(s.size()));
      round.client_samples.push_back(s.size());
    }
    global = fedavg(local, weights);
    round.params = global.params;
    if (test_x.rows() > 0) {
      round.test_loss = mlp_loss(global, test_x, test_y);
      const auto pred = argmax_rows(mlp_predict_proba(global, test_x));
      round.metrics = metric_table(confusion(test_y, pred, classes));
    }
    run.rounds.push_back(std::move(round));
    if (config.plateau_tolerance > 0.0 && test_x.rows() > 0) {
      const double loss = run.rounds.back().test_loss;
      if (prev_loss - loss < config.plateau_tolerance) break;
      prev_loss = loss;
    }
  }
  run.final_model = std::move(global);
  return run;
}

MLPModel train_centralized(const Matrix& x, std::span<const int> y, int num_classes,
                           const FedConfig& config) {
  config.validate();
  MLPModel model = init_mlp(network_shape(x.cols(), config, num_classes), config.dropout,
                            config.seed);
  for (int r = 0; r < config.rounds; ++r) model = local_train(model, x, y, config, 0, r);
  return model;
}

FedRun run_federation(const Matrix& records, std::span<const int> fine_labels, int level,
                      std::span<const std::size_t> features, const FedConfig& config) {
  config.validate();
  if (features.empty()) throw ConfigError("federation needs at least one feature");
  const auto& h = LabelHierarchy::iov();
  const auto labels = coarsen_labels(fine_labels, h, level);
  const Matrix x = records.select_cols(features);

  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
  if (config.test_fraction > 0.0) {
    const int k = std::max(2, static_cast<int>(std::lround(1.0 / config.test_fraction)));
    const auto folds = stratified_folds(labels, k, derive_seed(config.seed, "fed_holdout"));
    train = folds.train_indices(0);
    test = folds.test_indices(0);
  } else {
    train.resize(x.rows());
    std::iota(train.begin(), train.end(), std::size_t{0});
  }
  std::vector<int> ytr;
  std::vector<int> yte;
  for (auto i : train) ytr.push_back(labels[i]);
  for (auto i : test) yte.push_back(labels[i]);
  FedRun run = federate(x.select_rows(train), ytr, x.select_rows(test), yte,
                        h.num_classes(level), config);
  run.level = level;
  run.features.assign(features.begin(), features.end());
  for (auto& r : run.rounds) r.metrics.classes = h.class_names(level);
  return run;
}

Json to_json(const FedConfig& config) {
  return Json{{"n_clients", config.n_clients},
              {"rounds", config.rounds},
              {"local_epochs", config.local_epochs},
              {"batch_size", config.batch_size},
              {"learning_rate", config.learning_rate},
              {"optimizer", "adam"},
              {"loss", "categorical_cross_entropy"},
              {"hidden", config.hidden},
              {"dropout", config.dropout},
              {"test_fraction", config.test_fraction},
              {"plateau_tolerance", config.plateau_tolerance},
              {"shard_strategy", "stratified-iid"},
              {"seed", config.seed}};
}

Json to_json(const FedRun& run, bool include_params) {
  Json rounds = Json::array();
  for (const auto& r : run.rounds) {
    Json doc{{"round", r.round},
             {"client_samples", r.client_samples},
             {"test_loss", r.test_loss},
             {"metrics", to_json(r.metrics)}};
    if (include_params) doc["params"] = r.params;
    rounds.push_back(doc);
  }
  return Json{{"level", run.level},
              {"features", run.features},
              {"layer_sizes", run.final_model.layer_sizes},
              {"rounds", rounds}};
}

std::string round_log_csv(const FedRun& run) {
  std::string out = "round,test_loss,accuracy,macro_f1,weighted_f1\n";
  char buf[160];
  for (const auto& r : run.rounds) {
    std::snprintf(buf, sizeof(buf), "%d,%.6f,%.4f,%.4f,%.4f\n", r.round, r.test_loss,
                  r.metrics.accuracy, r.metrics.macro.f1, r.metrics.weighted.f1);
    out += buf;
  }
  return out;
}

}  // namespace hierids
