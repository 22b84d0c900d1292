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

#include "hierids/io.hpp"
#include "hierids/matrix.hpp"
#include "hierids/metrics.hpp"
#include "hierids/rng.hpp"

namespace hierids {

// Fully connected network: ReLU hidden layers with inverted dropout, softmax
// output. Parameters are one flat vector, layer by layer, each layer storing
// its weight matrix (out x in, row-major) followed by its bias.
struct MLPModel {
  std::vector<std::size_t> layer_sizes;  // input, hidden..., output
  double dropout = 0.0;
  std::vector<double> params;

  std::size_t num_inputs() const { return layer_sizes.front(); }
  std::size_t num_outputs() const { return layer_sizes.back(); }
  std::size_t num_layers() const { return layer_sizes.size() - 1; }
  std::size_t weight_offset(std::size_t layer) const;
  std::size_t bias_offset(std::size_t layer) const;
  bool same_architecture(const MLPModel& other) const {
    return layer_sizes == other.layer_sizes;
  }
};

std::size_t mlp_param_count(std::span<const std::size_t> layer_sizes);
// Glorot-uniform weights, zero biases.
MLPModel init_mlp(std::vector<std::size_t> layer_sizes, double dropout, std::uint64_t seed);

struct MLPGradient {
  double loss = 0.0;  // mean cross-entropy over the batch
  std::vector<double> grad;
};

// Backpropagation over the given rows. Dropout is applied only when
// dropout_rng is non-null.
MLPGradient mlp_loss_and_gradient(const MLPModel& model, const Matrix& x,
                                  std::span<const int> y, std::span<const std::size_t> rows,
                                  Rng* dropout_rng);
double mlp_loss(const MLPModel& model, const Matrix& x, std::span<const int> y);
ProbMatrix mlp_predict_proba(const MLPModel& model, const Matrix& x);

struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-7;
  std::vector<double> m;
  std::vector<double> v;
  long step = 0;

  void apply(std::vector<double>& params, std::span<const double> grad, double learning_rate);
};

struct FedConfig {
  int n_clients = 10;
  int rounds = 5;
  int local_epochs = 50;
  std::size_t batch_size = 25;
  double learning_rate = 1e-3;
  std::vector<std::size_t> hidden = {64, 32, 16};
  double dropout = 0.2;
  double test_fraction = 0.2;
  // Stop early when the global test loss fails to improve by this much; 0 disables.
  double plateau_tolerance = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

// Disjoint shards preserving the class mix; indices ascending within a shard.
std::vector<std::vector<std::size_t>> shard(std::span<const int> labels, int n_clients,
                                            std::uint64_t seed);

// Fresh optimizer state per call; batches and dropout masks come from the
// (seed, client, round) stream.
MLPModel local_train(const MLPModel& model, const Matrix& x, std::span<const int> y,
                     const FedConfig& config, int client, int round);

// Every parameter = sum_i (w_i / sum w) * theta_i.
MLPModel fedavg(std::span<const MLPModel> models, std::span<const double> weights);

struct FedRound {
  int round = 0;
  std::vector<std::size_t> client_samples;
  std::vector<double> params;
  double test_loss = 0.0;
  MetricTable metrics;
};

struct FedRun {
  int level = 3;
  std::vector<std::size_t> features;
  std::vector<FedRound> rounds;
  MLPModel final_model;
};

// Rounds of broadcast, local training on every client, and FedAvg, on
// already split training data. Test data may be empty.
FedRun federate(const Matrix& train_x, std::span<const int> train_y, const Matrix& test_x,
                std::span<const int> test_y, int num_classes, const FedConfig& config);
// Same schedule as a one-client federation over the whole training set.
MLPModel train_centralized(const Matrix& x, std::span<const int> y, int num_classes,
                           const FedConfig& config);

FedRun run_federation(const Matrix& records, std::span<const int> fine_labels, int level,
                      std::span<const std::size_t> features, const FedConfig& config);

Json to_json(const FedConfig& config);
Json to_json(const FedRun& run, bool include_params = false);
std::string round_log_csv(const FedRun& run);

}  // namespace hierids
