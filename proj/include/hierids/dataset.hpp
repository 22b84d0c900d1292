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
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hierids/matrix.hpp"

namespace hierids {

enum class FeatureKind { kBinary, kUnitInterval };

// Column layout of a traffic CSV. An empty feature_names list means "every
// column that is neither the label nor ignored" and is resolved at load time.
struct FeatureSchema {
  std::vector<std::string> feature_names;
  std::string label_column = "label";
  FeatureKind feature_kind = FeatureKind::kBinary;
  std::vector<std::string> ignore_columns;

  // Throws SchemaError when names are duplicated, the label is listed as a
  // feature, or (when require_features) the feature list is empty.
  void validate(bool require_features = true) const;
};

// Fine class ids used throughout.
enum FineClass : int {
  kBenign = 0,
  kDos = 1,
  kSpoofingGas = 2,
  kSpoofingRpm = 3,
  kSpoofingSpeed = 4,
  kSpoofingSteeringWheel = 5,
};

// Benign / DoS / spoofing taxonomy. Level 1 ids: BENIGN=0, ATTACK=1. Level 2
// ids: BENIGN=0, DOS=1, SPOOFING=2. Level 3 ids are the fine ids.
class LabelHierarchy {
 public:
  static const LabelHierarchy& iov();

  int num_fine() const { return static_cast<int>(fine_names_.size()); }
  int num_classes(int level) const;
  const std::vector<std::string>& class_names(int level) const;
  int coarsen(int fine, int level) const;
  // Maps a level-3 id to the level-2 id and a level-2 id to the level-1 id.
  int level1_of_level2(int l2) const { return l2 == 0 ? 0 : 1; }

  // Canonical id for a raw spelling ("Benign", "SW", "Steering Wheel", ...).
  std::optional<int> parse_fine(std::string_view raw) const;
  const std::string& fine_name(int fine) const { return fine_names_.at(fine); }

 private:
  LabelHierarchy();
  std::vector<std::string> fine_names_;
  std::vector<std::string> l2_names_;
  std::vector<std::string> l1_names_;
  std::vector<int> level2_of_;
  std::vector<int> level1_of_;
};

struct Dataset {
  Matrix records;
  std::vector<int> labels;  // fine class ids
  FeatureSchema schema;

  std::size_t size() const { return records.rows(); }
  std::size_t num_features() const { return records.cols(); }
  void validate() const;
};

struct ScalerParams {
  std::vector<double> x_min;
  std::vector<double> x_max;
};

struct FoldAssignment {
  int k = 0;
  std::vector<int> fold_of;
  std::vector<std::string> warnings;

  std::vector<std::size_t> test_indices(int fold) const;
  std::vector<std::size_t> train_indices(int fold) const;
};

Dataset load_csv(const std::filesystem::path& path, const FeatureSchema& schema);
void write_csv(const std::filesystem::path& path, const Dataset& ds);

std::pair<Dataset, ScalerParams> minmax_scale(const Dataset& ds);
Dataset apply_scaler(const Dataset& ds, const ScalerParams& params);
ScalerParams identity_scaler(std::size_t num_features);

FoldAssignment stratified_folds(std::span<const int> labels, int k, std::uint64_t seed);
inline FoldAssignment stratified_folds(const Dataset& ds, int k, std::uint64_t seed) {
  return stratified_folds(ds.labels, k, seed);
}

std::vector<int> coarsen_labels(std::span<const int> labels, const LabelHierarchy& h,
                                int level);

// A planted feature: 1 with probability `bias` inside its class and with
// probability 1 - bias elsewhere. Every other feature is a fair coin.
struct InformativeFeature {
  std::size_t feature = 0;
  int fine_class = 0;
  double bias = 1.0;
};

struct SynthSpec {
  std::size_t n_records = 1000;
  std::size_t n_features = 20;
  std::vector<InformativeFeature> informative;
  // Probability of each fine class; must sum to 1.
  std::vector<double> class_mix;
};

// CICIoV2024 class proportions.
std::vector<double> iov_class_mix();
// CICIoV2024 record counts.
std::vector<std::size_t> iov_class_counts();

Dataset synth_generate(const SynthSpec& spec, std::uint64_t seed);

// Dataset restricted to the given rows.
Dataset subset_rows(const Dataset& ds, std::span<const std::size_t> rows);
std::vector<std::size_t> class_counts(std::span<const int> labels, int num_classes);

}  // namespace hierids
