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

#include "hierids/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>

#include "hierids/errors.hpp"
#include "hierids/io.hpp"
#include "hierids/rng.hpp"

namespace hierids {

void FeatureSchema::validate(bool require_features) const {
  if (require_features && feature_names.empty()) {
    throw SchemaError("schema has no features");
  }
  std::set<std::string> seen;
  for (const auto& name : feature_names) {
    if (!seen.insert(name).second) throw SchemaError("duplicate feature name: " + name);
    if (name == label_column) {
      throw SchemaError("label column listed as a feature: " + name);
    }
  }
}

LabelHierarchy::LabelHierarchy()
    : fine_names_{"BENIGN",         "DOS",           "SPOOFING_GAS",
                  "SPOOFING_RPM",   "SPOOFING_SPEED", "SPOOFING_STEERING_WHEEL"},
      l2_names_{"BENIGN", "DOS", "SPOOFING"},
      l1_names_{"BENIGN", "ATTACK"},
      level2_of_{0, 1, 2, 2, 2, 2},
      level1_of_{0, 1, 1, 1, 1, 1} {}

const LabelHierarchy& LabelHierarchy::iov() {
  static const LabelHierarchy h;
  return h;
}

int LabelHierarchy::num_classes(int level) const {
  return static_cast<int>(class_names(level).size());
}

const std::vector<std::string>& LabelHierarchy::class_names(int level) const {
  switch (level) {
    case 1: return l1_names_;
    case 2: return l2_names_;
    case 3: return fine_names_;
  }
  throw ConfigError("level must be 1, 2 or 3, got " + std::to_string(level));
}

int LabelHierarchy::coarsen(int fine, int level) const {
  if (fine < 0 || fine >= num_fine()) {
    throw SchemaError("unknown label id " + std::to_string(fine));
  }
  switch (level) {
    case 1: return level1_of_[fine];
    case 2: return level2_of_[fine];
    case 3: return fine;
  }
  throw ConfigError("level must be 1, 2 or 3, got " + std::to_string(level));
}

namespace {

std::string normalize_label(std::string_view raw) {
  std::string out;
  for (char c : raw) {
    if (c == ' ' || c == '_' || c == '-' || c == '"') continue;
    out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  }
  return out;
}

}  // namespace

std::optional<int> LabelHierarchy::parse_fine(std::string_view raw) const {
  static const std::unordered_map<std::string, int> aliases = {
      {"BENIGN", kBenign},
      {"NORMAL", kBenign},
      {"DOS", kDos},
      {"GAS", kSpoofingGas},
      {"SPOOFINGGAS", kSpoofingGas},
      {"RPM", kSpoofingRpm},
      {"SPOOFINGRPM", kSpoofingRpm},
      {"SPEED", kSpoofingSpeed},
      {"SPOOFINGSPEED", kSpoofingSpeed},
      {"STEERINGWHEEL", kSpoofingSteeringWheel},
      {"SPOOFINGSTEERINGWHEEL", kSpoofingSteeringWheel},
      {"SW", kSpoofingSteeringWheel},
  };
  auto it = aliases.find(normalize_label(raw));
  if (it == aliases.end()) return std::nullopt;
  return it->second;
}

void Dataset::validate() const {
  if (records.rows() == 0) throw EmptyInputError("dataset has no records");
  if (labels.size() != records.rows()) {
    throw DimensionError("label count does not match record count");
  }
  if (schema.feature_names.size() != records.cols()) {
    throw DimensionError("schema feature count does not match record width");
  }
  const int k = LabelHierarchy::iov().num_fine();
  for (int l : labels) {
    if (l < 0 || l >= k) throw SchemaError("unknown label id " + std::to_string(l));
  }
}

std::vector<std::size_t> FoldAssignment::test_indices(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i) {
    if (fold_of[i] == fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldAssignment::train_indices(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i) {
    if (fold_of[i] != fold) out.push_back(i);
  }
  return out;
}

Dataset load_csv(const std::filesystem::path& path, const FeatureSchema& schema) {
  std::ifstream in(path);
  if (!in) throw EmptyInputError("cannot open " + path.string());
  schema.validate(false);

  std::string line;
  if (!std::getline(in, line)) throw EmptyInputError("empty file: " + path.string());
  const auto header = split_csv_line(line);

  std::unordered_map<std::string, std::size_t> col_of;
  for (std::size_t i = 0; i < header.size(); ++i) col_of[header[i]] = i;

  auto label_it = col_of.find(schema.label_column);
  if (label_it == col_of.end()) {
    throw SchemaError("missing column: " + schema.label_column);
  }
  const std::size_t label_col = label_it->second;

  FeatureSchema resolved = schema;
  if (resolved.feature_names.empty()) {
    std::set<std::string> ignored(schema.ignore_columns.begin(), schema.ignore_columns.end());
    for (const auto& name : header) {
      if (name != schema.label_column && !ignored.count(name)) {
        resolved.feature_names.push_back(name);
      }
    }
  }
  resolved.validate(true);

  std::vector<std::size_t> feature_cols;
  for (const auto& name : resolved.feature_names) {
    auto it = col_of.find(name);
    if (it == col_of.end()) throw SchemaError("missing column: " + name);
    feature_cols.push_back(it->second);
  }

  const std::size_t m = feature_cols.size();
  const auto& hierarchy = LabelHierarchy::iov();
  std::vector<float> values;
  std::vector<int> labels;
  long row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw ParseError("expected " + std::to_string(header.size()) + " fields, got " +
                           std::to_string(fields.size()),
                       row);
    }
    auto fine = hierarchy.parse_fine(fields[label_col]);
    if (!fine) throw ParseError("unknown label '" + fields[label_col] + "'", row);
    labels.push_back(*fine);
    for (std::size_t j = 0; j < m; ++j) {
      const std::string& f = fields[feature_cols[j]];
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (f.empty() || ec != std::errc() || ptr != f.data() + f.size()) {
        throw ParseError("non-numeric or missing value '" + f + "' in column " +
                             resolved.feature_names[j],
                         row);
      }
      if (resolved.feature_kind == FeatureKind::kBinary && v != 0.0 && v != 1.0) {
        throw ParseError("non-binary value '" + f + "' in column " +
                             resolved.feature_names[j],
                         row);
      }
      values.push_back(static_cast<float>(v));
    }
  }
  if (labels.empty()) throw EmptyInputError("no data rows in " + path.string());

  Dataset ds;
  ds.records = Matrix(labels.size(), m, std::move(values));
  ds.labels = std::move(labels);
  ds.schema = std::move(resolved);
  return ds;
}

void write_csv(const std::filesystem::path& path, const Dataset& ds) {
  std::ostringstream out;
  for (const auto& name : ds.schema.feature_names) out << name << ',';
  out << ds.schema.label_column << '\n';
  const auto& h = LabelHierarchy::iov();
  char buf[32];
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (float v : ds.records.row(i)) {
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
      out.write(buf, ptr - buf);
      out << ',';
    }
    out << h.fine_name(ds.labels[i]) << '\n';
  }
  write_file_atomic(path, out.str());
}

std::pair<Dataset, ScalerParams> minmax_scale(const Dataset& ds) {
  if (ds.size() == 0) throw EmptyInputError("cannot scale an empty dataset");
  const std::size_t m = ds.num_features();
  ScalerParams params;
  params.x_min.assign(m, 0.0);
  params.x_max.assign(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    double lo = ds.records(0, j);
    double hi = lo;
    for (std::size_t i = 1; i < ds.size(); ++i) {
      const double v = ds.records(i, j);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    params.x_min[j] = lo;
    params.x_max[j] = hi;
  }
  return {apply_scaler(ds, params), params};
}

Dataset apply_scaler(const Dataset& ds, const ScalerParams& params) {
  const std::size_t m = ds.num_features();
  if (params.x_min.size() != m || params.x_max.size() != m) {
    throw DimensionError("scaler has " + std::to_string(params.x_min.size()) +
                         " features, dataset has " + std::to_string(m));
  }
  Dataset out = ds;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    auto row = out.records.row(i);
    for (std::size_t j = 0; j < m; ++j) {
      const double lo = params.x_min[j];
      const double span = params.x_max[j] - lo;
      double v = span > 0.0 ? (row[j] - lo) / span : 0.0;
      row[j] = static_cast<float>(std::clamp(v, 0.0, 1.0));
    }
  }
  bool binary = ds.schema.feature_kind == FeatureKind::kBinary;
  for (float v : out.records.data()) {
    if (!binary) break;
    binary = v == 0.0f || v == 1.0f;
  }
  out.schema.feature_kind = binary ? FeatureKind::kBinary : FeatureKind::kUnitInterval;
  return out;
}

ScalerParams identity_scaler(std::size_t num_features) {
  return {std::vector<double>(num_features, 0.0), std::vector<double>(num_features, 1.0)};
}

FoldAssignment stratified_folds(std::span<const int> labels, int k, std::uint64_t seed) {
  if (k < 2) throw ConfigError("fold count must be at least 2");
  FoldAssignment out;
  out.k = k;
  out.fold_of.assign(labels.size(), -1);

  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);

  Rng rng = make_rng(seed, "stratified_folds");
  // The dealing offset carries across classes so fold totals stay balanced.
  std::size_t next = 0;
  for (auto& [cls, idx] : by_class) {
    if (idx.size() < static_cast<std::size_t>(k)) {
      out.warnings.push_back("class " + std::to_string(cls) + " has " +
                             std::to_string(idx.size()) + " records, fewer than k=" +
                             std::to_string(k));
    }
    std::shuffle(idx.begin(), idx.end(), rng);
    for (std::size_t i : idx) {
      out.fold_of[i] = static_cast<int>(next % k);
      ++next;
    }
  }
  return out;
}

std::vector<int> coarsen_labels(std::span<const int> labels, const LabelHierarchy& h,
                                int level) {
  if (level < 1 || level > 3) {
    throw ConfigError("level must be 1, 2 or 3, got " + std::to_string(level));
  }
  std::vector<int> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) out[i] = h.coarsen(labels[i], level);
  return out;
}

std::vector<double> iov_class_mix() {
  const auto counts = iov_class_counts();
  const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
  std::vector<double> mix;
  for (auto c : counts) mix.push_back(static_cast<double>(c) / total);
  return mix;
}

std::vector<std::size_t> iov_class_counts() {
  return {1048575, 74663, 9991, 54900, 24951, 19977};
}

Dataset synth_generate(const SynthSpec& spec, std::uint64_t seed) {
  const auto& h = LabelHierarchy::iov();
  if (spec.n_records == 0 || spec.n_features == 0) {
    throw ConfigError("synthetic spec needs at least one record and one feature");
  }
  if (spec.class_mix.empty() || spec.class_mix.size() > static_cast<std::size_t>(h.num_fine())) {
    throw ConfigError("class mix must list between 1 and 6 class probabilities");
  }
  double total = 0.0;
  for (double p : spec.class_mix) {
    if (p < 0.0) throw ConfigError("class mix has a negative probability");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ConfigError("class mix must sum to 1");
  for (const auto& inf : spec.informative) {
    if (inf.feature >= spec.n_features) {
      throw ConfigError("informative feature index out of range");
    }
    if (inf.bias < 0.0 || inf.bias > 1.0) throw ConfigError("bias must lie in [0,1]");
  }

  Rng rng = make_rng(seed, "synth_generate");
  std::discrete_distribution<int> pick_class(spec.class_mix.begin(), spec.class_mix.end());
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  Dataset ds;
  ds.records = Matrix(spec.n_records, spec.n_features);
  ds.labels.resize(spec.n_records);
  for (std::size_t i = 0; i < spec.n_records; ++i) {
    const int label = pick_class(rng);
    ds.labels[i] = label;
    auto row = ds.records.row(i);
    for (std::size_t j = 0; j < spec.n_features; ++j) row[j] = unit(rng) < 0.5 ? 1.0f : 0.0f;
    for (const auto& inf : spec.informative) {
      const double p_one = inf.fine_class == label ? inf.bias : 1.0 - inf.bias;
      row[inf.feature] = unit(rng) < p_one ? 1.0f : 0.0f;
    }
  }
  ds.schema.label_column = "label";
  ds.schema.feature_kind = FeatureKind::kBinary;
  for (std::size_t j = 0; j < spec.n_features; ++j) {
    ds.schema.feature_names.push_back("F" + std::to_string(j));
  }
  return ds;
}

Dataset subset_rows(const Dataset& ds, std::span<const std::size_t> rows) {
  Dataset out;
  out.records = ds.records.select_rows(rows);
  out.labels.reserve(rows.size());
  for (auto r : rows) out.labels.push_back(ds.labels[r]);
  out.schema = ds.schema;
  return out;
}

std::vector<std::size_t> class_counts(std::span<const int> labels, int num_classes) {
  std::vector<std::size_t> counts(num_classes, 0);
  for (int l : labels) {
    if (l < 0 || l >= num_classes) throw SchemaError("label id out of range");
    ++counts[l];
  }
  return counts;
}

}  // namespace hierids
