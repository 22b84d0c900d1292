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

// Acceptance suite: one PASS/FAIL/SKIP line per criterion, each checked at
// its stated tolerance and runtime budget. Exits nonzero if anything fails.
//
// Criterion 11 needs the CIC-IoV2024 binary CSV. Point HIERIDS_CICIOV2024 at
// it; HIERIDS_CICIOV2024_LABEL names the label column (default
// specific_class) and HIERIDS_CICIOV2024_IGNORE lists comma-separated columns
// to drop (default label,category).

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hierids/attribution.hpp"
#include "hierids/boruta.hpp"
#include "hierids/cli.hpp"
#include "hierids/dataset.hpp"
#include "hierids/deploysim.hpp"
#include "hierids/fedsim.hpp"
#include "hierids/forest.hpp"
#include "hierids/hierarchy.hpp"
#include "hierids/metrics.hpp"
#include "hierids/tree.hpp"
#include "test_support.hpp"

using namespace hierids;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  enum class State { kPass, kFail, kSkip } state = State::kPass;
  std::string detail;
};

Outcome verdict(bool ok, std::string detail) {
  return {ok ? Outcome::State::kPass : Outcome::State::kFail, std::move(detail)};
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

// ------------------------------------------------------------------ 1

Outcome metrics_oracle() {
  Rng rng(101);
  std::uniform_int_distribution<int> cls(0, 5);
  const std::vector<std::string> names{"a", "b", "c", "d", "e", "f"};
  double worst = 0.0;
  for (int inst = 0; inst < 50; ++inst) {
    std::vector<int> yt(1000), yp(1000);
    for (auto& v : yt) v = cls(rng);
    for (std::size_t i = 0; i < yp.size(); ++i) yp[i] = (cls(rng) < 3) ? yt[i] : cls(rng);
    const MetricTable t = metric_table(confusion(yt, yp, names));

    const double n = static_cast<double>(yt.size());
    double correct = 0, mp = 0, mr = 0, mf = 0, wp = 0, wr = 0, wf = 0;
    auto diff = [&](double a, double b) { worst = std::max(worst, std::abs(a - b)); };
    for (int c = 0; c < 6; ++c) {
      double tp = 0, fp = 0, fn = 0, support = 0;
      for (std::size_t i = 0; i < yt.size(); ++i) {
        tp += yt[i] == c && yp[i] == c;
        fp += yt[i] != c && yp[i] == c;
        fn += yt[i] == c && yp[i] != c;
        support += yt[i] == c;
      }
      correct += tp;
      const double p = tp + fp > 0 ? 100.0 * tp / (tp + fp) : 0.0;
      const double r = tp + fn > 0 ? 100.0 * tp / (tp + fn) : 0.0;
      const double f = 2 * tp + fp + fn > 0 ? 100.0 * 2 * tp / (2 * tp + fp + fn) : 0.0;
      diff(t.per_class[c].precision, p);
      diff(t.per_class[c].recall, r);
      diff(t.per_class[c].f1, f);
      mp += p / 6;
      mr += r / 6;
      mf += f / 6;
      wp += p * support / n;
      wr += r * support / n;
      wf += f * support / n;
    }
    diff(t.accuracy, 100.0 * correct / n);
    diff(t.macro.precision, mp);
    diff(t.macro.recall, mr);
    diff(t.macro.f1, mf);
    diff(t.weighted.precision, wp);
    diff(t.weighted.recall, wr);
    diff(t.weighted.f1, wf);
  }
  return verdict(worst <= 1e-12, "max abs deviation " + fmt("%.3g", worst));
}

// ------------------------------------------------------------------ 2

Outcome stratification() {
  std::vector<int> labels;
  const auto counts = iov_class_counts();
  for (std::size_t c = 0; c < counts.size(); ++c) {
    labels.insert(labels.end(), counts[c] / 100, static_cast<int>(c));
  }
  const FoldAssignment folds = stratified_folds(labels, 10, 7);
  double worst = 0.0;
  for (int f = 0; f < 10; ++f) {
    std::vector<double> per(counts.size(), 0.0);
    for (auto i : folds.test_indices(f)) per[labels[i]] += 1;
    for (std::size_t c = 0; c < counts.size(); ++c) {
      worst = std::max(worst, std::abs(per[c] - static_cast<double>(counts[c] / 100) / 10.0));
    }
  }
  return verdict(worst <= 1.0, "N=" + std::to_string(labels.size()) +
                                   ", max |fold count - N_c/10| = " + fmt("%.2f", worst));
}

// ------------------------------------------------------------------ 3

Outcome boruta_recovery() {
  int min_noise_rejected = 15;
  int min_informative_confirmed = 5;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SynthSpec spec;
    spec.n_records = 2000;
    spec.n_features = 20;
    spec.class_mix.assign(6, 1.0 / 6.0);
    for (int j = 0; j < 5; ++j) spec.informative.push_back({static_cast<std::size_t>(j), j + 1, 0.95});
    const Dataset ds = synth_generate(spec, seed);
    BorutaConfig cfg;
    cfg.max_runs = 50;
    cfg.seed = seed;
    const BorutaResult r = boruta_run(ds.records, ds.labels, 6, ds.schema.feature_names, cfg);
    int confirmed = 0, rejected = 0;
    for (int j = 0; j < 20; ++j) {
      if (j < 5) confirmed += r.status[j] == FeatureStatus::kConfirmed;
      else rejected += r.status[j] == FeatureStatus::kUnimportant;
    }
    min_informative_confirmed = std::min(min_informative_confirmed, confirmed);
    min_noise_rejected = std::min(min_noise_rejected, rejected);
  }
  return verdict(min_informative_confirmed == 5 && min_noise_rejected >= 13,
                 "worst seed: " + std::to_string(min_informative_confirmed) +
                     "/5 informative Confirmed, " + std::to_string(min_noise_rejected) +
                     "/15 noise Unimportant");
}

// ------------------------------------------------------------------ 4

double weighted_gini(const Matrix& x, const std::vector<int>& y, int k, std::size_t f,
                     double thr) {
  std::vector<double> left(k, 0.0), right(k, 0.0);
  double nl = 0, nr = 0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    if (x(i, f) <= thr) {
      left[y[i]] += 1;
      nl += 1;
    } else {
      right[y[i]] += 1;
      nr += 1;
    }
  }
  auto g = [](const std::vector<double>& c, double n) {
    double s = 1.0;
    for (double v : c) s -= (v / n) * (v / n);
    return n > 0 ? s : 0.0;
  };
  return (nl * g(left, nl) + nr * g(right, nr)) / (nl + nr);
}

Outcome gini_oracle() {
  Rng rng(404);
  std::uniform_int_distribution<int> nd(2, 32), md(1, 5), kd(2, 4), lvl(0, 5);
  int mismatches = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = nd(rng), m = md(rng), k = kd(rng);
    Matrix x(n, m);
    std::vector<int> y(n);
    std::uniform_int_distribution<int> cls(0, k - 1);
    for (auto& v : x.data()) v = static_cast<float>(lvl(rng)) / 5.0f;
    for (auto& v : y) v = cls(rng);

    double best = 1e300;
    for (int f = 0; f < m; ++f) {
      std::set<float> vals;
      for (int i = 0; i < n; ++i) vals.insert(x(i, f));
      std::vector<float> v(vals.begin(), vals.end());
      for (std::size_t j = 0; j + 1 < v.size(); ++j) {
        best = std::min(best, weighted_gini(x, y, k, f, 0.5 * (double(v[j]) + v[j + 1])));
      }
    }
    const DecisionTree t = fit_tree(x, y, k, {});
    const TreeNode& root = t.nodes()[0];
    std::set<int> distinct(y.begin(), y.end());
    if (root.is_leaf()) {
      // A leaf root is right only for pure nodes or when no cut exists.
      if (distinct.size() > 1 && best < 1e300) ++mismatches;
      continue;
    }
    const double got = weighted_gini(x, y, k, root.feature, root.threshold);
    worst = std::max(worst, got - best);
    if (got > best + 1e-12) ++mismatches;
  }
  return verdict(mismatches == 0, std::to_string(mismatches) + " of 200 roots above the minimum");
}

// ------------------------------------------------------------------ 5

Outcome attribution_additivity() {
  const Dataset train = hierids::testing::separable_six_class(2000, 14, 5);
  SynthSpec spec;
  spec.n_records = 1000;
  spec.n_features = 20;
  spec.class_mix.assign(6, 1.0 / 6.0);
  const Dataset eval = synth_generate(spec, 6);
  ForestParams p;
  p.num_trees = 50;
  p.seed = 3;
  // Noisy labels give deep trees with mixed leaves, the harder case.
  std::vector<int> y = train.labels;
  Rng rng(9);
  std::uniform_int_distribution<int> cls(0, 5);
  for (auto& v : y) if (cls(rng) == 0) v = cls(rng);
  const ForestModel model = fit_forest(train.records, y, 6, p);
  const ProbMatrix proba = predict_proba(model, eval.records);
  double worst = 0.0;
  for (std::size_t i = 0; i < eval.size(); ++i) {
    const PathAttribution a = path_contributions(model, eval.records.row(i));
    for (int c = 0; c < 6; ++c) {
      double s = a.bias[c];
      for (std::size_t j = 0; j < eval.num_features(); ++j) s += a.contributions(j, c);
      worst = std::max(worst, std::abs(s - proba(i, c)));
    }
  }
  return verdict(worst <= 1e-9, "max |bias + sum - proba| " + fmt("%.3g", worst));
}

// ------------------------------------------------------------------ 6

bool all_hundred(const MetricTable& t, double& lowest) {
  auto see = [&](double v) { lowest = std::min(lowest, v); };
  see(t.accuracy);
  see(t.macro.precision);
  see(t.macro.recall);
  see(t.macro.f1);
  see(t.weighted.precision);
  see(t.weighted.recall);
  see(t.weighted.f1);
  for (const auto& m : t.per_class) {
    see(m.precision);
    see(m.recall);
    see(m.f1);
  }
  return lowest >= 99.995;
}

Outcome hierarchy_separable() {
  const Dataset ds = hierids::testing::separable_six_class(1200, 4, 12);
  const FoldAssignment folds = stratified_folds(ds, 10, 12);
  std::vector<std::size_t> all(ds.num_features());
  std::iota(all.begin(), all.end(), std::size_t{0});
  HierConfig cfg;
  for (auto& level : cfg.levels) {
    level.learner.kind = LearnerKind::kForest;
    level.learner.forest.seed = 12;
    level.features = all;
  }
  const HierEvaluation hier = evaluate_hierarchy(ds, cfg, folds);
  double lowest = 100.0;
  bool ok = true;
  for (const auto& t : hier.levels) ok = all_hundred(t, lowest) && ok;
  ok = all_hundred(hier.routed, lowest) && ok;
  const FlatEvaluation flat = flat_baseline(ds, cfg.levels[0].learner, all, folds);
  ok = all_hundred(flat.table, lowest) && ok;
  ok = ok && hier.disagreement_rate == 0.0;
  return verdict(ok, "lowest metric " + fmt("%.4f", lowest) + ", disagreement rate " +
                         fmt("%.4f", hier.disagreement_rate));
}

// ------------------------------------------------------------------ 7

Outcome gradient_check() {
  Rng rng(77);
  std::uniform_int_distribution<int> width(1, 10), depth(1, 3), classes(2, 10);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  std::normal_distribution<double> nd(0.0, 0.5);
  double worst = 0.0;
  for (int net = 0; net < 20; ++net) {
    std::vector<std::size_t> sizes{static_cast<std::size_t>(width(rng))};
    for (int l = depth(rng); l > 0; --l) sizes.push_back(width(rng));
    const int k = classes(rng);
    sizes.push_back(k);
    MLPModel m = init_mlp(sizes, 0.0, net);
    for (auto& p : m.params) p += nd(rng);
    Matrix x(6, sizes[0]);
    for (auto& v : x.data()) v = u(rng);
    std::vector<int> y(6);
    std::uniform_int_distribution<int> cls(0, k - 1);
    for (auto& v : y) v = cls(rng);
    std::vector<std::size_t> rows(6);
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    const auto g = mlp_loss_and_gradient(m, x, y, rows, nullptr);
    double d2 = 0, a2 = 0, b2 = 0;
    for (std::size_t i = 0; i < m.params.size(); ++i) {
      const double h = 1e-6;
      MLPModel plus = m, minus = m;
      plus.params[i] += h;
      minus.params[i] -= h;
      const double fd = (mlp_loss(plus, x, y) - mlp_loss(minus, x, y)) / (2 * h);
      d2 += (fd - g.grad[i]) * (fd - g.grad[i]);
      a2 += fd * fd;
      b2 += g.grad[i] * g.grad[i];
    }
    worst = std::max(worst, std::sqrt(d2) / std::max(std::sqrt(a2) + std::sqrt(b2), 1e-300));
  }
  return verdict(worst < 1e-4, "max relative error " + fmt("%.3g", worst));
}

// ------------------------------------------------------------------ 8

Outcome fedavg_algebra() {
  Rng rng(88);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::uniform_int_distribution<int> wd(1, 500);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<MLPModel> ms;
    std::vector<double> ws;
    for (int i = 0; i < 3; ++i) {
      MLPModel m = init_mlp({4, 5, 3}, 0.0, 0);
      for (auto& p : m.params) p = nd(rng);
      ms.push_back(std::move(m));
      ws.push_back(wd(rng));
    }
    // Identity: the weighted mean computed directly.
    const MLPModel avg = fedavg(ms, ws);
    const double total = ws[0] + ws[1] + ws[2];
    for (std::size_t i = 0; i < avg.params.size(); ++i) {
      double direct = 0;
      for (int c = 0; c < 3; ++c) direct += ws[c] * ms[c].params[i];
      worst = std::max(worst, std::abs(avg.params[i] - direct / total));
    }
    // Identical inputs average to themselves.
    const std::vector<MLPModel> same{ms[0], ms[0], ms[0]};
    const MLPModel self = fedavg(same, ws);
    for (std::size_t i = 0; i < self.params.size(); ++i) {
      worst = std::max(worst, std::abs(self.params[i] - ms[0].params[i]));
    }
    // Associativity: merge two first, carrying their combined weight.
    const std::vector<MLPModel> head{ms[0], ms[1]};
    const std::vector<double> hw{ws[0], ws[1]};
    const std::vector<MLPModel> nested{fedavg(head, hw), ms[2]};
    const std::vector<double> nw{ws[0] + ws[1], ws[2]};
    const MLPModel two_step = fedavg(nested, nw);
    for (std::size_t i = 0; i < avg.params.size(); ++i) {
      worst = std::max(worst, std::abs(avg.params[i] - two_step.params[i]));
    }
  }

  const Dataset ds = hierids::testing::separable_six_class(300, 4, 8);
  FedConfig cfg;
  cfg.n_clients = 1;
  cfg.rounds = 3;
  cfg.local_epochs = 5;
  cfg.seed = 8;
  const FedRun run = federate(ds.records, ds.labels, Matrix(0, ds.num_features()),
                              std::vector<int>{}, 6, cfg);
  const bool identical = run.final_model.params == train_centralized(ds.records, ds.labels, 6, cfg).params;
  return verdict(worst <= 1e-12 && identical,
                 "max deviation " + fmt("%.3g", worst) +
                     (identical ? ", one-client run bit-identical" : ", one-client run differs"));
}

// ------------------------------------------------------------------ 9

Outcome simulator_arithmetic() {
  SimConfig cfg;
  cfg.seed = 99;
  const SimState state = build_topology(cfg, {});
  auto stub = StubClassifier::from_mix(cfg.attack_mix);
  const OverheadReport r = run_sim(state, stub);
  const double p = 1.0 - 1048575.0 / 1233057.0;
  const double sigma = std::sqrt(p * (1 - p) / static_cast<double>(r.packets));
  const bool ok = std::abs(r.response_time_overhead_pct - 0.2 / 1.5) < 1e-12 &&
                  r.per_vehicle_memory_kb == 13.0 &&
                  std::abs(r.model_update_kbps_per_vehicle - 13.0 / 3600.0) < 1e-15 &&
                  std::abs(r.forwarded_to_rsu_rate - p) <= 3 * sigma;
  return verdict(ok, "overhead " + fmt("%.4f%%", r.response_time_overhead_pct) + ", memory " +
                         fmt("%.0f KB", r.per_vehicle_memory_kb) + ", update " +
                         fmt("%.6f KB/s", r.model_update_kbps_per_vehicle) + ", forwarded " +
                         fmt("%.4f%%", 100 * r.forwarded_to_rsu_rate) + " (3 sigma " +
                         fmt("%.4f%%)", 300 * sigma));
}

// ------------------------------------------------------------------ 10

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

bool run_pipeline(const fs::path& dir) {
  const fs::path previous = fs::current_path();
  fs::current_path(dir);
  const std::vector<std::vector<std::string>> stages{
      {"--seed", "10", "synth", "--mix", "iov"},
      {"--seed", "10", "ingest", "--input", "synth.csv"},
      {"--seed", "10", "select"},
      {"--seed", "10", "train-eval", "--mode", "hier", "--features-file", "subset.txt"},
      {"--seed", "10", "train-eval", "--mode", "flat"},
      {"--seed", "10", "train-eval", "--mode", "fed"},
      {"--seed", "10", "simulate", "--duration", "600", "--model-bundle", "model_bundle.json"},
  };
  bool ok = true;
  std::ostringstream sink;
  for (const auto& args : stages) {
    if (run_cli(args, sink, sink) != kExitOk) {
      ok = false;
      break;
    }
  }
  fs::current_path(previous);
  return ok;
}

Outcome determinism() {
  hierids::testing::TempDir a, b;
  if (!run_pipeline(a.path()) || !run_pipeline(b.path())) return verdict(false, "a pipeline stage failed");
  std::size_t compared = 0;
  std::vector<std::string> differing;
  for (const auto& entry : fs::directory_iterator(a.path())) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("timing_", 0) == 0) continue;
    ++compared;
    if (!fs::exists(b.path() / name) || slurp(entry.path()) != slurp(b.path() / name)) {
      differing.push_back(name);
    }
  }
  std::string detail = std::to_string(compared) + " artifacts compared";
  for (const auto& d : differing) detail += ", differs: " + d;
  return verdict(differing.empty() && compared > 0, detail);
}

// ------------------------------------------------------------------ 11

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string env_or(const char* name, const char* fallback) {
  const char* v = std::getenv(name);
  return v && *v ? v : fallback;
}

Outcome real_dataset() {
  const char* path = std::getenv("HIERIDS_CICIOV2024");
  if (!path || !*path) return {Outcome::State::kSkip, "HIERIDS_CICIOV2024 not set"};

  FeatureSchema schema;
  schema.label_column = env_or("HIERIDS_CICIOV2024_LABEL", "specific_class");
  schema.ignore_columns = split_commas(env_or("HIERIDS_CICIOV2024_IGNORE", "label,category"));
  const Dataset full = minmax_scale(load_csv(path, schema)).first;

  // A stratified fold of the full set is a stratified subsample.
  const int parts = static_cast<int>((full.size() + 199999) / 200000);
  const Dataset ds =
      parts > 1 ? subset_rows(full, stratified_folds(full, parts, 0).test_indices(0)) : full;
  // Boruta runs on a further ~20k-row stratified sample to fit the budget.
  const int boruta_parts = static_cast<int>(ds.size() / 20000);
  const Dataset small =
      boruta_parts > 1 ? subset_rows(ds, stratified_folds(ds, boruta_parts, 1).test_indices(0)) : ds;

  const std::array<std::size_t, 3> sizes{11, 11, 18};
  HierConfig cfg;
  for (int level = 1; level <= 3; ++level) {
    BorutaConfig bc;
    bc.max_runs = 30;
    bc.forest.num_trees = 50;
    bc.seed = level;
    const auto labels = coarsen_labels(small.labels, LabelHierarchy::iov(), level);
    const BorutaResult br = boruta_run(small.records, labels, LabelHierarchy::iov().num_classes(level),
                                       small.schema.feature_names, bc);
    auto& lc = cfg.levels[level - 1];
    lc.features.assign(br.ranking.begin(),
                       br.ranking.begin() + std::min(sizes[level - 1], br.ranking.size()));
    lc.learner.kind = LearnerKind::kForest;
    lc.learner.forest.num_trees = 50;
    lc.learner.forest.seed = level;
  }
  const HierEvaluation hier = evaluate_hierarchy(ds, cfg, stratified_folds(ds, 10, 0));
  double lowest_f1 = 100.0;
  for (const auto& t : hier.levels) lowest_f1 = std::min(lowest_f1, t.weighted.f1);

  double lowest_acc = 100.0;
  for (int level = 1; level <= 3; ++level) {
    FedConfig fc;
    fc.seed = level;
    const FedRun run = run_federation(ds.records, ds.labels, level, cfg.levels[2].features, fc);
    lowest_acc = std::min(lowest_acc, run.rounds.back().metrics.accuracy);
  }
  return verdict(lowest_f1 >= 99.5 && lowest_acc >= 99.0,
                 std::to_string(ds.size()) + " rows, lowest hierarchy weighted-F1 " +
                     fmt("%.2f", lowest_f1) + ", lowest federated accuracy " + fmt("%.2f", lowest_acc));
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "metrics oracle", 5, metrics_oracle},
      {2, "stratified folds", 1, stratification},
      {3, "Boruta planted-feature recovery", 120, boruta_recovery},
      {4, "Gini split oracle", 10, gini_oracle},
      {5, "attribution additivity", 30, attribution_additivity},
      {6, "hierarchy on separable data", 120, hierarchy_separable},
      {7, "MLP gradient check", 30, gradient_check},
      {8, "FedAvg algebra", 60, fedavg_algebra},
      {9, "simulator arithmetic", 10, simulator_arithmetic},
      {10, "pipeline determinism", 300, determinism},
      {11, "CIC-IoV2024 reproduction", 1800, real_dataset},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {Outcome::State::kFail, std::string("threw: ") + e.what()};
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (o.state == Outcome::State::kPass && seconds > c.budget_s) {
      o.state = Outcome::State::kFail;
      o.detail += ", over the runtime budget";
    }
    const char* tag = o.state == Outcome::State::kPass   ? "PASS"
                      : o.state == Outcome::State::kSkip ? "SKIP"
                                                         : "FAIL";
    failures += o.state == Outcome::State::kFail;
    std::printf("%s criterion %d (%s): %s [%.2f s of %.0f s]\n", tag, c.id, c.name,
                o.detail.c_str(), seconds, c.budget_s);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
