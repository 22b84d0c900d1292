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

#include "hierids/cli.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <numeric>
#include <ostream>

#include <CLI11.hpp>

#include "hierids/attribution.hpp"
#include "hierids/boruta.hpp"
#include "hierids/classifier.hpp"
#include "hierids/dataset.hpp"
#include "hierids/deploysim.hpp"
#include "hierids/errors.hpp"
#include "hierids/fedsim.hpp"
#include "hierids/hierarchy.hpp"
#include "hierids/io.hpp"

namespace hierids {
namespace {

namespace fs = std::filesystem;

constexpr const char* kDatasetFile = "dataset.csv";
constexpr const char* kScalerFile = "scaler.json";

std::string snake(std::string flag) {
  for (char& c : flag) {
    if (c == '-') c = '_';
  }
  return flag;
}

// Options of one subcommand. After parsing, resolve() fills every variable
// that was not given on the command line from the config section and records
// the final values, so artifacts can echo a fully explicit configuration.
class OptionSet {
 public:
  explicit OptionSet(CLI::App* app) : app_(app) {}

  template <class T>
  CLI::Option* add(const std::string& flag, T& var, const std::string& help) {
    CLI::Option* opt = app_->add_option("--" + flag, var, help)->capture_default_str();
    const std::string key = snake(flag);
    resolvers_.push_back([opt, key, &var](const Json& section, Json& resolved) {
      if (opt->count() == 0 && section.contains(key)) var = section.at(key).template get<T>();
      resolved[key] = var;
    });
    return opt;
  }

  Json resolve(const Json& section) const {
    Json resolved = Json::object();
    for (const auto& r : resolvers_) r(section, resolved);
    return resolved;
  }

 private:
  CLI::App* app_;
  std::vector<std::function<void(const Json&, Json&)>> resolvers_;
};

struct Globals {
  std::string config_path;
  std::string out = ".";
  std::uint64_t seed = 0;
  CLI::Option* seed_opt = nullptr;
  Json config = Json::object();

  void load_config() {
    if (!config_path.empty()) config = read_json(config_path);
    if (!config.is_object()) throw ConfigError("config file must hold a JSON object");
  }

  // Flag, then config file, then HIERIDS_SEED, then 0.
  void resolve_seed() {
    if (seed_opt->count() > 0) return;
    if (config.contains("seed")) {
      seed = config.at("seed").get<std::uint64_t>();
      return;
    }
    if (const char* env = std::getenv("HIERIDS_SEED"); env && *env) {
      char* end = nullptr;
      const unsigned long long v = std::strtoull(env, &end, 10);
      if (*end != '\0') throw ConfigError(std::string("HIERIDS_SEED is not an integer: ") + env);
      seed = v;
    }
  }

  Json section(const std::string& name) const {
    if (config.contains(name)) return config.at(name);
    return Json::object();
  }

  fs::path out_dir() const {
    fs::create_directories(out);
    return fs::path(out);
  }
};

double elapsed_seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

Dataset load_artifact_dataset(const std::string& dir) {
  FeatureSchema schema;
  schema.feature_kind = FeatureKind::kUnitInterval;
  return load_csv(fs::path(dir) / kDatasetFile, schema);
}

std::vector<std::size_t> feature_indices(const Dataset& ds, const std::vector<std::string>& names) {
  std::map<std::string, std::size_t> lookup;
  for (std::size_t j = 0; j < ds.schema.feature_names.size(); ++j) {
    lookup.emplace(ds.schema.feature_names[j], j);
  }
  std::vector<std::size_t> out;
  for (const auto& name : names) {
    auto it = lookup.find(name);
    if (it == lookup.end()) throw SchemaError("unknown feature in feature list: " + name);
    out.push_back(it->second);
  }
  return out;
}

std::vector<std::size_t> read_feature_file(const Dataset& ds, const std::string& path) {
  if (path.empty()) {
    std::vector<std::size_t> all(ds.num_features());
    std::iota(all.begin(), all.end(), std::size_t{0});
    return all;
  }
  std::vector<std::string> names;
  for (auto& line : read_lines(path)) {
    if (!line.empty() && line.front() != '#') names.push_back(line);
  }
  if (names.empty()) throw ConfigError("feature file lists no features: " + path);
  return feature_indices(ds, names);
}

void print_table(std::ostream& out, const std::string& title, const MetricTable& t) {
  char buf[160];
  out << title << '\n';
  std::snprintf(buf, sizeof(buf), "  %-26s %9s %9s %9s %9s\n", "class", "precision", "recall",
                "f1", "support");
  out << buf;
  for (std::size_t c = 0; c < t.classes.size(); ++c) {
    const auto& m = t.per_class[c];
    std::snprintf(buf, sizeof(buf), "  %-26s %9.2f %9.2f %9.2f %9zu\n", t.classes[c].c_str(),
                  m.precision, m.recall, m.f1, m.support);
    out << buf;
  }
  std::snprintf(buf, sizeof(buf), "  %-26s %9.2f %9.2f %9.2f\n", "macro avg", t.macro.precision,
                t.macro.recall, t.macro.f1);
  out << buf;
  std::snprintf(buf, sizeof(buf), "  %-26s %9.2f %9.2f %9.2f\n", "weighted avg",
                t.weighted.precision, t.weighted.recall, t.weighted.f1);
  out << buf;
  std::snprintf(buf, sizeof(buf), "  %-26s %9.2f\n", "accuracy", t.accuracy);
  out << buf;
}

// ---------------------------------------------------------------- ingest

struct IngestArgs {
  std::string input;
  std::string schema;
  std::string label_column = "label";
  std::string feature_kind = "binary";
  std::string scale = "on";
};

void add_ingest(IngestArgs& a, OptionSet& opts) {
  opts.add("input", a.input, "Traffic CSV to ingest");
  opts.add("schema", a.schema, "JSON schema (feature_names, label_column, ignore_columns)");
  opts.add("label-column", a.label_column, "Name of the label column");
  opts.add("feature-kind", a.feature_kind, "binary or real")
      ->check(CLI::IsMember({"binary", "real"}));
  opts.add("scale", a.scale, "Min-max scaling on or off")->check(CLI::IsMember({"on", "off"}));
}

int run_ingest(const IngestArgs& a, const Json& resolved, const Globals& g, std::ostream& out) {
  if (a.input.empty()) throw ConfigError("ingest needs --input");
  FeatureSchema schema;
  if (!a.schema.empty()) {
    const Json doc = read_json(a.schema);
    schema.feature_names = doc.value("feature_names", std::vector<std::string>{});
    schema.label_column = doc.value("label_column", a.label_column);
    schema.ignore_columns = doc.value("ignore_columns", std::vector<std::string>{});
  } else {
    schema.label_column = a.label_column;
  }
  schema.feature_kind = a.feature_kind == "binary" ? FeatureKind::kBinary : FeatureKind::kUnitInterval;
  const Dataset raw = load_csv(a.input, schema);

  Dataset scaled;
  ScalerParams params;
  if (a.scale == "on") {
    std::tie(scaled, params) = minmax_scale(raw);
  } else {
    scaled = raw;
    params = identity_scaler(raw.num_features());
  }
  const fs::path dir = g.out_dir();
  write_csv(dir / kDatasetFile, scaled);
  write_json(dir / kScalerFile, Json{{"config", resolved},
                                     {"feature_names", scaled.schema.feature_names},
                                     {"x_min", params.x_min},
                                     {"x_max", params.x_max}});

  const auto& h = LabelHierarchy::iov();
  const auto counts = class_counts(scaled.labels, h.num_fine());
  Json classes = Json::array();
  char buf[128];
  out << "records " << scaled.size() << ", features " << scaled.num_features() << '\n';
  std::snprintf(buf, sizeof(buf), "  %-26s %10s %8s\n", "class", "count", "percent");
  out << buf;
  for (int c = 0; c < h.num_fine(); ++c) {
    const double pct = 100.0 * static_cast<double>(counts[c]) / static_cast<double>(scaled.size());
    classes.push_back({{"class", h.fine_name(c)}, {"count", counts[c]}, {"percent", pct}});
    std::snprintf(buf, sizeof(buf), "  %-26s %10zu %8.2f\n", h.fine_name(c).c_str(), counts[c], pct);
    out << buf;
  }
  write_json(dir / "summary.json", Json{{"config", resolved},
                                       {"records", scaled.size()},
                                       {"features", scaled.num_features()},
                                       {"classes", classes}});
  return kExitOk;
}

// ----------------------------------------------------------------- synth

struct SynthArgs {
  std::size_t records = 2000;
  std::size_t features = 20;
  std::size_t informative_per_class = 1;
  double bias = 1.0;
  std::string mix = "uniform";
};

void add_synth(SynthArgs& a, OptionSet& opts) {
  opts.add("records", a.records, "Number of records");
  opts.add("features", a.features, "Number of binary features");
  opts.add("informative-per-class", a.informative_per_class,
           "Planted features per fine class (features 0.. in class order)");
  opts.add("bias", a.bias, "P(feature = 1) for a planted feature inside its class");
  opts.add("mix", a.mix, "Class mix: uniform or iov")->check(CLI::IsMember({"uniform", "iov"}));
}

int run_synth(const SynthArgs& a, const Json& resolved, const Globals& g, std::ostream& out) {
  const int classes = LabelHierarchy::iov().num_fine();
  SynthSpec spec;
  spec.n_records = a.records;
  spec.n_features = a.features;
  spec.class_mix = a.mix == "iov" ? iov_class_mix() : std::vector<double>(classes, 1.0 / classes);
  for (int c = 0; c < classes; ++c) {
    for (std::size_t j = 0; j < a.informative_per_class; ++j) {
      spec.informative.push_back({c * a.informative_per_class + j, c, a.bias});
    }
  }
  const Dataset ds = synth_generate(spec, derive_seed(g.seed, "synth"));
  const fs::path dir = g.out_dir();
  write_csv(dir / "synth.csv", ds);
  write_json(dir / "synth.json", Json{{"config", resolved}, {"seed", g.seed}});
  out << "wrote " << ds.size() << " synthetic records to " << (dir / "synth.csv").string() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- select

struct SelectArgs {
  std::string data;
  int level = 3;
  int max_runs = 100;
  std::size_t trees = 100;
  int max_depth = kUnlimitedDepth;
  std::size_t budget = 0;
  int k = 10;
  double epsilon = 0.05;
  int patience = 3;
  double target_slack = 0.0;
  int target_class = 1;
  std::size_t attribution_rows = 1000;
};

void add_select(SelectArgs& a, OptionSet& opts) {
  opts.add("data", a.data, "Directory holding the ingested dataset (default: --out)");
  opts.add("level", a.level, "Hierarchy level to select for (1, 2 or 3)")
      ->check(CLI::Range(1, 3));
  opts.add("max-runs", a.max_runs, "Boruta iteration cap");
  opts.add("trees", a.trees, "Trees per forest");
  opts.add("max-depth", a.max_depth, "Tree depth cap (-1 = unlimited)");
  opts.add("budget", a.budget, "Largest subset to consider (0 = all features)");
  opts.add("k", a.k, "Cross-validation folds for subset scoring");
  opts.add("epsilon", a.epsilon, "Minimum weighted-F1 gain (points) to accept a feature");
  opts.add("patience", a.patience, "Non-improving ranks before switching to probing");
  opts.add("target-slack", a.target_slack, "Stop once weighted F1 >= 100 - slack");
  opts.add("target-class", a.target_class, "Class whose attributions flag features");
  opts.add("attribution-rows", a.attribution_rows, "Records used for the attribution report");
}

ForestParams forest_params(std::size_t trees, int max_depth, std::uint64_t seed) {
  ForestParams p;
  p.num_trees = trees;
  p.max_depth = max_depth;
  p.seed = seed;
  return p;
}

int run_select(SelectArgs a, const Json& resolved, const Globals& g, std::ostream& out) {
  const Dataset ds = load_artifact_dataset(a.data.empty() ? g.out : a.data);
  const auto& h = LabelHierarchy::iov();
  const int classes = h.num_classes(a.level);
  const auto y = coarsen_labels(ds.labels, h, a.level);
  const std::size_t budget = a.budget == 0 ? ds.num_features() : a.budget;
  if (a.target_class < 0 || a.target_class >= classes) {
    throw ConfigError("--target-class is out of range for the level");
  }

  BorutaConfig bc;
  bc.max_runs = a.max_runs;
  bc.forest = forest_params(a.trees, a.max_depth, 0);
  bc.seed = derive_seed(g.seed, "select_boruta");
  const BorutaResult boruta = boruta_run(ds.records, y, classes, ds.schema.feature_names, bc);
  const auto ranking = boruta.ranking;

  std::size_t confirmed = 0;
  std::vector<std::string> ranking_lines;
  for (std::size_t f : ranking) {
    if (boruta.status[f] == FeatureStatus::kConfirmed) ++confirmed;
    ranking_lines.push_back(ds.schema.feature_names[f]);
  }

  // Attribution over the whole feature set on a seeded record sample.
  const ForestModel forest =
      fit_forest(ds.records, y, classes,
                 forest_params(a.trees, a.max_depth, derive_seed(g.seed, "select_attribution")));
  std::vector<std::size_t> sample(ds.size());
  std::iota(sample.begin(), sample.end(), std::size_t{0});
  if (sample.size() > a.attribution_rows) {
    Rng rng = make_rng(g.seed, "select_attribution_rows");
    std::shuffle(sample.begin(), sample.end(), rng);
    sample.resize(a.attribution_rows);
    std::sort(sample.begin(), sample.end());
  }
  const AttributionReport attr =
      attribution_report(forest, ds.records.select_rows(sample), a.target_class,
                         ds.schema.feature_names, h.class_names(a.level));

  SubsetSearchConfig sc;
  sc.epsilon = a.epsilon;
  sc.patience = a.patience;
  sc.target_slack = a.target_slack;
  sc.forest = forest_params(a.trees, a.max_depth, 0);
  sc.seed = derive_seed(g.seed, "select_search");
  sc.flagged_negative = attr.flagged_negative;
  const SubsetSearchResult search =
      guided_subset_search(ranking, ds.records, ds.labels, a.level, budget, a.k, sc);

  std::vector<std::string> subset;
  for (std::size_t f : search.selected) subset.push_back(ds.schema.feature_names[f]);

  const fs::path dir = g.out_dir();
  write_lines(dir / "ranking.txt", ranking_lines);
  Json bj = to_json(boruta, bc);
  bj["config"] = resolved;
  write_json(dir / "boruta.json", bj);
  Json aj = to_json(attr);
  aj["config"] = resolved;
  write_json(dir / "attribution.json", aj);
  write_lines(dir / "subset.txt", subset);
  Json sj = to_json(search, ds.schema.feature_names);
  sj["config"] = resolved;
  write_json(dir / "subset.json", sj);
  write_file_atomic(dir / "trace.csv", trace_csv(search, ds.schema.feature_names));

  out << "level " << a.level << ": " << confirmed << " confirmed of " << ds.num_features()
      << " features after " << boruta.runs() << " runs\n";
  out << "subset of " << subset.size() << " features, weighted F1 "
      << search.best_weighted_f1 << (search.reached_target ? "" : " (target not reached)") << '\n';
  for (const auto& name : subset) out << "  " << name << '\n';
  return kExitOk;
}

// ------------------------------------------------------------ train-eval

struct TrainEvalArgs {
  std::string data;
  std::string mode = "hier";
  std::string learner = "forest";
  std::size_t trees = 100;
  int max_depth = kUnlimitedDepth;
  int logistic_epochs = 300;
  double logistic_lr = 0.5;
  std::string features_file;
  std::string features_l1;
  std::string features_l2;
  std::string features_l3;
  int k = 10;
  std::string routing = "routed";
  int level = 3;
  int clients = 10;
  int rounds = 5;
  int epochs = 50;
  std::size_t batch = 25;
  double lr = 1e-3;
  std::vector<std::size_t> hidden = {64, 32, 16};
  double dropout = 0.2;
  double test_fraction = 0.2;
};

void add_train_eval(TrainEvalArgs& a, OptionSet& opts) {
  opts.add("data", a.data, "Directory holding the ingested dataset (default: --out)");
  opts.add("mode", a.mode, "hier, flat or fed")->check(CLI::IsMember({"hier", "flat", "fed"}));
  opts.add("learner", a.learner, "forest, extra-trees, tree or logistic");
  opts.add("trees", a.trees, "Trees per forest");
  opts.add("max-depth", a.max_depth, "Tree depth cap (-1 = unlimited)");
  opts.add("logistic-epochs", a.logistic_epochs, "Gradient-descent epochs for logistic");
  opts.add("logistic-lr", a.logistic_lr, "Learning rate for logistic");
  opts.add("features-file", a.features_file, "Feature names, one per line (default: all)");
  opts.add("features-l1", a.features_l1, "Level-1 feature file (overrides --features-file)");
  opts.add("features-l2", a.features_l2, "Level-2 feature file (overrides --features-file)");
  opts.add("features-l3", a.features_l3, "Level-3 feature file (overrides --features-file)");
  opts.add("k", a.k, "Stratified cross-validation folds");
  opts.add("routing", a.routing, "routed or full-cascade")
      ->check(CLI::IsMember({"routed", "full-cascade"}));
  opts.add("level", a.level, "Label level for the federated run")->check(CLI::Range(1, 3));
  opts.add("clients", a.clients, "Federated clients");
  opts.add("rounds", a.rounds, "Communication rounds");
  opts.add("epochs", a.epochs, "Local epochs per round");
  opts.add("batch", a.batch, "Local minibatch size");
  opts.add("lr", a.lr, "Adam learning rate");
  opts.add("hidden", a.hidden, "Hidden layer widths");
  opts.add("dropout", a.dropout, "Dropout rate on hidden layers");
  opts.add("test-fraction", a.test_fraction, "Held-out fraction for the federated run");
}

LearnerSpec learner_spec(const TrainEvalArgs& a, std::uint64_t seed) {
  LearnerSpec spec;
  spec.kind = parse_learner_kind(a.learner);
  spec.forest = forest_params(a.trees, a.max_depth, seed);
  spec.logistic.epochs = a.logistic_epochs;
  spec.logistic.learning_rate = a.logistic_lr;
  spec.logistic.seed = seed;
  return spec;
}

void write_metrics(const fs::path& dir, const std::string& mode,
                   const std::vector<std::pair<std::string, MetricTable>>& tables, Json doc,
                   const Json& resolved) {
  doc["config"] = resolved;
  write_json(dir / ("metrics_" + mode + ".json"), doc);
  write_file_atomic(dir / ("metrics_" + mode + ".csv"), metric_tables_long_csv(tables));
}

int run_train_eval(const TrainEvalArgs& a, const Json& resolved, const Globals& g,
                   std::ostream& out) {
  const std::string data_dir = a.data.empty() ? g.out : a.data;
  const Dataset ds = load_artifact_dataset(data_dir);
  const fs::path dir = g.out_dir();

  if (a.mode == "fed") {
    FedConfig fc;
    fc.n_clients = a.clients;
    fc.rounds = a.rounds;
    fc.local_epochs = a.epochs;
    fc.batch_size = a.batch;
    fc.learning_rate = a.lr;
    fc.hidden = a.hidden;
    fc.dropout = a.dropout;
    fc.test_fraction = a.test_fraction;
    fc.seed = derive_seed(g.seed, "train_eval_fed");
    const auto features = read_feature_file(ds, a.features_file);
    const auto start = std::chrono::steady_clock::now();
    const FedRun run = run_federation(ds.records, ds.labels, a.level, features, fc);
    const double seconds = elapsed_seconds(start);
    Json fj = to_json(run);
    fj["config"] = resolved;
    write_json(dir / "fedrun.json", fj);
    write_file_atomic(dir / "fedrun.csv", round_log_csv(run));
    const MetricTable& last = run.rounds.back().metrics;
    write_metrics(dir, "fed", {{"level" + std::to_string(a.level), last}},
                  Json{{"level", a.level}, {"metrics", to_json(last)}}, resolved);
    write_json(dir / "timing_fed.json", Json{{"setting", "federated"}, {"total_seconds", seconds}});
    print_table(out, "federated, level " + std::to_string(a.level) + ", round " +
                         std::to_string(run.rounds.back().round),
                last);
    return kExitOk;
  }

  const FoldAssignment folds = stratified_folds(ds, a.k, derive_seed(g.seed, "train_eval_folds"));
  for (const auto& w : folds.warnings) out << "warning: " << w << '\n';
  const LearnerSpec learner = learner_spec(a, derive_seed(g.seed, "train_eval_learner"));

  if (a.mode == "flat") {
    const auto features = read_feature_file(ds, a.features_file);
    const FlatEvaluation eval = flat_baseline(ds, learner, features, folds);
    write_metrics(dir, "flat", {{"flat", eval.table}}, Json{{"metrics", to_json(eval.table)}},
                  resolved);
    write_json(dir / "timing_flat.json", to_json(eval.timing));
    print_table(out, "flat classifier", eval.table);
    return kExitOk;
  }

  HierConfig hc;
  hc.mode = a.routing == "routed" ? RoutingMode::kRouted : RoutingMode::kFullCascade;
  const std::string* per_level[3] = {&a.features_l1, &a.features_l2, &a.features_l3};
  for (int l = 0; l < 3; ++l) {
    hc.levels[l].learner = learner;
    hc.levels[l].features =
        read_feature_file(ds, per_level[l]->empty() ? a.features_file : *per_level[l]);
  }
  const HierEvaluation eval = evaluate_hierarchy(ds, hc, folds);
  for (const auto& w : eval.warnings) out << "warning: " << w << '\n';
  Json ej = to_json(eval);
  ej["hierarchy"] = to_json(hc, ds.schema.feature_names);
  write_metrics(dir, "hier",
                {{"level1", eval.levels[0]},
                 {"level2", eval.levels[1]},
                 {"level3", eval.levels[2]},
                 {"routed", eval.routed}},
                ej, resolved);
  write_json(dir / "timing_hier.json", to_json(eval.timing));

  std::vector<std::size_t> all(ds.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  HierModel bundle = train_hierarchy(ds, hc, all);
  if (fs::exists(fs::path(data_dir) / kScalerFile)) {
    const Json sj = read_json(fs::path(data_dir) / kScalerFile);
    bundle.scaler.x_min = sj.at("x_min").get<std::vector<double>>();
    bundle.scaler.x_max = sj.at("x_max").get<std::vector<double>>();
  }
  Json bj = hier_model_to_json(bundle);
  bj["config"] = resolved;
  write_json(dir / "model_bundle.json", bj);

  static const char* titles[3] = {"level 1 (benign / attack)", "level 2 (benign / dos / spoofing)",
                                  "level 3 (fine classes)"};
  for (int l = 0; l < 3; ++l) print_table(out, titles[l], eval.levels[l]);
  print_table(out, "routed pipeline", eval.routed);
  out << "routed disagreement rate " << eval.disagreement_rate << '\n';
  return kExitOk;
}

// -------------------------------------------------------------- simulate

struct SimulateArgs {
  double duration = 3600.0;
  double density = 180.0;
  double road_length = 1.0;
  double stub_attack_rate = -1.0;
  std::string stub_mode = "bernoulli";
  std::string model_bundle;
  std::string data;
  std::size_t vehicles_per_rsu = 30;
  std::size_t rsus_per_edge = 3;
  std::size_t rsu_count = 0;
  std::vector<double> sweep_densities;
  std::vector<double> sweep_durations;
};

struct SimulateOptions {
  CLI::Option* duration = nullptr;
  CLI::Option* density = nullptr;
  CLI::Option* road_length = nullptr;
};

void add_simulate(CLI::App& app, SimulateArgs& a, OptionSet& opts, SimulateOptions& so) {
  so.duration = app.add_option("--duration", a.duration, "Simulated seconds");
  so.density = app.add_option("--density", a.density, "Vehicles per km");
  so.road_length = app.add_option("--road-length", a.road_length, "Road length in km");
  opts.add("stub-attack-rate", a.stub_attack_rate,
           "Stub P(attack); negative derives it from the attack mix");
  opts.add("stub-mode", a.stub_mode, "bernoulli or quota")
      ->check(CLI::IsMember({"bernoulli", "quota"}));
  opts.add("model-bundle", a.model_bundle, "Trained hierarchy to classify sampled records");
  opts.add("data", a.data, "Dataset directory supplying records for --model-bundle");
  opts.add("vehicles-per-rsu", a.vehicles_per_rsu, "Vehicles attached to one RSU");
  opts.add("rsus-per-edge", a.rsus_per_edge, "RSUs attached to one near-edge node");
  opts.add("rsu-count", a.rsu_count, "Fixed RSU count (0 = derive from vehicles-per-rsu)");
  opts.add("sweep-densities", a.sweep_densities, "Densities for a sweep table");
  opts.add("sweep-durations", a.sweep_durations, "Durations for a sweep table");
}

int run_simulate(const SimulateArgs& a, const SimulateOptions& so, Json resolved,
                 const Globals& g, std::ostream& out) {
  // The network parameters live under "simulate" or, for a bare network
  // document, at the top level.
  const Json& doc = g.config.contains("simulate") ? g.config.at("simulate") : g.config;
  SimConfig cfg = sim_config_from_json(doc);
  if (so.duration->count()) cfg.duration_s = a.duration;
  if (so.density->count()) cfg.density_veh_per_km = a.density;
  if (so.road_length->count()) cfg.road_length_km = a.road_length;
  cfg.seed = derive_seed(g.seed, "simulate");
  TierTopology topo{a.vehicles_per_rsu, a.rsus_per_edge, a.rsu_count};

  std::unique_ptr<TrafficClassifier> classifier;
  Dataset pool;
  HierModel model;
  if (!a.model_bundle.empty()) {
    model = hier_model_from_json(read_json(a.model_bundle));
    pool = load_artifact_dataset(a.data.empty() ? g.out : a.data);
    cfg.record_features = pool.num_features();
    classifier = std::make_unique<ModelClassifier>(model, pool);
  } else {
    const StubMode mode = a.stub_mode == "quota" ? StubMode::kQuota : StubMode::kBernoulli;
    StubClassifier stub = StubClassifier::from_mix(cfg.attack_mix, mode);
    if (a.stub_attack_rate >= 0.0) {
      const auto& m = cfg.attack_mix;
      stub = StubClassifier(a.stub_attack_rate, stub.p_spoofing_given_attack(),
                            {m[2], m[3], m[4], m[5]}, mode);
    }
    classifier = std::make_unique<StubClassifier>(stub);
  }
  const SimState state = build_topology(cfg, topo);
  const OverheadReport report = run_sim(state, *classifier);

  resolved["network"] = to_json(cfg);
  resolved["topology"] = to_json(topo);
  const fs::path dir = g.out_dir();
  write_json(dir / "overhead.json", Json{{"config", resolved}, {"report", to_json(report)}});
  write_file_atomic(dir / "overhead.csv", overhead_csv(report));

  if (!a.sweep_densities.empty() || !a.sweep_durations.empty()) {
    SweepRanges ranges;
    ranges.densities = a.sweep_densities.empty() ? std::vector<double>{cfg.density_veh_per_km}
                                                  : a.sweep_densities;
    ranges.durations =
        a.sweep_durations.empty() ? std::vector<double>{cfg.duration_s} : a.sweep_durations;
    ranges.attack_mixes = {{"config", cfg.attack_mix}};
    write_file_atomic(dir / "sweep.csv", sweep_csv(sweep(cfg, topo, ranges)));
  }

  char buf[160];
  std::snprintf(buf, sizeof(buf), "vehicles %zu, rsus %zu, near-edge nodes %zu, packets %llu\n",
                report.vehicles, report.rsus, report.edges,
                static_cast<unsigned long long>(report.packets));
  out << buf;
  std::snprintf(buf, sizeof(buf), "forwarded to rsu %.4f%%, to near-edge %llu messages\n",
                100.0 * report.forwarded_to_rsu_rate,
                static_cast<unsigned long long>(report.edge.messages));
  out << buf;
  std::snprintf(buf, sizeof(buf), "response-time overhead %.4f%%, per-vehicle memory %.3g KB\n",
                report.response_time_overhead_pct, report.per_vehicle_memory_kb);
  out << buf;
  std::snprintf(buf, sizeof(buf), "model updates %.6f KB/s per vehicle, %llu pushes per node\n",
                report.model_update_kbps_per_vehicle,
                static_cast<unsigned long long>(report.model_pushes_per_node));
  out << buf;
  return kExitOk;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hierarchical intrusion detection pipeline for vehicular traffic", "hierids"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config_path, "JSON config; command-line flags take precedence");
  app.add_option("--out", g.out, "Output directory")->capture_default_str();
  g.seed_opt = app.add_option("--seed", g.seed, "Root seed (fallback: HIERIDS_SEED)");

  auto* ingest = app.add_subcommand("ingest", "Load, validate and scale a traffic CSV");
  IngestArgs ingest_args;
  OptionSet ingest_opts(ingest);
  add_ingest(ingest_args, ingest_opts);

  auto* synth = app.add_subcommand("synth", "Generate a synthetic traffic CSV");
  SynthArgs synth_args;
  OptionSet synth_opts(synth);
  add_synth(synth_args, synth_opts);

  auto* select = app.add_subcommand("select", "Boruta ranking and guided subset search");
  SelectArgs select_args;
  OptionSet select_opts(select);
  add_select(select_args, select_opts);

  auto* train = app.add_subcommand("train-eval", "Cross-validated hierarchical, flat or federated run");
  TrainEvalArgs train_args;
  OptionSet train_opts(train);
  add_train_eval(train_args, train_opts);

  auto* simulate = app.add_subcommand("simulate", "Tiered deployment overhead simulation");
  SimulateArgs sim_args;
  SimulateOptions sim_flags;
  OptionSet sim_opts(simulate);
  add_simulate(*simulate, sim_args, sim_opts, sim_flags);

  std::vector<const char*> argv{"hierids"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  g.load_config();
  g.resolve_seed();
  auto resolved_for = [&](const OptionSet& opts, const char* section) {
    Json r = opts.resolve(g.section(section));
    r["seed"] = g.seed;
    return r;
  };
  if (ingest->parsed()) {
    return run_ingest(ingest_args, resolved_for(ingest_opts, "ingest"), g, out);
  }
  if (synth->parsed()) {
    return run_synth(synth_args, resolved_for(synth_opts, "synth"), g, out);
  }
  if (select->parsed()) {
    return run_select(select_args, resolved_for(select_opts, "select"), g, out);
  }
  if (train->parsed()) {
    return run_train_eval(train_args, resolved_for(train_opts, "train_eval"), g, out);
  }
  return run_simulate(sim_args, sim_flags, resolved_for(sim_opts, "simulate"), g, out);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(args, out, err);
  } catch (const SchemaError& e) {
    err << "schema error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const EmptyInputError& e) {
    err << "empty input: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const nlohmann::json::exception& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace hierids
