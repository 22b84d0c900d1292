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

#include "hierids/metrics.hpp"

#include <cstdio>
#include <numeric>

#include "hierids/errors.hpp"

namespace hierids {

std::size_t ConfusionMatrix::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::size_t{0});
}

ConfusionMatrix confusion(std::span<const int> y_true, std::span<const int> y_pred,
                          std::vector<std::string> classes) {
  if (y_true.size() != y_pred.size()) {
    throw DimensionError("y_true has " + std::to_string(y_true.size()) +
                         " entries, y_pred has " + std::to_string(y_pred.size()));
  }
  const int k = static_cast<int>(classes.size());
  ConfusionMatrix cm;
  cm.classes = std::move(classes);
  cm.counts.assign(cm.classes.size() * cm.classes.size(), 0);
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const int t = y_true[i];
    const int p = y_pred[i];
    if (t < 0 || t >= k || p < 0 || p >= k) {
      throw SchemaError("label outside the class list at position " + std::to_string(i));
    }
    ++cm.counts[static_cast<std::size_t>(t) * k + p];
  }
  return cm;
}

MetricTable metric_table(const ConfusionMatrix& cm) {
  const std::size_t k = cm.num_classes();
  const std::size_t total = cm.total();
  MetricTable t;
  t.classes = cm.classes;
  t.per_class.resize(k);
  t.support = total;

  std::size_t correct = 0;
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t tp = cm.at(c, c);
    std::size_t predicted = 0;
    std::size_t actual = 0;
    for (std::size_t o = 0; o < k; ++o) {
      predicted += cm.at(o, c);
      actual += cm.at(c, o);
    }
    correct += tp;
    auto& m = t.per_class[c];
    m.support = actual;
    m.degenerate = predicted == 0 || actual == 0;
    const double p = predicted ? static_cast<double>(tp) / predicted : 0.0;
    const double r = actual ? static_cast<double>(tp) / actual : 0.0;
    m.precision = 100.0 * p;
    m.recall = 100.0 * r;
    m.f1 = (p + r) > 0.0 ? 100.0 * (2.0 * p * r / (p + r)) : 0.0;
  }
  t.accuracy = total ? 100.0 * static_cast<double>(correct) / total : 0.0;

  for (const auto& m : t.per_class) {
    t.macro.precision += m.precision;
    t.macro.recall += m.recall;
    t.macro.f1 += m.f1;
    if (total) {
      const double w = static_cast<double>(m.support) / total;
      t.weighted.precision += w * m.precision;
      t.weighted.recall += w * m.recall;
      t.weighted.f1 += w * m.f1;
    }
  }
  if (k) {
    t.macro.precision /= k;
    t.macro.recall /= k;
    t.macro.f1 /= k;
  }
  return t;
}

MetricTable cv_aggregate(std::span<const MetricTable> tables) {
  if (tables.empty()) throw ConfigError("cv_aggregate needs at least one table");
  MetricTable out;
  out.classes = tables[0].classes;
  out.per_class.resize(out.classes.size());
  const double n = static_cast<double>(tables.size());
  for (const auto& t : tables) {
    if (t.classes != out.classes) throw SchemaError("fold tables have different class lists");
    for (std::size_t c = 0; c < out.classes.size(); ++c) {
      auto& o = out.per_class[c];
      const auto& m = t.per_class[c];
      o.precision += m.precision / n;
      o.recall += m.recall / n;
      o.f1 += m.f1 / n;
      o.support += m.support;
      o.degenerate = o.degenerate || m.degenerate;
    }
    out.accuracy += t.accuracy / n;
    out.macro.precision += t.macro.precision / n;
    out.macro.recall += t.macro.recall / n;
    out.macro.f1 += t.macro.f1 / n;
    out.weighted.precision += t.weighted.precision / n;
    out.weighted.recall += t.weighted.recall / n;
    out.weighted.f1 += t.weighted.f1 / n;
    out.support += t.support;
  }
  return out;
}

Json to_json(const ConfusionMatrix& cm) {
  Json rows = Json::array();
  for (std::size_t t = 0; t < cm.num_classes(); ++t) {
    Json row = Json::array();
    for (std::size_t p = 0; p < cm.num_classes(); ++p) row.push_back(cm.at(t, p));
    rows.push_back(row);
  }
  return Json{{"classes", cm.classes}, {"counts", rows}};
}

Json to_json(const MetricTable& t) {
  Json per_class = Json::array();
  for (std::size_t c = 0; c < t.classes.size(); ++c) {
    const auto& m = t.per_class[c];
    per_class.push_back({{"class", t.classes[c]},
                         {"precision", m.precision},
                         {"recall", m.recall},
                         {"f1", m.f1},
                         {"support", m.support},
                         {"degenerate", m.degenerate}});
  }
  auto avg = [](const AverageMetrics& a) {
    return Json{{"precision", a.precision}, {"recall", a.recall}, {"f1", a.f1}};
  };
  return Json{{"accuracy", t.accuracy},
              {"per_class", per_class},
              {"macro_avg", avg(t.macro)},
              {"weighted_avg", avg(t.weighted)},
              {"support", t.support}};
}

namespace {

std::string fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

std::string metric_tables_csv(const std::vector<std::pair<std::string, MetricTable>>& tables) {
  if (tables.empty()) return {};
  const auto& classes = tables.front().second.classes;
  std::string out = "class";
  for (const auto& [name, t] : tables) {
    if (t.classes != classes) throw SchemaError("tables have different class lists");
    out += "," + csv_escape(name + " precision") + "," + csv_escape(name + " recall") + "," +
           csv_escape(name + " f1");
  }
  out += ",support\n";
  for (std::size_t c = 0; c < classes.size(); ++c) {
    out += csv_escape(classes[c]);
    for (const auto& [name, t] : tables) {
      const auto& m = t.per_class[c];
      out += "," + fmt2(m.precision) + "," + fmt2(m.recall) + "," + fmt2(m.f1);
    }
    out += "," + std::to_string(tables.front().second.per_class[c].support) + "\n";
  }
  auto avg_row = [&](const char* label, auto pick) {
    out += label;
    for (const auto& [name, t] : tables) {
      const AverageMetrics& a = pick(t);
      out += "," + fmt2(a.precision) + "," + fmt2(a.recall) + "," + fmt2(a.f1);
    }
    out += "," + std::to_string(tables.front().second.support) + "\n";
  };
  avg_row("macro avg", [](const MetricTable& t) -> const AverageMetrics& { return t.macro; });
  avg_row("weighted avg",
          [](const MetricTable& t) -> const AverageMetrics& { return t.weighted; });
  out += "accuracy";
  for (const auto& [name, t] : tables) out += ",,," + fmt2(t.accuracy);
  out += "," + std::to_string(tables.front().second.support) + "\n";
  return out;
}

std::string metric_tables_long_csv(
    const std::vector<std::pair<std::string, MetricTable>>& tables) {
  std::string out = "table,class,precision,recall,f1,support\n";
  for (const auto& [name, t] : tables) {
    const std::string prefix = csv_escape(name) + ",";
    for (std::size_t c = 0; c < t.classes.size(); ++c) {
      const auto& m = t.per_class[c];
      out += prefix + csv_escape(t.classes[c]) + "," + fmt2(m.precision) + "," +
             fmt2(m.recall) + "," + fmt2(m.f1) + "," + std::to_string(m.support) + "\n";
    }
    out += prefix + "macro avg," + fmt2(t.macro.precision) + "," + fmt2(t.macro.recall) + "," +
           fmt2(t.macro.f1) + "," + std::to_string(t.support) + "\n";
    out += prefix + "weighted avg," + fmt2(t.weighted.precision) + "," +
           fmt2(t.weighted.recall) + "," + fmt2(t.weighted.f1) + "," +
           std::to_string(t.support) + "\n";
    out += prefix + "accuracy,,," + fmt2(t.accuracy) + "," + std::to_string(t.support) + "\n";
  }
  return out;
}

}  // namespace hierids
