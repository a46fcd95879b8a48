#include "hcg/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "hcg/error.hpp"

namespace hcg {

std::size_t ConfusionMatrix::total() const {
  std::size_t n = 0;
  for (const auto& row : counts) {
    for (std::size_t v : row) n += v;
  }
  return n;
}

ConfusionMatrix confusion(const std::vector<std::size_t>& pred,
                          const std::vector<std::size_t>& truth, std::size_t num_classes) {
  if (pred.size() != truth.size()) {
    throw DimensionError("confusion: " + std::to_string(pred.size()) + " predictions vs " +
                         std::to_string(truth.size()) + " labels");
  }
  ConfusionMatrix cm;
  cm.counts.assign(num_classes, std::vector<std::size_t>(num_classes, 0));
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (truth[i] >= num_classes || pred[i] >= num_classes) {
      throw ValueError("confusion: label out of range at index " + std::to_string(i));
    }
    ++cm.counts[truth[i]][pred[i]];
  }
  return cm;
}

MetricsReport compute_metrics(const ConfusionMatrix& cm) {
  const std::size_t n = cm.classes();
  const std::size_t total = cm.total();
  if (total == 0) throw ValueError("metrics: empty confusion matrix");
  MetricsReport rep;
  std::size_t trace = 0;
  for (std::size_t c = 0; c < n; ++c) trace += cm.counts[c][c];
  rep.accuracy = static_cast<double>(trace) / static_cast<double>(total);
  rep.per_class.resize(n);
  for (std::size_t c = 0; c < n; ++c) {
    const std::size_t tp = cm.counts[c][c];
    std::size_t row = 0, col = 0;
    for (std::size_t j = 0; j < n; ++j) {
      row += cm.counts[c][j];
      col += cm.counts[j][c];
    }
    const std::size_t fp = col - tp;
    const std::size_t fn = row - tp;
    ClassMetrics& m = rep.per_class[c];
    if (tp + fp == 0) {
      m.degenerate = true;
    } else {
      m.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    }
    if (tp + fn == 0) {
      m.degenerate = true;
    } else {
      m.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
    }
    if (m.precision + m.recall == 0.0) {
      m.degenerate = true;
    } else {
      m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
    }
    rep.macro_precision += m.precision;
    rep.macro_recall += m.recall;
    rep.macro_f1 += m.f1;
    if (m.degenerate) rep.any_degenerate = true;
  }
  rep.macro_precision /= static_cast<double>(n);
  rep.macro_recall /= static_cast<double>(n);
  rep.macro_f1 /= static_cast<double>(n);
  return rep;
}

std::string render_metrics(const MetricsReport& rep) {
  char line[128];
  std::string out;
  std::snprintf(line, sizeof(line), "accuracy %.4f\n", rep.accuracy);
  out += line;
  out += "class  precision  recall  f1\n";
  for (std::size_t c = 0; c < rep.per_class.size(); ++c) {
    const ClassMetrics& m = rep.per_class[c];
    std::snprintf(line, sizeof(line), "%-5zu  %9.4f  %6.4f  %6.4f%s\n", c, m.precision, m.recall,
                  m.f1, m.degenerate ? " (degenerate)" : "");
    out += line;
  }
  std::snprintf(line, sizeof(line), "macro  %9.4f  %6.4f  %6.4f\n", rep.macro_precision,
                rep.macro_recall, rep.macro_f1);
  out += line;
  return out;
}

void write_confusion_csv(const ConfusionMatrix& cm, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  const std::size_t n = cm.classes();
  out << "true\\pred";
  for (std::size_t c = 0; c < n; ++c) out << ',' << c;
  out << '\n';
  for (std::size_t r = 0; r < n; ++r) {
    out << r;
    for (std::size_t c = 0; c < n; ++c) out << ',' << cm.counts[r][c];
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

MeanStd mean_std(const std::vector<double>& values) {
  MeanStd r;
  if (values.empty()) return r;
  for (double v : values) r.mean += v;
  r.mean /= static_cast<double>(values.size());
  if (values.size() >= 2) {
    double ss = 0.0;
    for (double v : values) ss += (v - r.mean) * (v - r.mean);
    r.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
    r.has_std = true;
  }
  return r;
}

}  // namespace hcg
