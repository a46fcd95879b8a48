#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace hcg {

// Rows are true classes, columns are predicted classes.
struct ConfusionMatrix {
  std::vector<std::vector<std::size_t>> counts;

  std::size_t classes() const { return counts.size(); }
  std::size_t total() const;
};

ConfusionMatrix confusion(const std::vector<std::size_t>& pred,
                          const std::vector<std::size_t>& truth, std::size_t num_classes);

// One-vs-rest metrics; a zero denominator yields 0 with the degenerate flag
// set instead of an error.
struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool degenerate = false;
};

struct MetricsReport {
  double accuracy = 0.0;
  std::vector<ClassMetrics> per_class;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  bool any_degenerate = false;
};

MetricsReport compute_metrics(const ConfusionMatrix& cm);

std::string render_metrics(const MetricsReport& report);
void write_confusion_csv(const ConfusionMatrix& cm, const std::string& path);

// Mean and sample standard deviation (n-1). Fewer than two values leaves
// has_std false.
struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;
  bool has_std = false;
};
MeanStd mean_std(const std::vector<double>& values);

}  // namespace hcg
