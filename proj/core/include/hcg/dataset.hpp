#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "hcg/matrix.hpp"

namespace hcg {

// One sensor recording: rows are timesteps, columns are sensors.
struct SensorRecording {
  Matrix values;
  double sample_rate_hz = 0.0;
  std::size_t label = 0;
  std::string source;
};

enum class Split { Train, Val, Test };

std::string split_name(Split s);
Split split_from_string(const std::string& name);

// Windowed, labeled samples. `split` tags are all Train until split_dataset
// assigns them.
struct LabeledDataset {
  std::vector<Matrix> windows;
  std::vector<std::size_t> labels;
  std::vector<Split> split;
  std::size_t num_classes = 0;
  double sample_rate_hz = 0.0;

  std::size_t size() const { return windows.size(); }
  std::vector<std::size_t> indices_of(Split s) const;
};

// Per-sensor z-score statistics, fitted on the train split only.
struct NormStats {
  std::vector<double> mean;
  std::vector<double> std_dev;  // floored at 1e-8

  bool empty() const { return mean.empty(); }
};

// CSV: comma-separated, '.' decimal, no header, one row per timestep.
SensorRecording load_recording(const std::string& path);
void write_recording(const std::string& path, const Matrix& values);

// Column i of the result is series i.
Matrix build_input_matrix(const std::vector<std::vector<double>>& series);

// Windows start at 0, S, 2S, ...; count floor((T-L)/S)+1. L > T gives an
// empty list.
std::vector<Matrix> make_windows(const SensorRecording& rec, std::size_t length,
                                 std::size_t stride);

NormStats fit_normalization(const LabeledDataset& ds);
Matrix apply_normalization(const NormStats& stats, const Matrix& window);
void apply_normalization(const NormStats& stats, LabeledDataset& ds);

// Stratified split: within each class, shuffle by a seed-derived order, take
// floor(val_frac*n) for validation, floor(test_frac*n) for test, rest train.
void split_dataset(LabeledDataset& ds, double train_frac, double val_frac, double test_frac,
                   std::uint64_t seed);

// Manifest CSV: header `path,label`, paths relative to the manifest's
// directory. Every recording is windowed with the given length/stride.
LabeledDataset load_manifest_dataset(const std::string& dir, std::size_t window,
                                     std::size_t stride);
void write_manifest(const std::string& dir, const std::vector<std::pair<std::string, std::size_t>>& entries);

std::string format_double(double v);  // shortest round-trip decimal

}  // namespace hcg
