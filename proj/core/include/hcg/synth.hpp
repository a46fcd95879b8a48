#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "hcg/dataset.hpp"

namespace hcg {

// Damage classes are modal-frequency shifts: class c scales every base
// frequency by (1 - freq_class_step * c), imitating stiffness loss.
// Amplitudes can drift per class the same way.
struct SynthConfig {
  std::size_t num_classes = 4;
  std::size_t sensors = 8;
  std::size_t window = 128;
  std::size_t samples_per_class = 200;
  std::vector<double> base_freqs = {10.0, 20.0, 35.0};  // Hz, one per mode
  std::vector<double> amplitudes = {1.0, 0.7, 0.4};     // one per mode
  double freq_class_step = 0.06;
  double amp_class_step = 0.0;
  std::vector<double> spatial_weights;  // per sensor; empty means built-in mode shapes
  double noise_std = 0.02;
  double sample_rate_hz = 100.0;
  std::uint64_t seed = 0;
};

// Flat `key = value` file; unknown keys are errors. Lists are
// comma-separated. Lines starting with '#' and blank lines are skipped.
SynthConfig load_synth_config(const std::string& path);

// Frequency used for (class, mode); the Nyquist check runs over all pairs.
double synth_frequency(const SynthConfig& cfg, std::size_t cls, std::size_t mode);
double synth_amplitude(const SynthConfig& cfg, std::size_t cls, std::size_t mode);
// Spatial weight of (mode, sensor): config-supplied per-sensor weights when
// present, otherwise a smooth positive mode-shape profile so adjacent
// sensors stay correlated.
double synth_spatial_weight(const SynthConfig& cfg, std::size_t mode, std::size_t sensor);

// Each sample is one ready-made window:
//   x_i(t) = sum_m A_{c,m} * w_{m,i} * sin(2*pi*f_{c,m}*t/fs + phase_{sample,m}) + noise
// Phases are shared across sensors within a sample; everything is drawn from
// one sequential stream of cfg.seed.
LabeledDataset synth_generate(const SynthConfig& cfg);

// Writes one CSV per window plus manifest.csv into out_dir.
void write_synth_dataset(const LabeledDataset& ds, const std::string& out_dir);

}  // namespace hcg
