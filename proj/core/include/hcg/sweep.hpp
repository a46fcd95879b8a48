#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "hcg/dataset.hpp"
#include "hcg/model.hpp"

namespace hcg {

// Flat `key = value` grid file. Keys: archs (comma list), layers (comma
// list of depths), hidden (scalar width or colon-separated per-layer
// widths), kernel, epochs, lr, batch, window, stride, seed. Unknown keys
// are errors.
struct SweepGrid {
  std::vector<Arch> archs = {Arch::Dnn, Arch::Cnn, Arch::Lstm, Arch::Gru, Arch::Hcg};
  std::vector<std::size_t> depths = {2, 3, 4, 5};
  std::vector<std::size_t> hidden = {64};
  std::size_t kernel = 5;
  std::size_t epochs = 10;
  double lr = 0.001;
  std::size_t batch = 64;
  std::size_t window = 128;
  std::size_t stride = 64;
  std::uint64_t seed = 0;
};

SweepGrid load_sweep_grid(const std::string& path);

// Depth n means n trunk layers: hidden denses for DNN, conv layers for CNN,
// recurrent layers for GRU/LSTM. HCG splits it floor(n/2) conv + ceil(n/2)
// GRU, so it needs n >= 2. Sweep models use a direct output head.
ModelConfig sweep_cell_config(const SweepGrid& grid, Arch arch, std::size_t depth,
                              std::size_t sensors, std::size_t num_classes, std::uint64_t seed);

struct SweepCell {
  Arch arch = Arch::Hcg;
  std::size_t depth = 0;
  std::vector<double> accuracies;  // test accuracy per repeat
  double mean = 0.0;
  double stddev = 0.0;
  bool has_std = false;
};

struct SweepResult {
  SweepGrid grid;
  std::size_t repeats = 0;
  std::vector<SweepCell> cells;  // arch-major, depth-minor
};

// Each (arch, depth) cell trains `repeats` freshly seeded models. Repeat r
// uses the same derived split for every cell, so comparisons are paired.
// Cells run on `threads` workers; the result layout is identical regardless
// of thread count.
SweepResult run_sweep(const SweepGrid& grid, const LabeledDataset& base, std::size_t repeats,
                      std::size_t threads);

std::string render_sweep_table(const SweepResult& result);
void write_sweep_csv(const SweepResult& result, const std::string& path);

}  // namespace hcg
