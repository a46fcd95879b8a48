#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "hcg/conv1d.hpp"
#include "hcg/dataset.hpp"
#include "hcg/dense.hpp"
#include "hcg/gru.hpp"
#include "hcg/lstm.hpp"
#include "hcg/matrix.hpp"

namespace hcg {

enum class Arch { Hcg, Dnn, Cnn, Lstm, Gru };

std::string arch_name(Arch a);
Arch arch_from_string(const std::string& name);

struct ModelConfig {
  Arch arch = Arch::Hcg;
  std::size_t sensors = 8;
  std::size_t window = 128;
  std::size_t num_classes = 4;
  std::uint64_t seed = 0;
  std::vector<std::size_t> conv_channels;  // conv stack output channels
  std::size_t kernel_len = 5;
  std::vector<std::size_t> rec_hidden;     // recurrent stack hidden sizes
  std::vector<std::size_t> dense_hidden;   // classifier hidden widths
  bool conv_bias = true;
};

// Per-architecture sizes as published: HCG conv 64/64 into GRU 128/128 into
// dense 256/128; DNN 512/256/128 on the flattened window; CNN 32/64/32
// kernels; GRU and LSTM three 64-unit layers reading out from the last
// hidden state.
ModelConfig default_config(Arch arch, std::size_t sensors, std::size_t window,
                           std::size_t num_classes, std::uint64_t seed);

// Baseline sized to land within the parity band (default 10%) of the
// reference model's parameter count, by scaling layer widths.
ModelConfig parity_config(Arch arch, const ModelConfig& reference, double band = 0.10);

std::size_t config_param_count(const ModelConfig& cfg);

struct Model {
  ModelConfig cfg;
  std::vector<Conv1dLayer> convs;
  std::vector<GruLayerParams> grus;
  std::vector<LstmLayerParams> lstms;
  std::vector<DenseLayer> head;  // hidden layers use ReLU; the last is linear
  NormStats norm;                // applied before the trunk when present

  std::vector<ParamTensor*> params();
  std::vector<const ParamTensor*> params() const;
  std::size_t param_count() const;
  void zero_grads();
};

Model build_model(const ModelConfig& cfg);

struct ModelTrace {
  Matrix input;  // normalized input actually fed to the trunk
  std::vector<Conv1dTrace> conv;
  std::vector<GruTrace> gru;
  std::vector<LstmTrace> lstm;
  std::vector<DenseTrace> head;
  Matrix probs;  // 1 x N_c
};

// Probabilities for one window (1 x N_c). The trace overload retains what
// backward needs.
Matrix model_forward(const Model& model, const Matrix& x);
Matrix model_forward(const Model& model, const Matrix& x, ModelTrace& trace);

std::size_t predict(const Model& model, const Matrix& x);

// Accumulates parameter gradients for one window given its one-hot target.
// Returns dL/dinput (gradient w.r.t. the normalized input), and the sample's
// loss via *loss when requested.
Matrix model_backward(Model& model, const ModelTrace& trace, const Matrix& target,
                      double* loss = nullptr);

// Checkpoint: text format, first line "HCGCKPT v1", then `key value` config
// lines up to `end_config`, then `tensor <name> <rows> <cols>` blocks with
// one row of shortest-round-trip decimals per line.
struct CheckpointExtras {
  std::uint64_t split_seed = 0;
  double train_frac = 0.6;
  double val_frac = 0.2;
  double test_frac = 0.2;
  std::size_t stride = 64;
};

void save_checkpoint(const Model& model, const std::string& path,
                     const CheckpointExtras& extras = {});
Model load_checkpoint(const std::string& path, CheckpointExtras* extras = nullptr);

}  // namespace hcg
