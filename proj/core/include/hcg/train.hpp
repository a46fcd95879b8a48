#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "hcg/dataset.hpp"
#include "hcg/model.hpp"

namespace hcg {

struct TrainConfig {
  double learning_rate = 0.001;
  std::size_t batch_size = 64;
  std::size_t epochs = 30;
  std::uint64_t seed = 0;
  bool shuffle = true;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  std::vector<Matrix> m;
  std::vector<Matrix> v;
  std::uint64_t t = 0;

  void init(const std::vector<ParamTensor*>& params);
};

// One update from the accumulated grads. Gradients are the raw loss sums for
// the batch; Adam's scale invariance absorbs the batch size.
void adam_step(const std::vector<ParamTensor*>& params, AdamState& state, const TrainConfig& cfg);

// Per-epoch curves; losses are per-sample means so batch size does not move
// the scale, while the optimizer itself consumes raw sums.
struct History {
  std::vector<double> train_loss;
  std::vector<double> train_acc;
  std::vector<double> val_loss;
  std::vector<double> val_acc;
};

void write_history_csv(const History& h, const std::string& path);

// Called after each epoch; returning true stops training there.
using EpochCallback = std::function<bool(std::size_t epoch, const History& h)>;

// Epochs of shuffled batches (last partial batch included), Adam updates,
// and a history row per epoch. The epoch shuffle order derives from
// (cfg.seed, epoch), so a fixed seed fixes the whole run.
History train(Model& model, const LabeledDataset& ds, const TrainConfig& cfg,
              const EpochCallback& on_epoch = {});

// Raw summed loss over the split plus accuracy.
std::pair<double, double> evaluate(const Model& model, const LabeledDataset& ds, Split split);

Matrix one_hot(std::size_t label, std::size_t num_classes);

}  // namespace hcg
