#include <benchmark/benchmark.h>

#include "hcg/conv1d.hpp"
#include "hcg/gru.hpp"
#include "hcg/matrix.hpp"
#include "hcg/model.hpp"
#include "hcg/rng.hpp"
#include "hcg/synth.hpp"
#include "hcg/train.hpp"

namespace {

hcg::Matrix random_matrix(std::size_t rows, std::size_t cols, hcg::Rng& rng) {
  hcg::Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = rng.uniform(-1.0, 1.0);
  return m;
}

void bm_matmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  hcg::Rng rng(1);
  const hcg::Matrix a = random_matrix(n, n, rng);
  const hcg::Matrix b = random_matrix(n, n, rng);
  for (auto _ : state) {
    hcg::Matrix c = hcg::matmul(a, b);
    benchmark::DoNotOptimize(c.data());
  }
  state.SetItemsProcessed(state.iterations() * n * n * n);
}
BENCHMARK(bm_matmul)->Arg(64)->Arg(128)->Arg(256);

void bm_conv_forward(benchmark::State& state) {
  hcg::Rng rng(2);
  hcg::Conv1dLayer conv(8, 64, 5, "conv");
  conv.init_glorot(rng);
  const hcg::Matrix x = random_matrix(128, 8, rng);
  for (auto _ : state) {
    hcg::Matrix y = conv.forward(x);
    benchmark::DoNotOptimize(y.data());
  }
}
BENCHMARK(bm_conv_forward);

void bm_gru_forward(benchmark::State& state) {
  hcg::Rng rng(3);
  hcg::GruLayerParams gru(64, 128, "gru");
  gru.init_glorot(rng);
  const hcg::Matrix x = random_matrix(128, 64, rng);
  for (auto _ : state) {
    hcg::Matrix h = hcg::gru_layer_forward(x, gru);
    benchmark::DoNotOptimize(h.data());
  }
}
BENCHMARK(bm_gru_forward);

void bm_gru_backward(benchmark::State& state) {
  hcg::Rng rng(4);
  hcg::GruLayerParams gru(64, 128, "gru");
  gru.init_glorot(rng);
  const hcg::Matrix x = random_matrix(128, 64, rng);
  const hcg::Matrix dy = random_matrix(128, 128, rng);
  for (auto _ : state) {
    hcg::GruTrace trace;
    hcg::Matrix h = hcg::gru_layer_forward(x, gru, {}, trace);
    hcg::Matrix dx = hcg::gru_layer_backward(dy, gru, trace);
    benchmark::DoNotOptimize(dx.data());
    for (hcg::ParamTensor* p : gru.params()) p->zero_grad();
  }
}
BENCHMARK(bm_gru_backward);

void bm_model_forward(benchmark::State& state) {
  hcg::ModelConfig cfg = hcg::default_config(hcg::Arch::Hcg, 8, 128, 4, 5);
  hcg::Model model = hcg::build_model(cfg);
  hcg::Rng rng(6);
  const hcg::Matrix x = random_matrix(128, 8, rng);
  for (auto _ : state) {
    hcg::Matrix p = hcg::model_forward(model, x);
    benchmark::DoNotOptimize(p.data());
  }
}
BENCHMARK(bm_model_forward);

void bm_train_epoch(benchmark::State& state) {
  hcg::SynthConfig scfg;
  scfg.samples_per_class = 16;
  scfg.sensors = 4;
  scfg.window = 64;
  hcg::LabeledDataset ds = hcg::synth_generate(scfg);
  hcg::split_dataset(ds, 0.6, 0.2, 0.2, 1);
  hcg::ModelConfig cfg = hcg::default_config(hcg::Arch::Hcg, 4, 64, 4, 7);
  cfg.conv_channels = {16};
  cfg.rec_hidden = {32};
  cfg.dense_hidden = {32};
  hcg::TrainConfig tc;
  tc.epochs = 1;
  for (auto _ : state) {
    hcg::Model model = hcg::build_model(cfg);
    hcg::History h = hcg::train(model, ds, tc);
    benchmark::DoNotOptimize(h.train_loss.data());
  }
}
BENCHMARK(bm_train_epoch)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
