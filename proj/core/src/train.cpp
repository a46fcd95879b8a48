#include "hcg/train.hpp"

#include <cmath>
#include <fstream>

#include "hcg/error.hpp"
#include "hcg/loss.hpp"
#include "hcg/rng.hpp"

namespace hcg {

void AdamState::init(const std::vector<ParamTensor*>& params) {
  m.clear();
  v.clear();
  for (const ParamTensor* p : params) {
    m.emplace_back(p->value.rows(), p->value.cols());
    v.emplace_back(p->value.rows(), p->value.cols());
  }
  t = 0;
}

void adam_step(const std::vector<ParamTensor*>& params, AdamState& state, const TrainConfig& cfg) {
  if (params.size() != state.m.size()) {
    throw DimensionError("adam: state tracks " + std::to_string(state.m.size()) +
                         " tensors, got " + std::to_string(params.size()));
  }
  ++state.t;
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    ParamTensor& p = *params[i];
    if (!p.grad.all_finite()) {
      throw NumericError("adam: non-finite gradient in " + p.name);
    }
    double* m = state.m[i].data();
    double* v = state.v[i].data();
    double* th = p.value.data();
    const double* g = p.grad.data();
    for (std::size_t j = 0; j < p.value.size(); ++j) {
      m[j] = cfg.beta1 * m[j] + (1.0 - cfg.beta1) * g[j];
      v[j] = cfg.beta2 * v[j] + (1.0 - cfg.beta2) * g[j] * g[j];
      const double mhat = m[j] / c1;
      const double vhat = v[j] / c2;
      th[j] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.epsilon);
    }
  }
}

Matrix one_hot(std::size_t label, std::size_t num_classes) {
  if (label >= num_classes) {
    throw ValueError("label " + std::to_string(label) + " out of range for " +
                     std::to_string(num_classes) + " classes");
  }
  Matrix t(1, num_classes);
  t(0, label) = 1.0;
  return t;
}

std::pair<double, double> evaluate(const Model& model, const LabeledDataset& ds, Split split) {
  const auto idx = ds.indices_of(split);
  if (idx.empty()) throw ValueError("evaluate: empty " + split_name(split) + " split");
  double loss = 0.0;
  std::size_t correct = 0;
  for (std::size_t i : idx) {
    const Matrix probs = model_forward(model, ds.windows[i]);
    loss += mse_loss(probs, one_hot(ds.labels[i], model.cfg.num_classes));
    if (argmax_row(probs, 0) == ds.labels[i]) ++correct;
  }
  return {loss, static_cast<double>(correct) / static_cast<double>(idx.size())};
}

History train(Model& model, const LabeledDataset& ds, const TrainConfig& cfg,
              const EpochCallback& on_epoch) {
  if (cfg.learning_rate < 0.0) throw ValueError("train: learning rate must be >= 0");
  if (cfg.batch_size < 1) throw ValueError("train: batch size must be >= 1");
  if (cfg.epochs < 1) throw ValueError("train: need at least one epoch");
  const auto train_idx = ds.indices_of(Split::Train);
  if (train_idx.empty()) throw ValueError("train: empty train split");
  if (ds.indices_of(Split::Val).empty()) throw ValueError("train: empty val split");
  if (ds.num_classes != model.cfg.num_classes) {
    throw DimensionError("train: dataset has " + std::to_string(ds.num_classes) +
                         " classes, model expects " + std::to_string(model.cfg.num_classes));
  }

  std::vector<ParamTensor*> params = model.params();
  AdamState state;
  state.init(params);
  History hist;
  const std::size_t n_train = train_idx.size();
  const std::size_t n_val = ds.indices_of(Split::Val).size();

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::vector<std::size_t> order = train_idx;
    if (cfg.shuffle) {
      Rng rng(Rng::derive(cfg.seed, epoch));
      for (std::size_t i = order.size(); i > 1; --i) {
        std::swap(order[i - 1], order[rng.next_below(i)]);
      }
    }
    double epoch_loss = 0.0;
    std::size_t correct = 0;
    std::size_t batch_index = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size, ++batch_index) {
      const std::size_t stop = std::min(start + cfg.batch_size, order.size());
      model.zero_grads();
      double batch_loss = 0.0;
      for (std::size_t s = start; s < stop; ++s) {
        const std::size_t i = order[s];
        ModelTrace trace;
        const Matrix probs = model_forward(model, ds.windows[i], trace);
        if (argmax_row(probs, 0) == ds.labels[i]) ++correct;
        double sample_loss = 0.0;
        model_backward(model, trace, one_hot(ds.labels[i], model.cfg.num_classes), &sample_loss);
        batch_loss += sample_loss;
      }
      if (!std::isfinite(batch_loss)) {
        throw NumericError("training diverged: non-finite loss at epoch " +
                           std::to_string(epoch + 1) + ", batch " + std::to_string(batch_index + 1));
      }
      epoch_loss += batch_loss;
      adam_step(params, state, cfg);
    }
    const auto [val_loss, val_acc] = evaluate(model, ds, Split::Val);
    hist.train_loss.push_back(epoch_loss / static_cast<double>(n_train));
    hist.train_acc.push_back(static_cast<double>(correct) / static_cast<double>(n_train));
    hist.val_loss.push_back(val_loss / static_cast<double>(n_val));
    hist.val_acc.push_back(val_acc);
    if (on_epoch && on_epoch(epoch + 1, hist)) break;
  }
  return hist;
}

void write_history_csv(const History& h, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << "epoch,train_loss,train_acc,val_loss,val_acc\n";
  for (std::size_t i = 0; i < h.train_loss.size(); ++i) {
    out << (i + 1) << ',' << format_double(h.train_loss[i]) << ',' << format_double(h.train_acc[i])
        << ',' << format_double(h.val_loss[i]) << ',' << format_double(h.val_acc[i]) << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace hcg
