#include "hcg/gradcheck.hpp"

#include <cmath>

#include "hcg/conv1d.hpp"
#include "hcg/dense.hpp"
#include "hcg/error.hpp"
#include "hcg/gru.hpp"
#include "hcg/loss.hpp"
#include "hcg/lstm.hpp"
#include "hcg/model.hpp"
#include "hcg/rng.hpp"

namespace hcg {

std::vector<Matrix> finite_difference_gradient(const LossFn& loss_fn,
                                               const std::vector<ParamTensor*>& params, double h) {
  if (h <= 0.0) throw ValueError("finite difference: step must be positive");
  std::vector<Matrix> grads;
  grads.reserve(params.size());
  for (ParamTensor* p : params) {
    Matrix g(p->value.rows(), p->value.cols());
    for (std::size_t i = 0; i < p->value.size(); ++i) {
      const double orig = p->value.data()[i];
      p->value.data()[i] = orig + h;
      const double lp = loss_fn();
      p->value.data()[i] = orig - h;
      const double lm = loss_fn();
      p->value.data()[i] = orig;
      if (!std::isfinite(lp) || !std::isfinite(lm)) {
        throw NumericError("finite difference: non-finite loss probing " + p->name + "[" +
                           std::to_string(i) + "]");
      }
      g.data()[i] = (lp - lm) / (2.0 * h);
    }
    grads.push_back(std::move(g));
  }
  return grads;
}

double gradient_rel_err(const Matrix& analytic, const Matrix& numeric) {
  if (!analytic.same_shape(numeric)) {
    throw DimensionError("rel err: " + analytic.shape_str() + " vs " + numeric.shape_str());
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    const double a = analytic.data()[i];
    const double b = numeric.data()[i];
    double den = std::abs(a) > std::abs(b) ? std::abs(a) : std::abs(b);
    if (den < 1e-8) den = 1e-8;
    const double err = std::abs(a - b) / den;
    if (err > worst) worst = err;
  }
  return worst;
}

namespace {

void fill_uniform(Matrix& m, Rng& rng, double lo, double hi) {
  for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(lo, hi);
}

double probe_sum(const Matrix& probe, const Matrix& out) {
  double s = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) s += probe.data()[i] * out.data()[i];
  return s;
}

// Smallest |pre-activation| in a ReLU layer; finite differences are only
// trusted away from the kink, so instances too close to it are redrawn.
double min_abs(const Matrix& m) {
  double v = 1e300;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double a = std::abs(m.data()[i]);
    if (a < v) v = a;
  }
  return v;
}

constexpr double kKinkGuard = 1e-3;

double dense_trial(std::uint64_t seed) {
  const std::size_t batch = 2, in = 4, out = 3;
  for (std::uint64_t attempt = 0;; ++attempt) {
    if (attempt == 100) throw NumericError("gradient suite: no clean dense instance");
    Rng rng(Rng::derive(seed, attempt));
    const bool relu = (seed % 2) == 0;
    DenseLayer layer(in, out, relu, "dense");
    fill_uniform(layer.weight.value, rng, -0.8, 0.8);
    fill_uniform(layer.bias.value, rng, -0.5, 0.5);
    ParamTensor input("input", Matrix(batch, in));
    fill_uniform(input.value, rng, -1.0, 1.0);
    Matrix probe(batch, out);
    fill_uniform(probe, rng, -1.0, 1.0);

    if (relu) {
      DenseTrace t;
      layer.forward(input.value, t);
      if (min_abs(t.preact) < kKinkGuard) continue;
    }
    auto loss = [&]() { return probe_sum(probe, layer.forward(input.value)); };
    DenseTrace trace;
    layer.forward(input.value, trace);
    input.grad = layer.backward(probe, trace);

    std::vector<ParamTensor*> params{&layer.weight, &layer.bias, &input};
    const auto numeric = finite_difference_gradient(loss, params);
    double worst = 0.0;
    for (std::size_t i = 0; i < params.size(); ++i) {
      worst = std::max(worst, gradient_rel_err(params[i]->grad, numeric[i]));
    }
    return worst;
  }
}

double conv_trial(std::uint64_t seed) {
  const std::size_t T = 5, N = 3, d = 2, k = 2;
  for (std::uint64_t attempt = 0;; ++attempt) {
    if (attempt == 100) throw NumericError("gradient suite: no clean conv instance");
    Rng rng(Rng::derive(seed, attempt));
    Conv1dLayer layer(N, d, k, "conv", true);
    fill_uniform(layer.kernel.value, rng, -0.8, 0.8);
    fill_uniform(layer.bias.value, rng, -0.5, 0.5);
    ParamTensor input("input", Matrix(T, N));
    fill_uniform(input.value, rng, -1.0, 1.0);
    Matrix probe(T, d);
    fill_uniform(probe, rng, -1.0, 1.0);

    Conv1dTrace guard;
    layer.forward(input.value, guard);
    if (min_abs(guard.preact) < kKinkGuard) continue;

    auto loss = [&]() { return probe_sum(probe, layer.forward(input.value)); };
    Conv1dTrace trace;
    layer.forward(input.value, trace);
    input.grad = layer.backward(probe, trace);

    std::vector<ParamTensor*> params{&layer.kernel, &layer.bias, &input};
    const auto numeric = finite_difference_gradient(loss, params);
    double worst = 0.0;
    for (std::size_t i = 0; i < params.size(); ++i) {
      worst = std::max(worst, gradient_rel_err(params[i]->grad, numeric[i]));
    }
    return worst;
  }
}

double gru_trial(std::uint64_t seed) {
  const std::size_t T = 8, in = 3, H = 4;
  Rng rng(Rng::derive(seed, 0));
  GruLayerParams p(in, H, "gru");
  p.init_glorot(rng);
  fill_uniform(p.b_r.value, rng, -0.3, 0.3);
  fill_uniform(p.b_u.value, rng, -0.3, 0.3);
  fill_uniform(p.b_c.value, rng, -0.3, 0.3);
  ParamTensor input("input", Matrix(T, in));
  fill_uniform(input.value, rng, -1.0, 1.0);
  Matrix probe(T, H);
  fill_uniform(probe, rng, -1.0, 1.0);

  auto loss = [&]() { return probe_sum(probe, gru_layer_forward(input.value, p)); };
  GruTrace trace;
  gru_layer_forward(input.value, p, {}, trace);
  input.grad = gru_layer_backward(probe, p, trace);

  std::vector<ParamTensor*> params = p.params();
  params.push_back(&input);
  const auto numeric = finite_difference_gradient(loss, params);
  double worst = 0.0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    worst = std::max(worst, gradient_rel_err(params[i]->grad, numeric[i]));
  }
  return worst;
}

double lstm_trial(std::uint64_t seed) {
  const std::size_t T = 8, in = 3, H = 4;
  Rng rng(Rng::derive(seed, 0));
  LstmLayerParams p(in, H, "lstm");
  p.init_glorot(rng);
  for (ParamTensor* b : {&p.b_i, &p.b_f, &p.b_g, &p.b_o}) fill_uniform(b->value, rng, -0.3, 0.3);
  ParamTensor input("input", Matrix(T, in));
  fill_uniform(input.value, rng, -1.0, 1.0);
  Matrix probe(T, H);
  fill_uniform(probe, rng, -1.0, 1.0);

  auto loss = [&]() { return probe_sum(probe, lstm_layer_forward(input.value, p)); };
  LstmTrace trace;
  lstm_layer_forward(input.value, p, trace);
  input.grad = lstm_layer_backward(probe, p, trace);

  std::vector<ParamTensor*> params = p.params();
  params.push_back(&input);
  const auto numeric = finite_difference_gradient(loss, params);
  double worst = 0.0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    worst = std::max(worst, gradient_rel_err(params[i]->grad, numeric[i]));
  }
  return worst;
}

double softmax_mse_trial(std::uint64_t seed) {
  const std::size_t batch = 2, classes = 4;
  Rng rng(Rng::derive(seed, 0));
  ParamTensor logits("logits", Matrix(batch, classes));
  fill_uniform(logits.value, rng, -2.0, 2.0);
  Matrix target(batch, classes);
  for (std::size_t r = 0; r < batch; ++r) target(r, rng.next_below(classes)) = 1.0;

  auto loss = [&]() { return mse_loss(softmax(logits.value), target); };
  logits.grad = mse_softmax_backward(softmax(logits.value), target);

  std::vector<ParamTensor*> params{&logits};
  const auto numeric = finite_difference_gradient(loss, params);
  return gradient_rel_err(logits.grad, numeric[0]);
}

double model_trial(std::uint64_t seed) {
  ModelConfig cfg;
  cfg.arch = Arch::Hcg;
  cfg.sensors = 2;
  cfg.window = 8;
  cfg.num_classes = 3;
  cfg.conv_channels = {3};
  cfg.kernel_len = 2;
  cfg.rec_hidden = {4};
  cfg.dense_hidden = {5};
  for (std::uint64_t attempt = 0;; ++attempt) {
    if (attempt == 100) throw NumericError("gradient suite: no clean model instance");
    cfg.seed = Rng::derive(seed, 1000 + attempt);
    Model model = build_model(cfg);
    Rng rng(Rng::derive(seed, attempt));
    ParamTensor input("input", Matrix(cfg.window, cfg.sensors));
    fill_uniform(input.value, rng, -1.0, 1.0);
    Matrix target(1, cfg.num_classes);
    target(0, rng.next_below(cfg.num_classes)) = 1.0;

    ModelTrace guard;
    model_forward(model, input.value, guard);
    double kink = 1e300;
    for (const Conv1dTrace& t : guard.conv) kink = std::min(kink, min_abs(t.preact));
    for (std::size_t i = 0; i < model.head.size(); ++i) {
      if (model.head[i].relu()) kink = std::min(kink, min_abs(guard.head[i].preact));
    }
    if (kink < kKinkGuard) continue;

    auto loss = [&]() { return mse_loss(model_forward(model, input.value), target); };
    ModelTrace trace;
    model_forward(model, input.value, trace);
    model.zero_grads();
    input.grad = model_backward(model, trace, target);

    std::vector<ParamTensor*> params = model.params();
    params.push_back(&input);
    const auto numeric = finite_difference_gradient(loss, params);
    double worst = 0.0;
    for (std::size_t i = 0; i < params.size(); ++i) {
      worst = std::max(worst, gradient_rel_err(params[i]->grad, numeric[i]));
    }
    return worst;
  }
}

}  // namespace

std::vector<GradCheckCase> run_gradient_suite(std::uint64_t seed, std::size_t trials, double tol) {
  struct Entry {
    const char* name;
    double (*fn)(std::uint64_t);
  };
  const Entry entries[] = {
      {"dense", dense_trial},   {"conv1d", conv_trial},
      {"gru", gru_trial},       {"lstm", lstm_trial},
      {"softmax_mse", softmax_mse_trial}, {"model_hcg", model_trial},
  };
  std::vector<GradCheckCase> out;
  for (const Entry& e : entries) {
    GradCheckCase c;
    c.name = e.name;
    for (std::size_t t = 0; t < trials; ++t) {
      c.max_rel_err = std::max(c.max_rel_err, e.fn(Rng::derive(seed, t * 131 + 7) + t));
    }
    c.pass = c.max_rel_err < tol;
    out.push_back(c);
  }
  return out;
}

}  // namespace hcg
