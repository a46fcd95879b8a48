#include "hcg/model.hpp"

#include <cmath>

#include "hcg/error.hpp"
#include "hcg/loss.hpp"

namespace hcg {

std::string arch_name(Arch a) {
  switch (a) {
    case Arch::Hcg: return "hcg";
    case Arch::Dnn: return "dnn";
    case Arch::Cnn: return "cnn";
    case Arch::Lstm: return "lstm";
    case Arch::Gru: return "gru";
  }
  return "hcg";
}

Arch arch_from_string(const std::string& name) {
  if (name == "hcg") return Arch::Hcg;
  if (name == "dnn") return Arch::Dnn;
  if (name == "cnn") return Arch::Cnn;
  if (name == "lstm") return Arch::Lstm;
  if (name == "gru") return Arch::Gru;
  throw ValueError("unknown architecture: " + name);
}

ModelConfig default_config(Arch arch, std::size_t sensors, std::size_t window,
                           std::size_t num_classes, std::uint64_t seed) {
  ModelConfig cfg;
  cfg.arch = arch;
  cfg.sensors = sensors;
  cfg.window = window;
  cfg.num_classes = num_classes;
  cfg.seed = seed;
  switch (arch) {
    case Arch::Hcg:
      cfg.conv_channels = {64, 64};
      cfg.rec_hidden = {128, 128};
      cfg.dense_hidden = {256, 128};
      break;
    case Arch::Dnn:
      cfg.dense_hidden = {512, 256, 128};
      break;
    case Arch::Cnn:
      cfg.conv_channels = {32, 64, 32};
      break;
    case Arch::Lstm:
    case Arch::Gru:
      cfg.rec_hidden = {64, 64, 64};
      break;
  }
  return cfg;
}

static void validate_config(const ModelConfig& cfg) {
  if (cfg.sensors == 0 || cfg.window == 0) {
    throw ConfigError("model: sensors and window must be positive");
  }
  if (cfg.num_classes < 2) throw ConfigError("model: need at least 2 classes");
  if (cfg.kernel_len == 0) throw ConfigError("model: kernel length must be positive");
  for (std::size_t v : cfg.conv_channels)
    if (v == 0) throw ConfigError("model: zero conv width");
  for (std::size_t v : cfg.rec_hidden)
    if (v == 0) throw ConfigError("model: zero recurrent width");
  for (std::size_t v : cfg.dense_hidden)
    if (v == 0) throw ConfigError("model: zero dense width");
  switch (cfg.arch) {
    case Arch::Hcg:
      if (cfg.conv_channels.empty() || cfg.rec_hidden.empty()) {
        throw ConfigError("hcg needs at least one conv and one recurrent layer");
      }
      break;
    case Arch::Cnn:
      if (cfg.conv_channels.empty()) throw ConfigError("cnn needs at least one conv layer");
      break;
    case Arch::Gru:
    case Arch::Lstm:
      if (cfg.rec_hidden.empty()) throw ConfigError("recurrent baseline needs layers");
      break;
    case Arch::Dnn:
      break;
  }
}

// Width of the vector entering the classifier stack.
static std::size_t head_input(const ModelConfig& cfg) {
  switch (cfg.arch) {
    case Arch::Hcg:
    case Arch::Gru:
    case Arch::Lstm:
      return cfg.rec_hidden.back();
    case Arch::Dnn:
      return cfg.window * cfg.sensors;
    case Arch::Cnn:
      return cfg.window * cfg.conv_channels.back();
  }
  return 0;
}

std::size_t config_param_count(const ModelConfig& cfg) {
  validate_config(cfg);
  std::size_t total = 0;
  const bool has_conv = cfg.arch == Arch::Hcg || cfg.arch == Arch::Cnn;
  const bool has_rec = cfg.arch != Arch::Dnn && cfg.arch != Arch::Cnn;
  if (has_conv) {
    std::size_t prev = cfg.sensors;
    for (std::size_t d : cfg.conv_channels) {
      total += d * prev * cfg.kernel_len + (cfg.conv_bias ? d : 0);
      prev = d;
    }
  }
  if (has_rec) {
    std::size_t prev = cfg.arch == Arch::Hcg ? cfg.conv_channels.back() : cfg.sensors;
    const std::size_t gates = cfg.arch == Arch::Lstm ? 4 : 3;
    for (std::size_t h : cfg.rec_hidden) {
      total += gates * (h * (prev + h) + h);
      prev = h;
    }
  }
  std::size_t prev = head_input(cfg);
  for (std::size_t w : cfg.dense_hidden) {
    total += prev * w + w;
    prev = w;
  }
  total += prev * cfg.num_classes + cfg.num_classes;
  return total;
}

static ModelConfig scaled_config(Arch arch, const ModelConfig& ref, double s) {
  ModelConfig cfg = default_config(arch, ref.sensors, ref.window, ref.num_classes, ref.seed);
  cfg.kernel_len = ref.kernel_len;
  cfg.conv_bias = ref.conv_bias;
  auto scaled = [s](std::size_t w) {
    const double v = std::round(static_cast<double>(w) * s);
    return v < 1.0 ? std::size_t{1} : static_cast<std::size_t>(v);
  };
  for (std::size_t& w : cfg.conv_channels) w = scaled(w);
  for (std::size_t& w : cfg.rec_hidden) w = scaled(w);
  for (std::size_t& w : cfg.dense_hidden) w = scaled(w);
  return cfg;
}

ModelConfig parity_config(Arch arch, const ModelConfig& reference, double band) {
  const std::size_t target = config_param_count(reference);
  double lo = 1e-3;
  double hi = 64.0;
  // param count grows monotonically with the width scale
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (config_param_count(scaled_config(arch, reference, mid)) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const ModelConfig below = scaled_config(arch, reference, lo);
  const ModelConfig above = scaled_config(arch, reference, hi);
  const double nb = static_cast<double>(config_param_count(below));
  const double na = static_cast<double>(config_param_count(above));
  const double t = static_cast<double>(target);
  ModelConfig best = std::abs(nb - t) <= std::abs(na - t) ? below : above;
  const double got = static_cast<double>(config_param_count(best));
  if (std::abs(got - t) / t > band) {
    throw ConfigError("no " + arch_name(arch) + " width lands within " +
                      std::to_string(band * 100.0) + "% of " + std::to_string(target) +
                      " parameters (closest " + std::to_string(config_param_count(best)) + ")");
  }
  return best;
}

std::vector<ParamTensor*> Model::params() {
  std::vector<ParamTensor*> out;
  for (Conv1dLayer& c : convs) {
    out.push_back(&c.kernel);
    if (c.use_bias()) out.push_back(&c.bias);
  }
  for (GruLayerParams& g : grus) {
    for (ParamTensor* t : g.params()) out.push_back(t);
  }
  for (LstmLayerParams& l : lstms) {
    for (ParamTensor* t : l.params()) out.push_back(t);
  }
  for (DenseLayer& d : head) {
    out.push_back(&d.weight);
    out.push_back(&d.bias);
  }
  return out;
}

std::vector<const ParamTensor*> Model::params() const {
  std::vector<const ParamTensor*> out;
  for (const ParamTensor* t : const_cast<Model*>(this)->params()) out.push_back(t);
  return out;
}

std::size_t Model::param_count() const {
  std::size_t total = 0;
  for (const Conv1dLayer& c : convs) total += c.param_count();
  for (const GruLayerParams& g : grus) total += g.param_count();
  for (const LstmLayerParams& l : lstms) total += l.param_count();
  for (const DenseLayer& d : head) total += d.param_count();
  return total;
}

void Model::zero_grads() {
  for (ParamTensor* t : params()) t->zero_grad();
}

Model build_model(const ModelConfig& cfg) {
  validate_config(cfg);
  Model m;
  m.cfg = cfg;
  Rng rng(cfg.seed);
  const bool has_conv = cfg.arch == Arch::Hcg || cfg.arch == Arch::Cnn;
  const bool has_rec = cfg.arch != Arch::Dnn && cfg.arch != Arch::Cnn;
  if (has_conv) {
    std::size_t prev = cfg.sensors;
    for (std::size_t i = 0; i < cfg.conv_channels.size(); ++i) {
      m.convs.emplace_back(prev, cfg.conv_channels[i], cfg.kernel_len, "conv" + std::to_string(i),
                           cfg.conv_bias);
      m.convs.back().init_glorot(rng);
      prev = cfg.conv_channels[i];
    }
  }
  if (has_rec) {
    std::size_t prev = cfg.arch == Arch::Hcg ? cfg.conv_channels.back() : cfg.sensors;
    for (std::size_t i = 0; i < cfg.rec_hidden.size(); ++i) {
      if (cfg.arch == Arch::Lstm) {
        m.lstms.emplace_back(prev, cfg.rec_hidden[i], "lstm" + std::to_string(i));
        m.lstms.back().init_glorot(rng);
      } else {
        m.grus.emplace_back(prev, cfg.rec_hidden[i], "gru" + std::to_string(i));
        m.grus.back().init_glorot(rng);
      }
      prev = cfg.rec_hidden[i];
    }
  }
  std::size_t prev = head_input(cfg);
  for (std::size_t i = 0; i < cfg.dense_hidden.size(); ++i) {
    m.head.emplace_back(prev, cfg.dense_hidden[i], true, "fc" + std::to_string(i));
    m.head.back().init_glorot(rng);
    prev = cfg.dense_hidden[i];
  }
  m.head.emplace_back(prev, cfg.num_classes, false, "out");
  m.head.back().init_glorot(rng);
  return m;
}

static Matrix flatten(const Matrix& x) {
  return Matrix(1, x.size(), std::vector<double>(x.data(), x.data() + x.size()));
}

static Matrix unflatten(const Matrix& flat, std::size_t rows, std::size_t cols) {
  return Matrix(rows, cols, std::vector<double>(flat.data(), flat.data() + flat.size()));
}

static Matrix forward_impl(const Model& model, const Matrix& x, ModelTrace* trace) {
  const ModelConfig& cfg = model.cfg;
  if (x.rows() != cfg.window || x.cols() != cfg.sensors) {
    throw DimensionError("forward: input " + x.shape_str() + ", model expects " +
                         std::to_string(cfg.window) + "x" + std::to_string(cfg.sensors));
  }
  Matrix seq = apply_normalization(model.norm, x);
  if (trace) {
    trace->input = seq;
    trace->conv.resize(model.convs.size());
    trace->gru.resize(model.grus.size());
    trace->lstm.resize(model.lstms.size());
    trace->head.resize(model.head.size());
  }
  for (std::size_t i = 0; i < model.convs.size(); ++i) {
    seq = trace ? model.convs[i].forward(seq, trace->conv[i]) : model.convs[i].forward(seq);
  }
  Matrix feed;
  switch (cfg.arch) {
    case Arch::Hcg:
    case Arch::Gru:
      for (std::size_t i = 0; i < model.grus.size(); ++i) {
        seq = trace ? gru_layer_forward(seq, model.grus[i], {}, trace->gru[i])
                    : gru_layer_forward(seq, model.grus[i]);
      }
      feed = seq.row_copy(seq.rows() - 1);
      break;
    case Arch::Lstm:
      for (std::size_t i = 0; i < model.lstms.size(); ++i) {
        seq = trace ? lstm_layer_forward(seq, model.lstms[i], trace->lstm[i])
                    : lstm_layer_forward(seq, model.lstms[i]);
      }
      feed = seq.row_copy(seq.rows() - 1);
      break;
    case Arch::Dnn:
    case Arch::Cnn:
      feed = flatten(seq);
      break;
  }
  for (std::size_t i = 0; i < model.head.size(); ++i) {
    feed = trace ? model.head[i].forward(feed, trace->head[i]) : model.head[i].forward(feed);
  }
  Matrix probs = softmax(feed);
  if (trace) trace->probs = probs;
  return probs;
}

Matrix model_forward(const Model& model, const Matrix& x) { return forward_impl(model, x, nullptr); }

Matrix model_forward(const Model& model, const Matrix& x, ModelTrace& trace) {
  return forward_impl(model, x, &trace);
}

std::size_t predict(const Model& model, const Matrix& x) {
  return argmax_row(model_forward(model, x), 0);
}

Matrix model_backward(Model& model, const ModelTrace& trace, const Matrix& target, double* loss) {
  const ModelConfig& cfg = model.cfg;
  if (loss) *loss = mse_loss(trace.probs, target);
  Matrix d = mse_softmax_backward(trace.probs, target);
  for (std::size_t i = model.head.size(); i-- > 0;) {
    d = model.head[i].backward(d, trace.head[i]);
  }
  switch (cfg.arch) {
    case Arch::Hcg:
    case Arch::Gru: {
      // only the last hidden state feeds the head
      Matrix dseq(trace.gru.back().r.rows(), cfg.rec_hidden.back());
      dseq.set_block(dseq.rows() - 1, 0, d);
      for (std::size_t i = model.grus.size(); i-- > 0;) {
        dseq = gru_layer_backward(dseq, model.grus[i], trace.gru[i]);
      }
      d = dseq;
      break;
    }
    case Arch::Lstm: {
      Matrix dseq(trace.lstm.back().i.rows(), cfg.rec_hidden.back());
      dseq.set_block(dseq.rows() - 1, 0, d);
      for (std::size_t i = model.lstms.size(); i-- > 0;) {
        dseq = lstm_layer_backward(dseq, model.lstms[i], trace.lstm[i]);
      }
      d = dseq;
      break;
    }
    case Arch::Cnn:
      d = unflatten(d, cfg.window, cfg.conv_channels.back());
      break;
    case Arch::Dnn:
      d = unflatten(d, cfg.window, cfg.sensors);
      break;
  }
  for (std::size_t i = model.convs.size(); i-- > 0;) {
    d = model.convs[i].backward(d, trace.conv[i]);
  }
  return d;
}

}  // namespace hcg
