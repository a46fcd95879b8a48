#pragma once

#include <cstddef>
#include <string>

#include "hcg/matrix.hpp"
#include "hcg/param.hpp"
#include "hcg/rng.hpp"

namespace hcg {

struct Conv1dTrace {
  Matrix xcol;    // T x (in_channels * kernel_len), lagged input patches
  Matrix preact;  // T x out_channels
};

// Causal 1-D convolution over a time-major sequence (T x in_channels).
// Each output channel owns a kernel spanning every input channel, so the
// kernel width always equals the layer's input channel count. Left zero
// padding keeps the output length at T. ReLU is applied in the layer.
class Conv1dLayer {
 public:
  Conv1dLayer(std::size_t in_channels, std::size_t out_channels, std::size_t kernel_len,
              const std::string& name, bool use_bias = true);

  void init_glorot(Rng& rng);

  Matrix forward(const Matrix& x) const;
  Matrix forward(const Matrix& x, Conv1dTrace& trace) const;

  // Accumulates into kernel/bias grads, returns dL/dx (T x in_channels).
  Matrix backward(const Matrix& dy, const Conv1dTrace& trace);

  std::size_t in_channels() const { return in_; }
  std::size_t out_channels() const { return out_; }
  std::size_t kernel_len() const { return k_; }
  bool use_bias() const { return use_bias_; }
  std::size_t param_count() const { return out_ * in_ * k_ + (use_bias_ ? out_ : 0); }

  // Kernel row d holds channel d's taps, laid out channel-major: the tap
  // for input channel n at lag j lives at column n * kernel_len + j.
  ParamTensor kernel;  // out_channels x (in_channels * kernel_len)
  ParamTensor bias;    // 1 x out_channels

 private:
  Matrix im2col(const Matrix& x) const;

  std::size_t in_ = 0;
  std::size_t out_ = 0;
  std::size_t k_ = 0;
  bool use_bias_ = true;
};

}  // namespace hcg
