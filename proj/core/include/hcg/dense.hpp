#pragma once

#include <cstddef>
#include <string>

#include "hcg/matrix.hpp"
#include "hcg/param.hpp"
#include "hcg/rng.hpp"

namespace hcg {

struct DenseTrace {
  Matrix input;   // batch x in
  Matrix preact;  // batch x out, pre-activation (only kept when relu)
};

// Fully connected layer: y = x * W + b, optional ReLU.
class DenseLayer {
 public:
  DenseLayer(std::size_t in, std::size_t out, bool relu, const std::string& name);

  void init_glorot(Rng& rng);

  Matrix forward(const Matrix& x) const;
  Matrix forward(const Matrix& x, DenseTrace& trace) const;

  // Accumulates into weight/bias grads, returns dL/dx.
  Matrix backward(const Matrix& dy, const DenseTrace& trace);

  std::size_t in_dim() const { return in_; }
  std::size_t out_dim() const { return out_; }
  bool relu() const { return relu_; }
  std::size_t param_count() const { return in_ * out_ + out_; }

  ParamTensor weight;  // in x out
  ParamTensor bias;    // 1 x out

 private:
  std::size_t in_ = 0;
  std::size_t out_ = 0;
  bool relu_ = false;
};

}  // namespace hcg
