#pragma once

#include <string>
#include <utility>

#include "hcg/matrix.hpp"

namespace hcg {

// A trainable tensor: value plus an accumulated gradient of the same shape.
struct ParamTensor {
  std::string name;
  Matrix value;
  Matrix grad;

  ParamTensor() = default;
  ParamTensor(std::string n, Matrix v)
      : name(std::move(n)), value(std::move(v)), grad(value.rows(), value.cols()) {}

  void zero_grad() { grad.fill(0.0); }
};

}  // namespace hcg
