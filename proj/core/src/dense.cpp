#include "hcg/dense.hpp"

#include <cmath>

#include "hcg/error.hpp"

namespace hcg {

DenseLayer::DenseLayer(std::size_t in, std::size_t out, bool relu, const std::string& name)
    : weight(name + ".weight", Matrix(in, out)),
      bias(name + ".bias", Matrix(1, out)),
      in_(in),
      out_(out),
      relu_(relu) {
  if (in == 0 || out == 0) throw DimensionError("dense " + name + ": zero dimension");
}

void DenseLayer::init_glorot(Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(in_ + out_));
  for (std::size_t i = 0; i < weight.value.size(); ++i) {
    weight.value.data()[i] = rng.uniform(-limit, limit);
  }
  bias.value.fill(0.0);
}

static Matrix affine(const Matrix& x, const Matrix& w, const Matrix& b) {
  Matrix y = matmul(x, w);
  for (std::size_t r = 0; r < y.rows(); ++r) {
    for (std::size_t c = 0; c < y.cols(); ++c) y(r, c) += b(0, c);
  }
  return y;
}

Matrix DenseLayer::forward(const Matrix& x) const {
  if (x.cols() != in_) {
    throw DimensionError("dense " + weight.name + ": input " + x.shape_str() + ", expected cols " +
                         std::to_string(in_));
  }
  Matrix y = affine(x, weight.value, bias.value);
  if (relu_) {
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (y.data()[i] < 0.0) y.data()[i] = 0.0;
    }
  }
  return y;
}

Matrix DenseLayer::forward(const Matrix& x, DenseTrace& trace) const {
  if (x.cols() != in_) {
    throw DimensionError("dense " + weight.name + ": input " + x.shape_str() + ", expected cols " +
                         std::to_string(in_));
  }
  trace.input = x;
  Matrix y = affine(x, weight.value, bias.value);
  if (relu_) {
    trace.preact = y;
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (y.data()[i] < 0.0) y.data()[i] = 0.0;
    }
  }
  return y;
}

Matrix DenseLayer::backward(const Matrix& dy, const DenseTrace& trace) {
  Matrix d = dy;
  if (relu_) {
    if (!d.same_shape(trace.preact)) {
      throw DimensionError("dense backward: " + d.shape_str() + " vs " + trace.preact.shape_str());
    }
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (trace.preact.data()[i] <= 0.0) d.data()[i] = 0.0;
    }
  }
  Matrix dw = matmul_tn(trace.input, d);
  add_in_place(weight.grad, dw);
  for (std::size_t c = 0; c < out_; ++c) {
    double s = 0.0;
    for (std::size_t r = 0; r < d.rows(); ++r) s += d(r, c);
    bias.grad(0, c) += s;
  }
  return matmul_nt(d, weight.value);
}

}  // namespace hcg
