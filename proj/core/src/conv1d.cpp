#include "hcg/conv1d.hpp"

#include <cmath>

#include "hcg/error.hpp"

namespace hcg {

Conv1dLayer::Conv1dLayer(std::size_t in_channels, std::size_t out_channels, std::size_t kernel_len,
                         const std::string& name, bool use_bias)
    : kernel(name + ".kernel", Matrix(out_channels, in_channels * kernel_len)),
      bias(name + ".bias", Matrix(1, out_channels)),
      in_(in_channels),
      out_(out_channels),
      k_(kernel_len),
      use_bias_(use_bias) {
  if (in_channels == 0 || out_channels == 0 || kernel_len == 0) {
    throw DimensionError("conv " + name + ": zero dimension");
  }
}

void Conv1dLayer::init_glorot(Rng& rng) {
  const double fan_in = static_cast<double>(in_ * k_);
  const double fan_out = static_cast<double>(out_ * k_);
  const double limit = std::sqrt(6.0 / (fan_in + fan_out));
  for (std::size_t i = 0; i < kernel.value.size(); ++i) {
    kernel.value.data()[i] = rng.uniform(-limit, limit);
  }
  bias.value.fill(0.0);
}

Matrix Conv1dLayer::im2col(const Matrix& x) const {
  if (x.cols() != in_) {
    throw DimensionError("conv " + kernel.name + ": input " + x.shape_str() +
                         ", expected cols " + std::to_string(in_));
  }
  if (x.rows() == 0) throw DimensionError("conv " + kernel.name + ": empty sequence");
  const std::size_t T = x.rows();
  Matrix xcol(T, in_ * k_);
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t n = 0; n < in_; ++n) {
      for (std::size_t j = 0; j < k_; ++j) {
        // lag j reaches back in time; before the start it reads zero
        xcol(t, n * k_ + j) = (t >= j) ? x(t - j, n) : 0.0;
      }
    }
  }
  return xcol;
}

static Matrix conv_affine(const Matrix& xcol, const Matrix& kernel, const Matrix* bias) {
  Matrix y = matmul_nt(xcol, kernel);
  if (bias) {
    for (std::size_t r = 0; r < y.rows(); ++r) {
      for (std::size_t c = 0; c < y.cols(); ++c) y(r, c) += (*bias)(0, c);
    }
  }
  return y;
}

Matrix Conv1dLayer::forward(const Matrix& x) const {
  Matrix y = conv_affine(im2col(x), kernel.value, use_bias_ ? &bias.value : nullptr);
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y.data()[i] < 0.0) y.data()[i] = 0.0;
  }
  return y;
}

Matrix Conv1dLayer::forward(const Matrix& x, Conv1dTrace& trace) const {
  trace.xcol = im2col(x);
  trace.preact = conv_affine(trace.xcol, kernel.value, use_bias_ ? &bias.value : nullptr);
  Matrix y = trace.preact;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y.data()[i] < 0.0) y.data()[i] = 0.0;
  }
  return y;
}

Matrix Conv1dLayer::backward(const Matrix& dy, const Conv1dTrace& trace) {
  if (!dy.same_shape(trace.preact)) {
    throw DimensionError("conv backward: " + dy.shape_str() + " vs " + trace.preact.shape_str());
  }
  Matrix d = dy;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (trace.preact.data()[i] <= 0.0) d.data()[i] = 0.0;
  }
  Matrix dk = matmul_tn(d, trace.xcol);
  add_in_place(kernel.grad, dk);
  if (use_bias_) {
    for (std::size_t c = 0; c < out_; ++c) {
      double s = 0.0;
      for (std::size_t r = 0; r < d.rows(); ++r) s += d(r, c);
      bias.grad(0, c) += s;
    }
  }
  const Matrix dxcol = matmul(d, kernel.value);
  const std::size_t T = d.rows();
  Matrix dx(T, in_);
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t n = 0; n < in_; ++n) {
      for (std::size_t j = 0; j < k_; ++j) {
        if (t >= j) dx(t - j, n) += dxcol(t, n * k_ + j);
      }
    }
  }
  return dx;
}

}  // namespace hcg
