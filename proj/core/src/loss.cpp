#include "hcg/loss.hpp"

#include <cmath>

#include "hcg/error.hpp"

namespace hcg {

Matrix softmax(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  if (logits.cols() == 0) throw DimensionError("softmax: zero columns");
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    double mx = logits(r, 0);
    for (std::size_t c = 1; c < logits.cols(); ++c) {
      if (logits(r, c) > mx) mx = logits(r, c);
    }
    double sum = 0.0;
    for (std::size_t c = 0; c < logits.cols(); ++c) {
      const double e = std::exp(logits(r, c) - mx);
      out(r, c) = e;
      sum += e;
    }
    for (std::size_t c = 0; c < logits.cols(); ++c) out(r, c) /= sum;
  }
  return out;
}

std::size_t argmax_class(const std::vector<double>& probs) {
  if (probs.empty()) throw ValueError("argmax: empty vector");
  std::size_t best = 0;
  for (std::size_t i = 1; i < probs.size(); ++i) {
    if (probs[i] > probs[best]) best = i;
  }
  return best;
}

std::size_t argmax_row(const Matrix& m, std::size_t row) {
  if (m.cols() == 0) throw ValueError("argmax: empty row");
  std::size_t best = 0;
  for (std::size_t c = 1; c < m.cols(); ++c) {
    if (m(row, c) > m(row, best)) best = c;
  }
  return best;
}

static void check_one_hot(const Matrix& targets) {
  for (std::size_t r = 0; r < targets.rows(); ++r) {
    std::size_t ones = 0;
    for (std::size_t c = 0; c < targets.cols(); ++c) {
      const double v = targets(r, c);
      if (v == 1.0) {
        ++ones;
      } else if (v != 0.0) {
        throw ValueError("targets must be one-hot: row " + std::to_string(r));
      }
    }
    if (ones != 1) {
      throw ValueError("targets must be one-hot: row " + std::to_string(r));
    }
  }
}

double mse_loss(const Matrix& probs, const Matrix& targets) {
  if (!probs.same_shape(targets)) {
    throw DimensionError("mse_loss: " + probs.shape_str() + " vs " + targets.shape_str());
  }
  check_one_hot(targets);
  double loss = 0.0;
  for (std::size_t r = 0; r < probs.rows(); ++r) {
    for (std::size_t c = 0; c < probs.cols(); ++c) {
      const double d = probs(r, c) - targets(r, c);
      loss += d * d;
    }
  }
  return loss;
}

Matrix mse_softmax_backward(const Matrix& probs, const Matrix& targets) {
  if (!probs.same_shape(targets)) {
    throw DimensionError("mse_softmax_backward: " + probs.shape_str() + " vs " +
                         targets.shape_str());
  }
  Matrix dlogits(probs.rows(), probs.cols());
  for (std::size_t r = 0; r < probs.rows(); ++r) {
    // g = dL/dprobs; route through the softmax Jacobian:
    // dz_k = p_k * (g_k - sum_i g_i * p_i)
    double dot = 0.0;
    for (std::size_t c = 0; c < probs.cols(); ++c) {
      const double g = 2.0 * (probs(r, c) - targets(r, c));
      dot += g * probs(r, c);
    }
    for (std::size_t c = 0; c < probs.cols(); ++c) {
      const double g = 2.0 * (probs(r, c) - targets(r, c));
      dlogits(r, c) = probs(r, c) * (g - dot);
    }
  }
  return dlogits;
}

}  // namespace hcg
