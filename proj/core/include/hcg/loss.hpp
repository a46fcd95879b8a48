#pragma once

#include <cstddef>
#include <vector>

#include "hcg/matrix.hpp"

namespace hcg {

// Row-wise softmax with max subtraction for overflow safety.
Matrix softmax(const Matrix& logits);

// Index of the largest entry; ties resolve to the lowest index.
std::size_t argmax_class(const std::vector<double>& probs);
std::size_t argmax_row(const Matrix& m, std::size_t row);

// Squared-error loss summed over samples and classes. Targets must be
// one-hot rows; anything else is a ValueError.
double mse_loss(const Matrix& probs, const Matrix& targets);

// Gradient of the summed squared error with respect to the logits that
// produced `probs` via softmax. Returns dL/dlogits, same shape as probs.
Matrix mse_softmax_backward(const Matrix& probs, const Matrix& targets);

}  // namespace hcg
