#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "hcg/matrix.hpp"
#include "hcg/param.hpp"
#include "hcg/rng.hpp"

namespace hcg {

// Gate weights act on the stacked vector [y, h]: a = theta * [y; h] + b.
// All three gate blocks share the H x (input + H) shape.
struct GruLayerParams {
  std::size_t input = 0;
  std::size_t hidden = 0;
  ParamTensor theta_r, theta_u, theta_c;  // H x (input + H)
  ParamTensor b_r, b_u, b_c;              // 1 x H

  GruLayerParams() = default;
  GruLayerParams(std::size_t input_size, std::size_t hidden_size, const std::string& name);

  void init_glorot(Rng& rng);
  std::size_t param_count() const { return 3 * (hidden * (input + hidden) + hidden); }
  std::vector<ParamTensor*> params();
};

struct GruCellTrace {
  std::vector<double> r, u, c;
};

// One recurrence step:
//   r = sigmoid(theta_r [y; h] + b_r)
//   u = sigmoid(theta_u [y; h] + b_u)
//   c = tanh(theta_c [y; r*h] + b_c)
//   h_next = u * h_prev + (1 - u) * c
// The update gate scales the previous state.
std::vector<double> gru_cell(const std::vector<double>& y, const std::vector<double>& h_prev,
                             const GruLayerParams& p, GruCellTrace* trace = nullptr);

struct GruTrace {
  Matrix x;            // T x in
  Matrix h;            // (T+1) x H, row 0 is the initial state
  Matrix r, u, c, rh;  // T x H; rh holds r * h_prev
};

// Folds gru_cell over the sequence; returns every hidden state (T x H).
// h0 empty means all-zeros.
Matrix gru_layer_forward(const Matrix& seq, const GruLayerParams& p,
                         const std::vector<double>& h0 = {});
Matrix gru_layer_forward(const Matrix& seq, const GruLayerParams& p, const std::vector<double>& h0,
                         GruTrace& trace);

// Backpropagation through time. dy carries dL/dh_t for every step (rows of
// zeros where nothing is attached). Accumulates parameter grads, returns dL/dseq.
Matrix gru_layer_backward(const Matrix& dy, GruLayerParams& p, const GruTrace& trace);

}  // namespace hcg
