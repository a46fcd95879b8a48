#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "hcg/matrix.hpp"
#include "hcg/param.hpp"
#include "hcg/rng.hpp"

namespace hcg {

// Standard LSTM with input/forget/cell/output gates, weights acting on the
// stacked vector [y, h] like the GRU layer. All four gate blocks share the
// H x (input + H) shape.
struct LstmLayerParams {
  std::size_t input = 0;
  std::size_t hidden = 0;
  ParamTensor w_i, w_f, w_g, w_o;  // H x (input + H)
  ParamTensor b_i, b_f, b_g, b_o;  // 1 x H

  LstmLayerParams() = default;
  LstmLayerParams(std::size_t input_size, std::size_t hidden_size, const std::string& name);

  void init_glorot(Rng& rng);
  std::size_t param_count() const { return 4 * (hidden * (input + hidden) + hidden); }
  std::vector<ParamTensor*> params();
};

struct LstmState {
  std::vector<double> h;
  std::vector<double> c;
};

//   i = sigmoid(w_i [y; h] + b_i)    f = sigmoid(w_f [y; h] + b_f)
//   g = tanh(w_g [y; h] + b_g)       o = sigmoid(w_o [y; h] + b_o)
//   c_next = f * c_prev + i * g      h_next = o * tanh(c_next)
LstmState lstm_cell(const std::vector<double>& y, const LstmState& state, const LstmLayerParams& p);

struct LstmTrace {
  Matrix x;           // T x in
  Matrix h;           // (T+1) x H
  Matrix cell;        // (T+1) x H
  Matrix i, f, g, o;  // T x H
  Matrix tc;          // T x H, tanh of the new cell state
};

Matrix lstm_layer_forward(const Matrix& seq, const LstmLayerParams& p);
Matrix lstm_layer_forward(const Matrix& seq, const LstmLayerParams& p, LstmTrace& trace);

// dy carries dL/dh_t per step. Accumulates parameter grads, returns dL/dseq.
Matrix lstm_layer_backward(const Matrix& dy, LstmLayerParams& p, const LstmTrace& trace);

}  // namespace hcg
