#include "hcg/lstm.hpp"

#include <cmath>

#include "hcg/error.hpp"

namespace hcg {

LstmLayerParams::LstmLayerParams(std::size_t input_size, std::size_t hidden_size,
                                 const std::string& name)
    : input(input_size),
      hidden(hidden_size),
      w_i(name + ".w_i", Matrix(hidden_size, input_size + hidden_size)),
      w_f(name + ".w_f", Matrix(hidden_size, input_size + hidden_size)),
      w_g(name + ".w_g", Matrix(hidden_size, input_size + hidden_size)),
      w_o(name + ".w_o", Matrix(hidden_size, input_size + hidden_size)),
      b_i(name + ".b_i", Matrix(1, hidden_size)),
      b_f(name + ".b_f", Matrix(1, hidden_size)),
      b_g(name + ".b_g", Matrix(1, hidden_size)),
      b_o(name + ".b_o", Matrix(1, hidden_size)) {
  if (input_size == 0 || hidden_size == 0) {
    throw DimensionError("lstm " + name + ": zero dimension");
  }
}

void LstmLayerParams::init_glorot(Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(input + 2 * hidden));
  for (ParamTensor* t : {&w_i, &w_f, &w_g, &w_o}) {
    for (std::size_t i = 0; i < t->value.size(); ++i) t->value.data()[i] = rng.uniform(-limit, limit);
  }
  for (ParamTensor* t : {&b_i, &b_f, &b_g, &b_o}) t->value.fill(0.0);
}

std::vector<ParamTensor*> LstmLayerParams::params() {
  return {&w_i, &w_f, &w_g, &w_o, &b_i, &b_f, &b_g, &b_o};
}

LstmState lstm_cell(const std::vector<double>& y, const LstmState& state,
                    const LstmLayerParams& p) {
  if (y.size() != p.input) {
    throw DimensionError("lstm_cell: input size " + std::to_string(y.size()) + ", expected " +
                         std::to_string(p.input));
  }
  if (state.h.size() != p.hidden || state.c.size() != p.hidden) {
    throw DimensionError("lstm_cell: state size mismatch, expected " + std::to_string(p.hidden));
  }
  const std::size_t H = p.hidden;
  const std::size_t in = p.input;
  auto gate_pre = [&](const Matrix& w, const Matrix& b, std::size_t j) {
    double s = 0.0;
    for (std::size_t k = 0; k < in; ++k) s += w(j, k) * y[k];
    s += b(0, j);
    for (std::size_t k = 0; k < H; ++k) s += w(j, in + k) * state.h[k];
    return s;
  };
  LstmState next;
  next.h.resize(H);
  next.c.resize(H);
  for (std::size_t j = 0; j < H; ++j) {
    const double i = sigmoid(gate_pre(p.w_i.value, p.b_i.value, j));
    const double f = sigmoid(gate_pre(p.w_f.value, p.b_f.value, j));
    const double g = std::tanh(gate_pre(p.w_g.value, p.b_g.value, j));
    const double o = sigmoid(gate_pre(p.w_o.value, p.b_o.value, j));
    next.c[j] = f * state.c[j] + i * g;
    next.h[j] = o * std::tanh(next.c[j]);
  }
  return next;
}

static Matrix slice_cols(const Matrix& m, std::size_t c0, std::size_t n) {
  Matrix out(m.rows(), n);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < n; ++c) out(r, c) = m(r, c0 + c);
  }
  return out;
}

// Same slice, transposed, for k-outer accumulation in the step loop.
static Matrix slice_cols_t(const Matrix& m, std::size_t c0, std::size_t n) {
  Matrix out(n, m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < n; ++c) out(c, r) = m(r, c0 + c);
  }
  return out;
}

static Matrix forward_impl(const Matrix& seq, const LstmLayerParams& p, LstmTrace* trace) {
  if (seq.cols() != p.input) {
    throw DimensionError("lstm layer: input " + seq.shape_str() + ", expected cols " +
                         std::to_string(p.input));
  }
  if (seq.rows() == 0) throw DimensionError("lstm layer: empty sequence");
  const std::size_t T = seq.rows();
  const std::size_t H = p.hidden;
  const std::size_t in = p.input;

  const Matrix wi_in = slice_cols(p.w_i.value, 0, in);
  const Matrix wf_in = slice_cols(p.w_f.value, 0, in);
  const Matrix wg_in = slice_cols(p.w_g.value, 0, in);
  const Matrix wo_in = slice_cols(p.w_o.value, 0, in);
  const Matrix wi_ht = slice_cols_t(p.w_i.value, in, H);
  const Matrix wf_ht = slice_cols_t(p.w_f.value, in, H);
  const Matrix wg_ht = slice_cols_t(p.w_g.value, in, H);
  const Matrix wo_ht = slice_cols_t(p.w_o.value, in, H);

  Matrix gi = matmul_nt(seq, wi_in);
  Matrix gf = matmul_nt(seq, wf_in);
  Matrix gg = matmul_nt(seq, wg_in);
  Matrix go = matmul_nt(seq, wo_in);
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t j = 0; j < H; ++j) {
      gi(t, j) += p.b_i.value(0, j);
      gf(t, j) += p.b_f.value(0, j);
      gg(t, j) += p.b_g.value(0, j);
      go(t, j) += p.b_o.value(0, j);
    }
  }

  Matrix out(T, H);
  std::vector<double> h(H, 0.0), cell(H, 0.0), iv(H), fv(H), gv(H), ov(H);
  if (trace) {
    trace->x = seq;
    trace->h = Matrix(T + 1, H);
    trace->cell = Matrix(T + 1, H);
    trace->i = Matrix(T, H);
    trace->f = Matrix(T, H);
    trace->g = Matrix(T, H);
    trace->o = Matrix(T, H);
    trace->tc = Matrix(T, H);
  }
  std::vector<double> ai(H), af(H), ag(H), ao(H);
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t j = 0; j < H; ++j) {
      ai[j] = gi(t, j);
      af[j] = gf(t, j);
      ag[j] = gg(t, j);
      ao[j] = go(t, j);
    }
    // a += w_h * h, ascending k per output element, k-outer so the j loop
    // vectorizes
    for (std::size_t k = 0; k < H; ++k) {
      const double hk = h[k];
      const double* pi = wi_ht.row(k);
      const double* pf = wf_ht.row(k);
      const double* pg = wg_ht.row(k);
      const double* po = wo_ht.row(k);
      for (std::size_t j = 0; j < H; ++j) ai[j] += pi[j] * hk;
      for (std::size_t j = 0; j < H; ++j) af[j] += pf[j] * hk;
      for (std::size_t j = 0; j < H; ++j) ag[j] += pg[j] * hk;
      for (std::size_t j = 0; j < H; ++j) ao[j] += po[j] * hk;
    }
    for (std::size_t j = 0; j < H; ++j) {
      iv[j] = sigmoid(ai[j]);
      fv[j] = sigmoid(af[j]);
      gv[j] = std::tanh(ag[j]);
      ov[j] = sigmoid(ao[j]);
    }
    for (std::size_t j = 0; j < H; ++j) {
      const double cn = fv[j] * cell[j] + iv[j] * gv[j];
      const double tc = std::tanh(cn);
      if (trace) {
        trace->i(t, j) = iv[j];
        trace->f(t, j) = fv[j];
        trace->g(t, j) = gv[j];
        trace->o(t, j) = ov[j];
        trace->tc(t, j) = tc;
        trace->h(t, j) = h[j];
        trace->cell(t, j) = cell[j];
      }
      cell[j] = cn;
      const double hn = ov[j] * tc;
      out(t, j) = hn;
      h[j] = hn;
    }
  }
  if (trace) {
    for (std::size_t j = 0; j < H; ++j) {
      trace->h(T, j) = h[j];
      trace->cell(T, j) = cell[j];
    }
  }
  return out;
}

Matrix lstm_layer_forward(const Matrix& seq, const LstmLayerParams& p) {
  return forward_impl(seq, p, nullptr);
}

Matrix lstm_layer_forward(const Matrix& seq, const LstmLayerParams& p, LstmTrace& trace) {
  return forward_impl(seq, p, &trace);
}

Matrix lstm_layer_backward(const Matrix& dy, LstmLayerParams& p, const LstmTrace& trace) {
  const std::size_t T = trace.x.rows();
  const std::size_t H = p.hidden;
  const std::size_t in = p.input;
  if (dy.rows() != T || dy.cols() != H) {
    throw DimensionError("lstm backward: upstream " + dy.shape_str() + ", expected " +
                         std::to_string(T) + "x" + std::to_string(H));
  }

  const Matrix wi_h = slice_cols(p.w_i.value, in, H);
  const Matrix wf_h = slice_cols(p.w_f.value, in, H);
  const Matrix wg_h = slice_cols(p.w_g.value, in, H);
  const Matrix wo_h = slice_cols(p.w_o.value, in, H);

  Matrix da_i(T, H), da_f(T, H), da_g(T, H), da_o(T, H);
  std::vector<double> hcarry(H, 0.0), ccarry(H, 0.0), gh(H), dcell(H), dhp(H);
  for (std::size_t ti = T; ti-- > 0;) {
    const double* iv = trace.i.row(ti);
    const double* fv = trace.f.row(ti);
    const double* gv = trace.g.row(ti);
    const double* ov = trace.o.row(ti);
    const double* tc = trace.tc.row(ti);
    const double* cp = trace.cell.row(ti);  // c_{t-1}
    for (std::size_t j = 0; j < H; ++j) {
      gh[j] = dy(ti, j) + hcarry[j];
      const double go = gh[j] * tc[j];
      dcell[j] = gh[j] * ov[j] * (1.0 - tc[j] * tc[j]) + ccarry[j];
      const double df = dcell[j] * cp[j];
      const double di = dcell[j] * gv[j];
      const double dg = dcell[j] * iv[j];
      ccarry[j] = dcell[j] * fv[j];
      da_i(ti, j) = di * iv[j] * (1.0 - iv[j]);
      da_f(ti, j) = df * fv[j] * (1.0 - fv[j]);
      da_g(ti, j) = dg * (1.0 - gv[j] * gv[j]);
      da_o(ti, j) = go * ov[j] * (1.0 - ov[j]);
    }
    for (std::size_t k = 0; k < H; ++k) dhp[k] = 0.0;
    for (std::size_t j = 0; j < H; ++j) {
      const double* pi = wi_h.row(j);
      const double* pf = wf_h.row(j);
      const double* pg = wg_h.row(j);
      const double* po = wo_h.row(j);
      const double vi = da_i(ti, j);
      const double vf = da_f(ti, j);
      const double vg = da_g(ti, j);
      const double vo = da_o(ti, j);
      for (std::size_t k = 0; k < H; ++k) dhp[k] += vi * pi[k];
      for (std::size_t k = 0; k < H; ++k) dhp[k] += vf * pf[k];
      for (std::size_t k = 0; k < H; ++k) dhp[k] += vg * pg[k];
      for (std::size_t k = 0; k < H; ++k) dhp[k] += vo * po[k];
    }
    for (std::size_t k = 0; k < H; ++k) hcarry[k] = dhp[k];
  }

  Matrix hprev(T, H);
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t j = 0; j < H; ++j) hprev(t, j) = trace.h(t, j);
  }
  struct GatePack {
    Matrix* da;
    ParamTensor* w;
    ParamTensor* b;
  };
  GatePack packs[4] = {{&da_i, &p.w_i, &p.b_i},
                       {&da_f, &p.w_f, &p.b_f},
                       {&da_g, &p.w_g, &p.b_g},
                       {&da_o, &p.w_o, &p.b_o}};
  for (auto& g : packs) {
    g.w->grad.add_block(0, 0, matmul_tn(*g.da, trace.x));
    g.w->grad.add_block(0, in, matmul_tn(*g.da, hprev));
    for (std::size_t j = 0; j < H; ++j) {
      double s = 0.0;
      for (std::size_t t = 0; t < T; ++t) s += (*g.da)(t, j);
      g.b->grad(0, j) += s;
    }
  }

  Matrix dx = matmul(da_i, slice_cols(p.w_i.value, 0, in));
  add_in_place(dx, matmul(da_f, slice_cols(p.w_f.value, 0, in)));
  add_in_place(dx, matmul(da_g, slice_cols(p.w_g.value, 0, in)));
  add_in_place(dx, matmul(da_o, slice_cols(p.w_o.value, 0, in)));
  return dx;
}

}  // namespace hcg
