#include "hcg/gru.hpp"

#include <cmath>

#include "hcg/error.hpp"

namespace hcg {

GruLayerParams::GruLayerParams(std::size_t input_size, std::size_t hidden_size,
                               const std::string& name)
    : input(input_size),
      hidden(hidden_size),
      theta_r(name + ".theta_r", Matrix(hidden_size, input_size + hidden_size)),
      theta_u(name + ".theta_u", Matrix(hidden_size, input_size + hidden_size)),
      theta_c(name + ".theta_c", Matrix(hidden_size, input_size + hidden_size)),
      b_r(name + ".b_r", Matrix(1, hidden_size)),
      b_u(name + ".b_u", Matrix(1, hidden_size)),
      b_c(name + ".b_c", Matrix(1, hidden_size)) {
  if (input_size == 0 || hidden_size == 0) {
    throw DimensionError("gru " + name + ": zero dimension");
  }
}

void GruLayerParams::init_glorot(Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(input + 2 * hidden));
  for (ParamTensor* t : {&theta_r, &theta_u, &theta_c}) {
    for (std::size_t i = 0; i < t->value.size(); ++i) t->value.data()[i] = rng.uniform(-limit, limit);
  }
  b_r.value.fill(0.0);
  b_u.value.fill(0.0);
  b_c.value.fill(0.0);
}

std::vector<ParamTensor*> GruLayerParams::params() {
  return {&theta_r, &theta_u, &theta_c, &b_r, &b_u, &b_c};
}

std::vector<double> gru_cell(const std::vector<double>& y, const std::vector<double>& h_prev,
                             const GruLayerParams& p, GruCellTrace* trace) {
  if (y.size() != p.input) {
    throw DimensionError("gru_cell: input size " + std::to_string(y.size()) + ", expected " +
                         std::to_string(p.input));
  }
  if (h_prev.size() != p.hidden) {
    throw DimensionError("gru_cell: hidden size " + std::to_string(h_prev.size()) + ", expected " +
                         std::to_string(p.hidden));
  }
  const std::size_t H = p.hidden;
  const std::size_t in = p.input;
  std::vector<double> r(H), u(H), c(H), rh(H), h_next(H);
  auto gate_pre = [&](const Matrix& theta, const Matrix& b, const std::vector<double>& hid,
                      std::size_t j) {
    double s = 0.0;
    for (std::size_t k = 0; k < in; ++k) s += theta(j, k) * y[k];
    s += b(0, j);
    for (std::size_t k = 0; k < H; ++k) s += theta(j, in + k) * hid[k];
    return s;
  };
  for (std::size_t j = 0; j < H; ++j) {
    r[j] = sigmoid(gate_pre(p.theta_r.value, p.b_r.value, h_prev, j));
    u[j] = sigmoid(gate_pre(p.theta_u.value, p.b_u.value, h_prev, j));
  }
  for (std::size_t j = 0; j < H; ++j) rh[j] = r[j] * h_prev[j];
  for (std::size_t j = 0; j < H; ++j) {
    c[j] = std::tanh(gate_pre(p.theta_c.value, p.b_c.value, rh, j));
    h_next[j] = u[j] * h_prev[j] + (1.0 - u[j]) * c[j];
  }
  if (trace) {
    trace->r = r;
    trace->u = u;
    trace->c = c;
  }
  return h_next;
}

// Column slice [c0, c0+n) of theta, copied once per call so the inner loops
// stay row-contiguous.
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

static Matrix forward_impl(const Matrix& seq, const GruLayerParams& p, const std::vector<double>& h0,
                           GruTrace* trace) {
  if (seq.cols() != p.input) {
    throw DimensionError("gru layer: input " + seq.shape_str() + ", expected cols " +
                         std::to_string(p.input));
  }
  if (seq.rows() == 0) throw DimensionError("gru layer: empty sequence");
  if (!h0.empty() && h0.size() != p.hidden) {
    throw DimensionError("gru layer: h0 size " + std::to_string(h0.size()) + ", expected " +
                         std::to_string(p.hidden));
  }
  const std::size_t T = seq.rows();
  const std::size_t H = p.hidden;
  const std::size_t in = p.input;

  const Matrix tr_in = slice_cols(p.theta_r.value, 0, in);
  const Matrix tu_in = slice_cols(p.theta_u.value, 0, in);
  const Matrix tc_in = slice_cols(p.theta_c.value, 0, in);
  const Matrix tr_ht = slice_cols_t(p.theta_r.value, in, H);
  const Matrix tu_ht = slice_cols_t(p.theta_u.value, in, H);
  const Matrix tc_ht = slice_cols_t(p.theta_c.value, in, H);

  // Input contributions for the whole sequence, bias folded in.
  Matrix gr = matmul_nt(seq, tr_in);
  Matrix gu = matmul_nt(seq, tu_in);
  Matrix gc = matmul_nt(seq, tc_in);
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t j = 0; j < H; ++j) {
      gr(t, j) += p.b_r.value(0, j);
      gu(t, j) += p.b_u.value(0, j);
      gc(t, j) += p.b_c.value(0, j);
    }
  }

  Matrix out(T, H);
  std::vector<double> h(H, 0.0);
  if (!h0.empty()) h = h0;
  std::vector<double> ar(H), au(H), ac(H), r(H), u(H), c(H), rh(H);
  if (trace) {
    trace->x = seq;
    trace->h = Matrix(T + 1, H);
    trace->r = Matrix(T, H);
    trace->u = Matrix(T, H);
    trace->c = Matrix(T, H);
    trace->rh = Matrix(T, H);
    for (std::size_t j = 0; j < H; ++j) trace->h(0, j) = h[j];
  }
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t j = 0; j < H; ++j) {
      ar[j] = gr(t, j);
      au[j] = gu(t, j);
    }
    // a += theta_h * h, still ascending k per output element but k-outer so
    // the contiguous j loop vectorizes
    for (std::size_t k = 0; k < H; ++k) {
      const double hk = h[k];
      const double* wr = tr_ht.row(k);
      const double* wu = tu_ht.row(k);
      for (std::size_t j = 0; j < H; ++j) ar[j] += wr[j] * hk;
      for (std::size_t j = 0; j < H; ++j) au[j] += wu[j] * hk;
    }
    for (std::size_t j = 0; j < H; ++j) {
      r[j] = sigmoid(ar[j]);
      u[j] = sigmoid(au[j]);
    }
    for (std::size_t j = 0; j < H; ++j) {
      rh[j] = r[j] * h[j];
      ac[j] = gc(t, j);
    }
    for (std::size_t k = 0; k < H; ++k) {
      const double rhk = rh[k];
      const double* wc = tc_ht.row(k);
      for (std::size_t j = 0; j < H; ++j) ac[j] += wc[j] * rhk;
    }
    for (std::size_t j = 0; j < H; ++j) c[j] = std::tanh(ac[j]);
    for (std::size_t j = 0; j < H; ++j) {
      const double hn = u[j] * h[j] + (1.0 - u[j]) * c[j];
      out(t, j) = hn;
      h[j] = hn;
    }
    if (trace) {
      for (std::size_t j = 0; j < H; ++j) {
        trace->r(t, j) = r[j];
        trace->u(t, j) = u[j];
        trace->c(t, j) = c[j];
        trace->rh(t, j) = rh[j];
        trace->h(t + 1, j) = out(t, j);
      }
    }
  }
  return out;
}

Matrix gru_layer_forward(const Matrix& seq, const GruLayerParams& p, const std::vector<double>& h0) {
  return forward_impl(seq, p, h0, nullptr);
}

Matrix gru_layer_forward(const Matrix& seq, const GruLayerParams& p, const std::vector<double>& h0,
                         GruTrace& trace) {
  return forward_impl(seq, p, h0, &trace);
}

Matrix gru_layer_backward(const Matrix& dy, GruLayerParams& p, const GruTrace& trace) {
  const std::size_t T = trace.x.rows();
  const std::size_t H = p.hidden;
  const std::size_t in = p.input;
  if (dy.rows() != T || dy.cols() != H) {
    throw DimensionError("gru backward: upstream " + dy.shape_str() + ", expected " +
                         std::to_string(T) + "x" + std::to_string(H));
  }

  const Matrix tr_h = slice_cols(p.theta_r.value, in, H);
  const Matrix tu_h = slice_cols(p.theta_u.value, in, H);
  const Matrix tc_h = slice_cols(p.theta_c.value, in, H);

  Matrix da_r(T, H), da_u(T, H), da_c(T, H);
  std::vector<double> carry(H, 0.0), gh(H), dc(H), du(H), dr(H), drh(H), dhp(H), ac(H), au(H),
      ar(H);
  for (std::size_t ti = T; ti-- > 0;) {
    const double* hp = trace.h.row(ti);  // h_{t-1}
    const double* r = trace.r.row(ti);
    const double* u = trace.u.row(ti);
    const double* c = trace.c.row(ti);
    for (std::size_t j = 0; j < H; ++j) {
      gh[j] = dy(ti, j) + carry[j];
      du[j] = gh[j] * (hp[j] - c[j]);
      dc[j] = gh[j] * (1.0 - u[j]);
      dhp[j] = gh[j] * u[j];
      ac[j] = dc[j] * (1.0 - c[j] * c[j]);
    }
    // d(r*h) = theta_c_hidden^T * da_c
    for (std::size_t k = 0; k < H; ++k) drh[k] = 0.0;
    for (std::size_t j = 0; j < H; ++j) {
      const double* w = tc_h.row(j);
      const double a = ac[j];
      for (std::size_t k = 0; k < H; ++k) drh[k] += a * w[k];
    }
    for (std::size_t j = 0; j < H; ++j) {
      dr[j] = drh[j] * hp[j];
      dhp[j] += drh[j] * r[j];
      au[j] = du[j] * u[j] * (1.0 - u[j]);
      ar[j] = dr[j] * r[j] * (1.0 - r[j]);
    }
    for (std::size_t j = 0; j < H; ++j) {
      const double* wu = tu_h.row(j);
      const double* wr = tr_h.row(j);
      const double vu = au[j];
      const double vr = ar[j];
      for (std::size_t k = 0; k < H; ++k) dhp[k] += vu * wu[k];
      for (std::size_t k = 0; k < H; ++k) dhp[k] += vr * wr[k];
    }
    for (std::size_t j = 0; j < H; ++j) {
      da_r(ti, j) = ar[j];
      da_u(ti, j) = au[j];
      da_c(ti, j) = ac[j];
      carry[j] = dhp[j];
    }
  }

  // Batched parameter gradients. h_prev rows are trace.h rows 0..T-1.
  Matrix hprev(T, H);
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t j = 0; j < H; ++j) hprev(t, j) = trace.h(t, j);
  }
  struct GatePack {
    Matrix* da;
    ParamTensor* theta;
    ParamTensor* b;
    const Matrix* hid;  // hidden-side input of the gate
  };
  GatePack packs[3] = {{&da_r, &p.theta_r, &p.b_r, &hprev},
                       {&da_u, &p.theta_u, &p.b_u, &hprev},
                       {&da_c, &p.theta_c, &p.b_c, &trace.rh}};
  for (auto& g : packs) {
    const Matrix dth_in = matmul_tn(*g.da, trace.x);   // H x in
    const Matrix dth_h = matmul_tn(*g.da, *g.hid);     // H x H
    g.theta->grad.add_block(0, 0, dth_in);
    g.theta->grad.add_block(0, in, dth_h);
    for (std::size_t j = 0; j < H; ++j) {
      double s = 0.0;
      for (std::size_t t = 0; t < T; ++t) s += (*g.da)(t, j);
      g.b->grad(0, j) += s;
    }
  }

  const Matrix tr_in = slice_cols(p.theta_r.value, 0, in);
  const Matrix tu_in = slice_cols(p.theta_u.value, 0, in);
  const Matrix tc_in = slice_cols(p.theta_c.value, 0, in);
  Matrix dx = matmul(da_r, tr_in);
  add_in_place(dx, matmul(da_u, tu_in));
  add_in_place(dx, matmul(da_c, tc_in));
  return dx;
}

}  // namespace hcg
