#include <cmath>
#include <vector>

#include "doctest.h"
#include "hcg/conv1d.hpp"
#include "hcg/dense.hpp"
#include "hcg/error.hpp"
#include "hcg/gru.hpp"
#include "hcg/loss.hpp"
#include "hcg/lstm.hpp"
#include "hcg/rng.hpp"

using namespace hcg;

// Expected values below come from the scalar reference scripts in
// tests/oracles/, run independently of this code.

TEST_CASE("conv1d matches the basic scalar fixture") {
  Conv1dLayer conv(2, 1, 2, "c");
  conv.kernel.value = Matrix{{1.0, 0.0, 0.0, 1.0}};
  Matrix x{{1.0, 2.0}, {3.0, 4.0}, {5.0, 6.0}};
  Matrix y = conv.forward(x);
  REQUIRE(y.rows() == 3);
  REQUIRE(y.cols() == 1);
  CHECK(y(0, 0) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(y(1, 0) == doctest::Approx(5.0).epsilon(1e-9));
  CHECK(y(2, 0) == doctest::Approx(9.0).epsilon(1e-9));
}

TEST_CASE("conv1d matches the two-kernel scalar fixture") {
  Conv1dLayer conv(2, 2, 3, "c");
  conv.kernel.value = Matrix{{0.5, -1.0, 0.25, 1.0, 0.0, -0.5},
                             {-0.3, 0.2, 0.1, 0.4, -0.6, 0.9}};
  conv.bias.value = Matrix{{0.1, -0.2}};
  Matrix x{{1.0, 2.0}, {3.0, 4.0}, {5.0, 6.0}};
  Matrix y = conv.forward(x);
  const double expected[3][2] = {{2.6, 0.3}, {4.6, 0.0}, {4.85, 0.8000000000000007}};
  for (std::size_t t = 0; t < 3; ++t)
    for (std::size_t d = 0; d < 2; ++d)
      CHECK(std::abs(y(t, d) - expected[t][d]) < 1e-9);
}

TEST_CASE("conv1d output length equals T for every tested (T, k)") {
  Rng rng(3);
  for (std::size_t T : {1, 2, 3, 5, 8, 13, 32, 64}) {
    for (std::size_t k : {1, 2, 3, 5, 8}) {
      Conv1dLayer conv(3, 4, k, "c");
      conv.init_glorot(rng);
      Matrix x(T, 3);
      for (std::size_t i = 0; i < x.size(); ++i) x.data()[i] = rng.uniform(-1.0, 1.0);
      Matrix y = conv.forward(x);
      CHECK(y.rows() == T);
      CHECK(y.cols() == 4);
      for (std::size_t i = 0; i < y.size(); ++i) CHECK(y.data()[i] >= 0.0);
    }
  }
}

TEST_CASE("conv1d without bias has no bias parameters") {
  Conv1dLayer with(2, 3, 4, "a");
  Conv1dLayer without(2, 3, 4, "b", false);
  CHECK(with.param_count() == 2 * 3 * 4 + 3);
  CHECK(without.param_count() == 2 * 3 * 4);
}

TEST_CASE("dense matches the scalar fixture") {
  DenseLayer fc(2, 2, false, "fc");
  fc.weight.value = Matrix{{1.0, 3.0}, {2.0, 4.0}};
  fc.bias.value = Matrix{{0.5, -0.5}};
  Matrix y = fc.forward(Matrix{{1.0, 2.0}});
  CHECK(y(0, 0) == doctest::Approx(5.5).epsilon(1e-12));
  CHECK(y(0, 1) == doctest::Approx(10.5).epsilon(1e-12));
}

TEST_CASE("softmax matches the (0, ln 2) fixture and stays normalized") {
  Matrix p = softmax(Matrix{{0.0, std::log(2.0)}});
  CHECK(std::abs(p(0, 0) - 0.3333333333333333) < 1e-12);
  CHECK(std::abs(p(0, 1) - 0.6666666666666666) < 1e-12);

  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    Matrix z(3, 6);
    for (std::size_t i = 0; i < z.size(); ++i) z.data()[i] = rng.uniform(-30.0, 30.0);
    Matrix q = softmax(z);
    for (std::size_t r = 0; r < q.rows(); ++r) {
      double sum = 0.0;
      for (std::size_t c = 0; c < q.cols(); ++c) {
        CHECK(q(r, c) >= 0.0);
        sum += q(r, c);
      }
      CHECK(std::abs(sum - 1.0) < 1e-12);
    }
    // shift invariance: adding a constant per row changes nothing material
    Matrix shifted = z;
    for (std::size_t r = 0; r < z.rows(); ++r)
      for (std::size_t c = 0; c < z.cols(); ++c) shifted(r, c) += 17.5;
    Matrix qs = softmax(shifted);
    for (std::size_t i = 0; i < q.size(); ++i) CHECK(std::abs(q.data()[i] - qs.data()[i]) < 1e-12);
  }
}

TEST_CASE("argmax breaks ties toward the lowest index") {
  CHECK(argmax_class({0.2, 0.5, 0.3}) == 1);
  CHECK(argmax_class({0.4, 0.4, 0.2}) == 0);
  CHECK(argmax_class({1.0}) == 0);
  CHECK_THROWS_AS(argmax_class({}), ValueError);

  Matrix m{{0.1, 0.1, 0.8}, {0.5, 0.5, 0.0}};
  CHECK(argmax_row(m, 0) == 2);
  CHECK(argmax_row(m, 1) == 0);
}

TEST_CASE("mse loss matches the uniform fixture and adds over rows") {
  Matrix pred{{0.25, 0.25, 0.25, 0.25}};
  Matrix tgt{{1.0, 0.0, 0.0, 0.0}};
  CHECK(mse_loss(pred, tgt) == doctest::Approx(0.75).epsilon(1e-12));

  Matrix pred2{{0.25, 0.25, 0.25, 0.25}, {0.7, 0.1, 0.1, 0.1}};
  Matrix tgt2{{1.0, 0.0, 0.0, 0.0}, {0.0, 1.0, 0.0, 0.0}};
  const double row1 = mse_loss(pred2.row_copy(0), tgt2.row_copy(0));
  const double row2 = mse_loss(pred2.row_copy(1), tgt2.row_copy(1));
  CHECK(mse_loss(pred2, tgt2) == doctest::Approx(row1 + row2).epsilon(1e-12));
}

TEST_CASE("mse loss rejects malformed targets") {
  Matrix pred{{0.5, 0.5}};
  CHECK_THROWS_AS(mse_loss(pred, Matrix{{0.5, 0.5}}), ValueError);    // not one-hot
  CHECK_THROWS_AS(mse_loss(pred, Matrix{{1.0, 1.0}}), ValueError);    // two hot
  CHECK_THROWS_AS(mse_loss(pred, Matrix{{0.0, 0.0}}), ValueError);    // no hot
  CHECK_THROWS_AS(mse_loss(pred, Matrix{{1.0}}), DimensionError);     // shape
}

TEST_CASE("softmax-mse gradient matches the scalar fixture") {
  // logits from x=0.7, w=(0.5,-0.25), b=(0.1,-0.1), target class 1
  DenseLayer fc(1, 2, false, "fc");
  fc.weight.value = Matrix{{0.5, -0.25}};
  fc.bias.value = Matrix{{0.1, -0.1}};
  Matrix x{{0.7}};
  DenseTrace trace;
  Matrix logits = fc.forward(x, trace);
  Matrix probs = softmax(logits);
  Matrix tgt{{0.0, 1.0}};
  CHECK(std::abs(mse_loss(probs, tgt) - 0.9077625117108488) < 1e-12);

  Matrix dz = mse_softmax_backward(probs, tgt);
  CHECK(std::abs(dz(0, 0) - 0.5923929259051637) < 1e-12);
  CHECK(std::abs(dz(0, 1) - (-0.5923929259051637)) < 1e-12);

  fc.backward(dz, trace);
  CHECK(std::abs(fc.weight.grad(0, 0) - 0.41467504813361455) < 1e-12);
  CHECK(std::abs(fc.weight.grad(0, 1) - (-0.41467504813361455)) < 1e-12);
  CHECK(std::abs(fc.bias.grad(0, 0) - 0.5923929259051637) < 1e-12);
  CHECK(std::abs(fc.bias.grad(0, 1) - (-0.5923929259051637)) < 1e-12);
}

TEST_CASE("gru cell matches the unit fixture") {
  GruLayerParams p(1, 1, "g");
  p.theta_r.value = Matrix{{1.0, 1.0}};
  p.theta_u.value = Matrix{{1.0, 1.0}};
  p.theta_c.value = Matrix{{1.0, 1.0}};
  GruCellTrace trace;
  std::vector<double> h = gru_cell({1.0}, {0.0}, p, &trace);
  CHECK(std::abs(trace.r[0] - 0.7310585786300049) < 1e-9);
  CHECK(std::abs(trace.u[0] - 0.7310585786300049) < 1e-9);
  CHECK(std::abs(trace.c[0] - 0.7615941559557649) < 1e-9);
  CHECK(std::abs(h[0] - 0.20482421480982513) < 1e-9);
}

TEST_CASE("gru cell matches the two-step fixture") {
  GruLayerParams p(1, 1, "g");
  p.theta_r.value = Matrix{{0.3, -0.2}};
  p.b_r.value = Matrix{{0.1}};
  p.theta_u.value = Matrix{{-0.5, 0.4}};
  p.b_u.value = Matrix{{-0.3}};
  p.theta_c.value = Matrix{{0.8, 0.6}};
  p.b_c.value = Matrix{{0.2}};

  GruCellTrace t1;
  std::vector<double> h = gru_cell({1.0}, {0.0}, p, &t1);
  CHECK(std::abs(t1.r[0] - 0.598687660112452) < 1e-9);
  CHECK(std::abs(t1.u[0] - 0.31002551887238755) < 1e-9);
  CHECK(std::abs(t1.c[0] - 0.7615941559557649) < 1e-9);
  CHECK(std::abs(h[0] - 0.5254805325854008) < 1e-9);

  GruCellTrace t2;
  h = gru_cell({-0.5}, h, p, &t2);
  CHECK(std::abs(t2.r[0] - 0.4613035119870669) < 1e-9);
  CHECK(std::abs(t2.u[0] - 0.5399626312142154) < 1e-9);
  CHECK(std::abs(t2.c[0] - (-0.05450232805654627)) < 1e-9);
  CHECK(std::abs(h[0] - 0.2586667434348271) < 1e-9);
}

TEST_CASE("gru with zero parameters halves the carried state each step") {
  GruLayerParams p(2, 3, "g");
  std::vector<double> h = gru_cell({5.0, -5.0}, {0.0, 0.0, 0.0}, p);
  for (double v : h) CHECK(v == 0.0);  // r=u=0.5, c=0 exactly

  Matrix seq(4, 2);
  Matrix out = gru_layer_forward(seq, p, {1.0, -2.0, 0.5});
  for (std::size_t t = 0; t < 4; ++t) {
    const double f = std::pow(0.5, static_cast<double>(t + 1));
    CHECK(out(t, 0) == doctest::Approx(1.0 * f).epsilon(1e-12));
    CHECK(out(t, 1) == doctest::Approx(-2.0 * f).epsilon(1e-12));
    CHECK(out(t, 2) == doctest::Approx(0.5 * f).epsilon(1e-12));
  }
}

TEST_CASE("gru state stays inside the convex bound") {
  // h_next is a convex mix of h_prev and tanh output, so the sup norm can
  // never exceed max(|h_prev|, 1)
  Rng rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    GruLayerParams p(3, 4, "g");
    p.init_glorot(rng);
    std::vector<double> h(4), y(3);
    for (auto& v : h) v = rng.uniform(-3.0, 3.0);
    for (auto& v : y) v = rng.uniform(-5.0, 5.0);
    double bound = 1.0;
    for (double v : h) bound = std::max(bound, std::abs(v));
    std::vector<double> hn = gru_cell(y, h, p);
    for (double v : hn) CHECK(std::abs(v) <= bound + 1e-12);
  }
}

TEST_CASE("gru layer over one step reduces to the cell") {
  Rng rng(19);
  GruLayerParams p(3, 5, "g");
  p.init_glorot(rng);
  Matrix seq(1, 3);
  for (std::size_t i = 0; i < seq.size(); ++i) seq.data()[i] = rng.uniform(-1.0, 1.0);
  Matrix out = gru_layer_forward(seq, p);
  std::vector<double> y(seq.data(), seq.data() + 3);
  std::vector<double> h = gru_cell(y, std::vector<double>(5, 0.0), p);
  for (std::size_t j = 0; j < 5; ++j) CHECK(std::abs(out(0, j) - h[j]) < 1e-12);
}

TEST_CASE("gru layer composes the cell across time") {
  Rng rng(23);
  GruLayerParams p(2, 4, "g");
  p.init_glorot(rng);
  Matrix seq(6, 2);
  for (std::size_t i = 0; i < seq.size(); ++i) seq.data()[i] = rng.uniform(-1.5, 1.5);
  Matrix out = gru_layer_forward(seq, p);
  std::vector<double> h(4, 0.0);
  for (std::size_t t = 0; t < 6; ++t) {
    std::vector<double> y(seq.row(t), seq.row(t) + 2);
    h = gru_cell(y, h, p);
    for (std::size_t j = 0; j < 4; ++j) CHECK(std::abs(out(t, j) - h[j]) < 1e-12);
  }
}

TEST_CASE("lstm cell matches the three-step fixture") {
  LstmLayerParams p(1, 1, "l");
  p.w_i.value = Matrix{{0.6, -0.1}};
  p.b_i.value = Matrix{{0.05}};
  p.w_f.value = Matrix{{0.2, 0.3}};
  p.b_f.value = Matrix{{-0.15}};
  p.w_g.value = Matrix{{0.9, -0.4}};
  p.w_o.value = Matrix{{-0.7, 0.5}};
  p.b_o.value = Matrix{{0.1}};

  const double expected_h[3] = {0.15544924860374779, 0.15367304950303912, -0.07375394651497837};
  const double expected_c[3] = {0.47061519511150285, 0.31715033130280984, -0.11076261785371933};
  const double inputs[3] = {1.0, 0.25, -0.75};
  LstmState s{{0.0}, {0.0}};
  for (int t = 0; t < 3; ++t) {
    s = lstm_cell({inputs[t]}, s, p);
    CHECK(std::abs(s.h[0] - expected_h[t]) < 1e-9);
    CHECK(std::abs(s.c[0] - expected_c[t]) < 1e-9);
  }
}

TEST_CASE("lstm layer composes the cell across time") {
  Rng rng(29);
  LstmLayerParams p(3, 4, "l");
  p.init_glorot(rng);
  Matrix seq(5, 3);
  for (std::size_t i = 0; i < seq.size(); ++i) seq.data()[i] = rng.uniform(-1.0, 1.0);
  Matrix out = lstm_layer_forward(seq, p);
  LstmState s{std::vector<double>(4, 0.0), std::vector<double>(4, 0.0)};
  for (std::size_t t = 0; t < 5; ++t) {
    std::vector<double> y(seq.row(t), seq.row(t) + 3);
    s = lstm_cell(y, s, p);
    for (std::size_t j = 0; j < 4; ++j) CHECK(std::abs(out(t, j) - s.h[j]) < 1e-12);
  }
}

TEST_CASE("lstm with a saturated forget gate preserves the cell state") {
  LstmLayerParams p(1, 2, "l");
  p.b_f.value = Matrix{{50.0, 50.0}};  // forget gate pinned at 1
  LstmState s{{0.0, 0.0}, {0.8, -1.3}};
  for (int t = 0; t < 5; ++t) {
    LstmState prev = s;
    s = lstm_cell({0.0}, s, p);
    // i*g term is exactly zero (g = tanh(0)), so c can only move via f
    CHECK(std::abs(s.c[0] - prev.c[0]) < 1e-15);
    CHECK(std::abs(s.c[1] - prev.c[1]) < 1e-15);
  }
}

TEST_CASE("zero upstream gradient produces zero parameter gradients") {
  Rng rng(31);
  Conv1dLayer conv(2, 3, 2, "c");
  conv.init_glorot(rng);
  Matrix x(4, 2);
  for (std::size_t i = 0; i < x.size(); ++i) x.data()[i] = rng.uniform(-1.0, 1.0);
  Conv1dTrace ct;
  conv.forward(x, ct);
  Matrix dx = conv.backward(Matrix(4, 3), ct);
  for (std::size_t i = 0; i < conv.kernel.grad.size(); ++i) CHECK(conv.kernel.grad.data()[i] == 0.0);
  for (std::size_t i = 0; i < dx.size(); ++i) CHECK(dx.data()[i] == 0.0);

  GruLayerParams p(2, 3, "g");
  p.init_glorot(rng);
  GruTrace gt;
  gru_layer_forward(x, p, {}, gt);
  Matrix gdx = gru_layer_backward(Matrix(4, 3), p, gt);
  for (ParamTensor* t : p.params())
    for (std::size_t i = 0; i < t->grad.size(); ++i) CHECK(t->grad.data()[i] == 0.0);
  for (std::size_t i = 0; i < gdx.size(); ++i) CHECK(gdx.data()[i] == 0.0);
}

TEST_CASE("gradients accumulate until zero_grad") {
  Rng rng(37);
  DenseLayer fc(2, 2, false, "fc");
  fc.init_glorot(rng);
  Matrix x{{0.3, -0.4}};
  DenseTrace trace;
  fc.forward(x, trace);
  Matrix dy{{1.0, -1.0}};
  fc.backward(dy, trace);
  Matrix once = fc.weight.grad;
  fc.backward(dy, trace);
  for (std::size_t i = 0; i < once.size(); ++i)
    CHECK(fc.weight.grad.data()[i] == doctest::Approx(2.0 * once.data()[i]).epsilon(1e-15));
  fc.weight.zero_grad();
  for (std::size_t i = 0; i < once.size(); ++i) CHECK(fc.weight.grad.data()[i] == 0.0);
}
