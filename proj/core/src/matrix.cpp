#include "hcg/matrix.hpp"

#include <algorithm>
#include <cmath>

#include "hcg/error.hpp"

namespace hcg {

Matrix::Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols)
    throw DimensionError("matrix: data length " + std::to_string(data_.size()) +
                         " does not fill shape " + shape_str());
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw DimensionError("matrix: ragged initializer row");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

std::string Matrix::shape_str() const {
  return std::to_string(rows_) + "x" + std::to_string(cols_);
}

bool Matrix::all_finite() const {
  for (double v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

void Matrix::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

Matrix Matrix::row_copy(std::size_t r) const {
  Matrix out(1, cols_);
  std::copy(row(r), row(r) + cols_, out.data());
  return out;
}

Matrix Matrix::block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
  if (r0 + nr > rows_ || c0 + nc > cols_)
    throw DimensionError("block " + std::to_string(nr) + "x" + std::to_string(nc) + "@(" +
                         std::to_string(r0) + "," + std::to_string(c0) + ") out of " + shape_str());
  Matrix out(nr, nc);
  for (std::size_t i = 0; i < nr; ++i)
    std::copy(row(r0 + i) + c0, row(r0 + i) + c0 + nc, out.row(i));
  return out;
}

void Matrix::set_block(std::size_t r0, std::size_t c0, const Matrix& src) {
  if (r0 + src.rows() > rows_ || c0 + src.cols() > cols_)
    throw DimensionError("set_block " + src.shape_str() + " into " + shape_str());
  for (std::size_t i = 0; i < src.rows(); ++i)
    std::copy(src.row(i), src.row(i) + src.cols(), row(r0 + i) + c0);
}

void Matrix::add_block(std::size_t r0, std::size_t c0, const Matrix& src) {
  if (r0 + src.rows() > rows_ || c0 + src.cols() > cols_)
    throw DimensionError("add_block " + src.shape_str() + " into " + shape_str());
  for (std::size_t i = 0; i < src.rows(); ++i) {
    const double* s = src.row(i);
    double* d = row(r0 + i) + c0;
    for (std::size_t j = 0; j < src.cols(); ++j) d[j] += s[j];
  }
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows())
    throw DimensionError("matmul: " + a.shape_str() + " * " + b.shape_str());
  Matrix c(a.rows(), b.cols());
  const std::size_t n = a.rows(), m = b.cols(), kk = a.cols();
  for (std::size_t i = 0; i < n; ++i) {
    const double* ai = a.row(i);
    double* ci = c.row(i);
    for (std::size_t k = 0; k < kk; ++k) {
      const double aik = ai[k];
      const double* bk = b.row(k);
      for (std::size_t j = 0; j < m; ++j) ci[j] += aik * bk[j];
    }
  }
  return c;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols())
    throw DimensionError("matmul_nt: " + a.shape_str() + " * " + b.shape_str() + "^T");
  // Same ascending-k accumulation as the direct dot product, but routed
  // through the stride-1 kernel so the inner loop vectorizes.
  return matmul(a, transpose(b));
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows())
    throw DimensionError("matmul_tn: " + a.shape_str() + "^T * " + b.shape_str());
  // Same ascending-k accumulation per output element; the transposed copy
  // keeps each result row resident while k streams.
  return matmul(transpose(a), b);
}

Matrix transpose(const Matrix& a) {
  Matrix out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  return out;
}

static void check_same(const Matrix& a, const Matrix& b, const char* op) {
  if (!a.same_shape(b))
    throw DimensionError(std::string(op) + ": " + a.shape_str() + " vs " + b.shape_str());
}

Matrix add(const Matrix& a, const Matrix& b) {
  check_same(a, b, "add");
  Matrix c = a;
  for (std::size_t i = 0; i < c.size(); ++i) c.data()[i] += b.data()[i];
  return c;
}

Matrix sub(const Matrix& a, const Matrix& b) {
  check_same(a, b, "sub");
  Matrix c = a;
  for (std::size_t i = 0; i < c.size(); ++i) c.data()[i] -= b.data()[i];
  return c;
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
  check_same(a, b, "hadamard");
  Matrix c = a;
  for (std::size_t i = 0; i < c.size(); ++i) c.data()[i] *= b.data()[i];
  return c;
}

Matrix scale(const Matrix& a, double s) {
  Matrix c = a;
  for (std::size_t i = 0; i < c.size(); ++i) c.data()[i] *= s;
  return c;
}

void add_in_place(Matrix& dst, const Matrix& src) {
  check_same(dst, src, "add_in_place");
  for (std::size_t i = 0; i < dst.size(); ++i) dst.data()[i] += src.data()[i];
}

double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

Matrix activate(const Matrix& x, Activation kind) {
  Matrix out = x;
  double* p = out.data();
  switch (kind) {
    case Activation::Relu:
      for (std::size_t i = 0; i < out.size(); ++i) p[i] = p[i] > 0.0 ? p[i] : 0.0;
      break;
    case Activation::Sigmoid:
      for (std::size_t i = 0; i < out.size(); ++i) p[i] = sigmoid(p[i]);
      break;
    case Activation::Tanh:
      for (std::size_t i = 0; i < out.size(); ++i) p[i] = std::tanh(p[i]);
      break;
  }
  return out;
}

}  // namespace hcg
