#pragma once

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

namespace hcg {

// Dense row-major f64 matrix. Values are immutable in spirit once built:
// algebra returns new matrices, and the few in-place helpers exist for the
// optimizer/gradient paths that own their storage.
class Matrix {
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  double* row(std::size_t r) { return data_.data() + r * cols_; }
  const double* row(std::size_t r) const { return data_.data() + r * cols_; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  bool same_shape(const Matrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }
  std::string shape_str() const;
  bool all_finite() const;

  void fill(double v);
  Matrix row_copy(std::size_t r) const;  // 1 x cols
  Matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
  void set_block(std::size_t r0, std::size_t c0, const Matrix& src);
  void add_block(std::size_t r0, std::size_t c0, const Matrix& src);

  bool operator==(const Matrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
  }

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Product with a fixed reduction order: each output element accumulates
// a[i][k]*b[k][j] with k strictly ascending, so repeated runs are
// bit-identical. Throws DimensionError naming both shapes on mismatch.
Matrix matmul(const Matrix& a, const Matrix& b);
// a * b^T and a^T * b with the same ascending-k guarantee.
Matrix matmul_nt(const Matrix& a, const Matrix& b);
Matrix matmul_tn(const Matrix& a, const Matrix& b);

Matrix transpose(const Matrix& a);
Matrix add(const Matrix& a, const Matrix& b);
Matrix sub(const Matrix& a, const Matrix& b);
Matrix hadamard(const Matrix& a, const Matrix& b);
Matrix scale(const Matrix& a, double s);
void add_in_place(Matrix& dst, const Matrix& src);

enum class Activation { Relu, Sigmoid, Tanh };

double sigmoid(double v);
Matrix activate(const Matrix& x, Activation kind);

}  // namespace hcg
