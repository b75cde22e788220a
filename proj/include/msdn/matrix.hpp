#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace msdn {

using Vector = std::vector<double>;

/// Dense row-major matrix of doubles. Values are the unit of storage for
/// features, attribute vectors, prototypes and all learnable weights.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }

  bool all_finite() const noexcept;
  std::string shape_string() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix matmul(const Matrix& a, const Matrix& b);
/// a · bᵀ without materializing the transpose.
Matrix matmul_bt(const Matrix& a, const Matrix& b);
/// aᵀ · b without materializing the transpose.
Matrix matmul_at(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);

/// y = M · x
Vector matvec(const Matrix& m, std::span<const double> x);
/// y = Mᵀ · x
Vector matvec_t(const Matrix& m, std::span<const double> x);

double dot(std::span<const double> a, std::span<const double> b);

/// Numerically stable softmax (max-subtracted, 64-bit accumulation).
Vector softmax(std::span<const double> v);
/// Log-softmax with the same stabilization; used by the cross-entropy terms.
Vector log_softmax(std::span<const double> v);
/// Softmax applied independently to every row.
Matrix softmax_rows(const Matrix& m);

/// Backward pass of a row softmax: given probabilities p and dL/dp, returns dL/dlogits.
Vector softmax_backward(std::span<const double> p, std::span<const double> grad_p);

void add_inplace(Matrix& into, const Matrix& x, double scale = 1.0);

}  // namespace msdn
