#include "msdn/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "msdn/errors.hpp"

namespace msdn {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw ShapeError("matrix data length " + std::to_string(data_.size()) +
                     " does not match shape " + shape_string());
  }
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  std::vector<double> data;
  data.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) throw ShapeError("ragged initializer for matrix");
    data.insert(data.end(), row.begin(), row.end());
  }
  return Matrix(r, c, std::move(data));
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

bool Matrix::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

std::string Matrix::shape_string() const {
  return "[" + std::to_string(rows_) + "x" + std::to_string(cols_) + "]";
}

namespace {

void require_shape(bool ok, const char* op, const Matrix& a, const Matrix& b) {
  if (!ok) {
    throw ShapeError(std::string(op) + ": incompatible shapes " + a.shape_string() + " and " +
                     b.shape_string());
  }
}

}  // namespace

Matrix matmul(const Matrix& a, const Matrix& b) {
  require_shape(a.cols() == b.rows(), "matmul", a, b);
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto out_row = out.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      auto b_row = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) out_row[j] += aik * b_row[j];
    }
  }
  return out;
}

Matrix matmul_bt(const Matrix& a, const Matrix& b) {
  require_shape(a.cols() == b.cols(), "matmul_bt", a, b);
  Matrix out(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.rows(); ++j) out(i, j) = dot(a.row(i), b.row(j));
  }
  return out;
}

Matrix matmul_at(const Matrix& a, const Matrix& b) {
  require_shape(a.rows() == b.rows(), "matmul_at", a, b);
  Matrix out(a.cols(), b.cols());
  for (std::size_t k = 0; k < a.rows(); ++k) {
    auto a_row = a.row(k);
    auto b_row = b.row(k);
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double aki = a_row[i];
      if (aki == 0.0) continue;
      auto out_row = out.row(i);
      for (std::size_t j = 0; j < b.cols(); ++j) out_row[j] += aki * b_row[j];
    }
  }
  return out;
}

Matrix transpose(const Matrix& a) {
  Matrix out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  }
  return out;
}

Vector matvec(const Matrix& m, std::span<const double> x) {
  if (m.cols() != x.size()) {
    throw ShapeError("matvec: matrix " + m.shape_string() + " vs vector of length " +
                     std::to_string(x.size()));
  }
  Vector y(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) y[i] = dot(m.row(i), x);
  return y;
}

Vector matvec_t(const Matrix& m, std::span<const double> x) {
  if (m.rows() != x.size()) {
    throw ShapeError("matvec_t: matrix " + m.shape_string() + " vs vector of length " +
                     std::to_string(x.size()));
  }
  Vector y(m.cols(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const double xi = x[i];
    auto row = m.row(i);
    for (std::size_t j = 0; j < m.cols(); ++j) y[j] += xi * row[j];
  }
  return y;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw ShapeError("dot: length " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

Vector softmax(std::span<const double> v) {
  Vector out(v.size());
  if (v.empty()) return out;
  const double mx = *std::max_element(v.begin(), v.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = std::exp(v[i] - mx);
    sum += out[i];
  }
  for (double& x : out) x /= sum;
  return out;
}

Vector log_softmax(std::span<const double> v) {
  Vector out(v.size());
  if (v.empty()) return out;
  const double mx = *std::max_element(v.begin(), v.end());
  double sum = 0.0;
  for (double x : v) sum += std::exp(x - mx);
  const double log_z = mx + std::log(sum);
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] - log_z;
  return out;
}

Matrix softmax_rows(const Matrix& m) {
  Matrix out(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const Vector p = softmax(m.row(r));
    std::copy(p.begin(), p.end(), out.row(r).begin());
  }
  return out;
}

Vector softmax_backward(std::span<const double> p, std::span<const double> grad_p) {
  const double inner = dot(p, grad_p);
  Vector out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = p[i] * (grad_p[i] - inner);
  return out;
}

void add_inplace(Matrix& into, const Matrix& x, double scale) {
  if (into.rows() != x.rows() || into.cols() != x.cols()) {
    throw ShapeError("add_inplace: incompatible shapes " + into.shape_string() + " and " +
                     x.shape_string());
  }
  auto dst = into.values();
  auto src = x.values();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += scale * src[i];
}

}  // namespace msdn
