#include "msdn/attention_common.hpp"

#include <cmath>
#include <fstream>

#include "msdn/errors.hpp"
#include "msdn/tensor_io.hpp"

namespace msdn {

void require_rows_normalized(const Matrix& attention, const char* what) {
  for (std::size_t r = 0; r < attention.rows(); ++r) {
    double sum = 0.0;
    for (double x : attention.row(r)) {
      if (!(x >= 0.0)) throw ArgumentError(std::string(what) + ": negative or NaN weight in row " + std::to_string(r));
      sum += x;
    }
    if (std::abs(sum - 1.0) > kInterventionRowTolerance) {
      throw ArgumentError(std::string(what) + ": row " + std::to_string(r) + " sums to " + std::to_string(sum) +
                          ", expected 1");
    }
  }
}

Matrix init_scaled_uniform(RngStream& rng, std::size_t rows, std::size_t cols) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(cols));
  return sample_uniform(rng, rows, cols, -bound, bound);
}

Vector logit_difference(std::span<const double> logits, std::span<const double> logits_bar) {
  if (logits.size() != logits_bar.size()) {
    throw ShapeError("causal effect: logits length " + std::to_string(logits.size()) + " vs intervened length " +
                     std::to_string(logits_bar.size()));
  }
  Vector out(logits.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = logits[i] - logits_bar[i];
  return out;
}

Vector row_dots(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError("row_dots: shapes " + a.shape_string() + " and " + b.shape_string());
  }
  Vector out(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) out[i] = dot(a.row(i), b.row(i));
  return out;
}

void export_attention_map(const std::filesystem::path& stem, const Matrix& attention,
                          std::span<const std::string> attribute_names) {
  auto tensor_path = stem;
  tensor_path += ".msdt";
  write_msdt(tensor_path, to_tensor(attention));
  if (attribute_names.empty()) return;
  auto names_path = stem;
  names_path += ".attributes.txt";
  std::ofstream out(names_path, std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + names_path.string());
  for (std::size_t k = 0; k < attribute_names.size(); ++k) out << k << '\t' << attribute_names[k] << '\n';
  if (!out) throw IoError("write failed: " + names_path.string());
}

}  // namespace msdn
