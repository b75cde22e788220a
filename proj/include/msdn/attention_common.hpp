#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "msdn/matrix.hpp"
#include "msdn/rng.hpp"

namespace msdn {

/// Tolerance on row sums for externally supplied (intervened) attention.
inline constexpr double kInterventionRowTolerance = 1e-4;

/// Throws ArgumentError if any row of `attention` deviates from sum 1 by more
/// than kInterventionRowTolerance, or has a negative entry.
void require_rows_normalized(const Matrix& attention, const char* what);

/// Weight initialization: Uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)) with
/// fan_in = cols.
Matrix init_scaled_uniform(RngStream& rng, std::size_t rows, std::size_t cols);

/// Elementwise difference between observed and intervened logits.
Vector logit_difference(std::span<const double> logits, std::span<const double> logits_bar);

/// Row-wise dot products: out[i] = a.row(i) · b.row(i).
Vector row_dots(const Matrix& a, const Matrix& b);

/// Writes `attention` as `<stem>.msdt` and, when names are given, a sidecar
/// `<stem>.attributes.txt` with one "index<TAB>name" line per attribute.
void export_attention_map(const std::filesystem::path& stem, const Matrix& attention,
                          std::span<const std::string> attribute_names);

}  // namespace msdn
