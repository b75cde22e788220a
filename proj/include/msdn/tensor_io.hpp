#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "msdn/matrix.hpp"

namespace msdn {

// MSDT tensor file layout (all integers and floats little-endian):
//   bytes 0..3   magic "MSDT"
//   byte  4      version (1)
//   byte  5      rank (1..3)
//   rank x u32   dimensions
//   payload      row-major IEEE-754 float32 values
// The payload length must match the dimensions exactly; trailing bytes are
// rejected, as are non-finite values.

inline constexpr std::uint8_t kMsdtVersion = 1;

struct Tensor {
  std::vector<std::uint32_t> dims;
  std::vector<float> data;

  std::size_t element_count() const;
  friend bool operator==(const Tensor&, const Tensor&) = default;
};

std::vector<std::uint8_t> encode_msdt(const Tensor& tensor);
/// Throws FormatError with the byte offset of the first inconsistency.
Tensor decode_msdt(std::span<const std::uint8_t> bytes);

void write_msdt(const std::filesystem::path& path, const Tensor& tensor);
Tensor read_msdt(const std::filesystem::path& path);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

/// Rank-2 tensor from a matrix; values are rounded to float32.
Tensor to_tensor(const Matrix& m);
/// Matrix view of a rank-2 tensor (rank-1 becomes a single row).
Matrix to_matrix(const Tensor& t);

}  // namespace msdn
