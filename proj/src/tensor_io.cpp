#include "msdn/tensor_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "msdn/errors.hpp"

namespace msdn {

namespace {

constexpr std::uint8_t kMagic[4] = {'M', 'S', 'D', 'T'};
constexpr std::size_t kPreludeBytes = 6;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> bytes, std::size_t offset) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes[offset + i]) << (8 * i);
  return v;
}

}  // namespace

std::size_t Tensor::element_count() const {
  std::size_t n = dims.empty() ? 0 : 1;
  for (auto d : dims) n *= d;
  return n;
}

std::vector<std::uint8_t> encode_msdt(const Tensor& tensor) {
  if (tensor.dims.empty() || tensor.dims.size() > 3) {
    throw ArgumentError("encode_msdt: rank must be 1..3, got " + std::to_string(tensor.dims.size()));
  }
  if (tensor.element_count() != tensor.data.size()) {
    throw ShapeError("encode_msdt: dims describe " + std::to_string(tensor.element_count()) +
                     " values but tensor holds " + std::to_string(tensor.data.size()));
  }
  std::vector<std::uint8_t> out;
  out.reserve(kPreludeBytes + 4 * tensor.dims.size() + 4 * tensor.data.size());
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  out.push_back(kMsdtVersion);
  out.push_back(static_cast<std::uint8_t>(tensor.dims.size()));
  for (auto d : tensor.dims) put_u32(out, d);
  for (float f : tensor.data) {
    if (!std::isfinite(f)) throw NumericError("encode_msdt: refusing to write non-finite value");
    put_u32(out, std::bit_cast<std::uint32_t>(f));
  }
  return out;
}

Tensor decode_msdt(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kPreludeBytes) throw FormatError("MSDT: truncated header", bytes.size());
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw FormatError("MSDT: bad magic", 0);
  if (bytes[4] != kMsdtVersion) {
    throw FormatError("MSDT: unsupported version " + std::to_string(bytes[4]), 4);
  }
  const std::size_t rank = bytes[5];
  if (rank < 1 || rank > 3) throw FormatError("MSDT: rank must be 1..3, got " + std::to_string(rank), 5);
  const std::size_t header = kPreludeBytes + 4 * rank;
  if (bytes.size() < header) throw FormatError("MSDT: truncated dimensions", bytes.size());

  Tensor t;
  std::uint64_t count = 1;
  const std::uint64_t max_count = (bytes.size() - header) / 4;
  for (std::size_t i = 0; i < rank; ++i) {
    const std::size_t offset = kPreludeBytes + 4 * i;
    const std::uint32_t d = get_u32(bytes, offset);
    t.dims.push_back(d);
    count *= d;
    // Checked per dimension so the product cannot overflow.
    if (count > max_count) {
      throw FormatError("MSDT: dimensions exceed payload size (" + std::to_string(bytes.size()) + " bytes)",
                        offset);
    }
  }
  const std::uint64_t expected = header + 4 * count;
  if (bytes.size() != expected) {
    throw FormatError("MSDT: payload length mismatch, expected " + std::to_string(expected) + " bytes, got " +
                          std::to_string(bytes.size()),
                      std::min<std::uint64_t>(bytes.size(), expected));
  }
  t.data.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t offset = header + 4 * i;
    const float f = std::bit_cast<float>(get_u32(bytes, offset));
    if (!std::isfinite(f)) throw FormatError("MSDT: non-finite value", offset);
    t.data[i] = f;
  }
  return t;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) throw NotFoundError("file not found: " + path.string());
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed: " + path.string());
  return bytes;
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

void write_msdt(const std::filesystem::path& path, const Tensor& tensor) {
  write_file_bytes(path, encode_msdt(tensor));
}

Tensor read_msdt(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  try {
    return decode_msdt(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.detail(), e.offset());
  }
}

Tensor to_tensor(const Matrix& m) {
  Tensor t;
  t.dims = {static_cast<std::uint32_t>(m.rows()), static_cast<std::uint32_t>(m.cols())};
  t.data.reserve(m.size());
  for (double v : m.values()) t.data.push_back(static_cast<float>(v));
  return t;
}

Matrix to_matrix(const Tensor& t) {
  if (t.dims.size() == 1) {
    return Matrix(1, t.dims[0], std::vector<double>(t.data.begin(), t.data.end()));
  }
  if (t.dims.size() != 2) throw ShapeError("to_matrix: expected rank 1 or 2, got " + std::to_string(t.dims.size()));
  return Matrix(t.dims[0], t.dims[1], std::vector<double>(t.data.begin(), t.data.end()));
}

}  // namespace msdn
