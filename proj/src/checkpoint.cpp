#include "msdn/checkpoint.hpp"

#include "msdn/errors.hpp"
#include "msdn/tensor_io.hpp"

namespace msdn {

namespace {

std::filesystem::path tensor_path(const std::filesystem::path& dir, std::string_view name) {
  return dir / (std::string(name) + ".msdt");
}

}  // namespace

void save_checkpoint(const std::filesystem::path& directory, const ModelParams& params,
                     const nlohmann::json& metadata) {
  std::error_code ec;
  std::filesystem::create_directories(directory, ec);
  if (ec) throw IoError("cannot create directory " + directory.string() + ": " + ec.message());
  const auto tensors = params.tensors();
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    write_msdt(tensor_path(directory, ModelParams::kNames[i]), to_tensor(*tensors[i]));
  }
  const std::string text = metadata.dump(2) + "\n";
  write_file_bytes(directory / "metadata.json",
                   std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

Checkpoint load_checkpoint(const std::filesystem::path& directory) {
  Checkpoint cp;
  auto tensors = cp.params.tensors();
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    const Tensor t = read_msdt(tensor_path(directory, ModelParams::kNames[i]));
    if (t.dims.size() != 2) {
      throw ValidationError("checkpoint: " + std::string(ModelParams::kNames[i]) + " must be a rank-2 tensor");
    }
    *tensors[i] = to_matrix(t);
  }
  const auto& p = cp.params;
  if (p.avca.w1.rows() != p.avca.w2.rows() || p.avca.w1.cols() != p.avca.w2.cols() ||
      p.vaca.w3.rows() != p.avca.w1.cols() || p.vaca.w3.cols() != p.avca.w1.rows() ||
      p.vaca.w4.rows() != p.vaca.w3.rows() || p.vaca.w4.cols() != p.vaca.w3.cols() ||
      p.vaca.w_att.rows() != p.vaca.w3.rows() || p.vaca.w_att.cols() != p.vaca.w3.cols()) {
    throw ValidationError("checkpoint: weight shapes are inconsistent (expected W1,W2 Da x D and W3,W4,W_att D x Da)");
  }
  const auto bytes = read_file_bytes(directory / "metadata.json");
  try {
    cp.metadata = nlohmann::json::parse(bytes.begin(), bytes.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError((directory / "metadata.json").string() + ": invalid JSON: " + e.what(), e.byte);
  }
  return cp;
}

}  // namespace msdn
