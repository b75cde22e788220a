#pragma once

#include <filesystem>

#include <json.hpp>

#include "msdn/model.hpp"

namespace msdn {

/// A checkpoint directory holds W1.msdt, W2.msdt, W3.msdt, W4.msdt,
/// W_att.msdt (float32) and metadata.json.
struct Checkpoint {
  ModelParams params;
  nlohmann::json metadata;
};

void save_checkpoint(const std::filesystem::path& directory, const ModelParams& params,
                     const nlohmann::json& metadata);
Checkpoint load_checkpoint(const std::filesystem::path& directory);

}  // namespace msdn
