#pragma once

#include <array>
#include <cstdint>
#include <string_view>

#include "msdn/avca.hpp"
#include "msdn/vaca.hpp"

namespace msdn {

/// The five learnable matrices of both sub-nets.
struct ModelParams {
  AvcaParams avca;
  VacaParams vaca;

  static constexpr std::array<std::string_view, 5> kNames = {"W1", "W2", "W3", "W4", "W_att"};

  std::array<Matrix*, 5> tensors() { return {&avca.w1, &avca.w2, &vaca.w3, &vaca.w4, &vaca.w_att}; }
  std::array<const Matrix*, 5> tensors() const {
    return {&avca.w1, &avca.w2, &vaca.w3, &vaca.w4, &vaca.w_att};
  }

  /// Zero-filled parameters with the same shapes.
  ModelParams zeros_like() const;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// Scaled-uniform initialization of all five matrices for features of size
/// `feature_dim` and attribute vectors of size `attribute_dim`.
ModelParams init_params(std::size_t feature_dim, std::size_t attribute_dim, std::uint64_t seed);

}  // namespace msdn
