#pragma once

#include <cstddef>
#include <cstdint>

#include "msdn/dataset.hpp"

namespace msdn {

/// Shape and difficulty of a generated dataset.
///
/// Each class gets a prototype z^c with `active_fraction`·K attributes switched
/// on. Attribute k is carried by region (k mod R); a region's feature vector is
/// Σ z^c_k · u_k over the attributes it carries, where u_k = M·a_k for a fixed
/// random linear map M, plus i.i.d. Gaussian noise of std `noise`. Every sample
/// presents its regions in a fresh random order.
struct SynthConfig {
  std::size_t classes = 10;
  std::size_t attributes = 12;
  std::size_t attribute_dim = 16;
  std::size_t regions = 9;
  std::size_t feature_dim = 16;
  std::size_t samples_per_class = 20;
  double unseen_fraction = 0.3;
  double test_seen_fraction = 0.2;
  double noise = 0.05;
  double active_fraction = 0.4;

  /// Throws ArgumentError naming the first out-of-range field.
  void validate() const;
};

/// Ground truth behind a generated dataset, for oracles in tests and tools.
struct PlantedStructure {
  /// K×D; row k is the feature-space signature u_k of attribute k.
  Matrix signatures;
  /// region_of_attribute[k] is the region slot that carries attribute k.
  std::vector<std::size_t> region_of_attribute;
};

struct SyntheticDataset {
  Dataset dataset;
  PlantedStructure planted;
};

SyntheticDataset generate_synthetic_with_truth(const SynthConfig& config, std::uint64_t seed);

inline Dataset generate_synthetic(const SynthConfig& config, std::uint64_t seed) {
  return generate_synthetic_with_truth(config, seed).dataset;
}

}  // namespace msdn
