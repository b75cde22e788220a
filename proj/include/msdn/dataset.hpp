#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "msdn/matrix.hpp"

namespace msdn {

/// One image: R region feature vectors (rows of an R×D matrix) and a dense
/// 0-based class label.
struct Sample {
  Matrix regions;
  std::size_t label = 0;

  friend bool operator==(const Sample&, const Sample&) = default;
};

struct Split {
  std::vector<std::size_t> seen_classes;
  std::vector<std::size_t> unseen_classes;
  std::vector<std::size_t> train_samples;
  std::vector<std::size_t> test_seen_samples;
  std::vector<std::size_t> test_unseen_samples;

  friend bool operator==(const Split&, const Split&) = default;
};

/// Per-class membership lookup built from a Split.
class ClassPartition {
 public:
  ClassPartition(const Split& split, std::size_t num_classes);

  bool is_seen(std::size_t c) const { return c < kind_.size() && kind_[c] == Kind::seen; }
  bool is_unseen(std::size_t c) const { return c < kind_.size() && kind_[c] == Kind::unseen; }
  /// Position of a seen class inside Split::seen_classes, or npos.
  std::size_t seen_position(std::size_t c) const;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  enum class Kind : unsigned char { none, seen, unseen };
  std::vector<Kind> kind_;
  std::vector<std::size_t> seen_pos_;
};

struct Dataset {
  std::string name;
  std::vector<Sample> samples;
  /// K×Da, one semantic vector per attribute.
  Matrix attributes;
  /// C×K, row c is the class prototype z^c.
  Matrix class_semantics;
  Split split;
  std::vector<std::string> class_names;
  std::vector<std::string> attribute_names;

  std::size_t num_classes() const { return class_semantics.rows(); }
  std::size_t num_attributes() const { return attributes.rows(); }
  std::size_t attribute_dim() const { return attributes.cols(); }
  std::size_t regions_per_sample() const { return samples.empty() ? 0 : samples.front().regions.rows(); }
  std::size_t feature_dim() const { return samples.empty() ? 0 : samples.front().regions.cols(); }

  /// Class prototype z^c; implements the label → semantics mapping.
  std::span<const double> prototype(std::size_t c) const { return class_semantics.row(c); }

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

/// Checks every structural invariant; throws ValidationError naming the first
/// one that fails.
void validate_dataset(const Dataset& dataset);

/// Reads `manifest.json` plus the tensor files it names.
Dataset load_dataset(const std::filesystem::path& directory);

/// Writes `manifest.json`, `attributes.msdt`, `class_semantics.msdt`,
/// `features.msdt` and `labels.msdt`. Tensor payloads are float32.
void save_dataset(const Dataset& dataset, const std::filesystem::path& directory);

}  // namespace msdn
