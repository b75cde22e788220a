#include "msdn/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <json.hpp>

#include "msdn/errors.hpp"
#include "msdn/tensor_io.hpp"

namespace msdn {

using nlohmann::json;

ClassPartition::ClassPartition(const Split& split, std::size_t num_classes)
    : kind_(num_classes, Kind::none), seen_pos_(num_classes, npos) {
  for (std::size_t i = 0; i < split.seen_classes.size(); ++i) {
    const auto c = split.seen_classes[i];
    if (c < num_classes) {
      kind_[c] = Kind::seen;
      seen_pos_[c] = i;
    }
  }
  for (auto c : split.unseen_classes) {
    if (c < num_classes) kind_[c] = Kind::unseen;
  }
}

std::size_t ClassPartition::seen_position(std::size_t c) const {
  return c < seen_pos_.size() ? seen_pos_[c] : npos;
}

namespace {

void require(bool ok, const std::string& invariant) {
  if (!ok) throw ValidationError("dataset invariant violated: " + invariant);
}

void check_index_list(const std::vector<std::size_t>& idx, std::size_t bound, const std::string& what) {
  for (auto i : idx) require(i < bound, what + " entry " + std::to_string(i) + " out of range");
}

}  // namespace

void validate_dataset(const Dataset& d) {
  require(!d.samples.empty(), "sample list is non-empty (R and D are unknown otherwise)");
  const std::size_t R = d.regions_per_sample();
  const std::size_t D = d.feature_dim();
  const std::size_t K = d.num_attributes();
  const std::size_t C = d.num_classes();
  require(R >= 1 && D >= 1, "R >= 1 and D >= 1");
  require(K >= 2, "K >= 2 attributes");
  require(d.attribute_dim() >= 1, "attribute dimension >= 1");
  require(C >= 1, "at least one class");
  require(d.class_semantics.cols() == K, "class_semantics.cols == attributes.rows (K)");
  require(d.attributes.all_finite(), "attribute vectors finite");
  require(d.class_semantics.all_finite(), "class prototypes finite");
  require(d.class_names.empty() || d.class_names.size() == C, "class_names length equals C");
  require(d.attribute_names.empty() || d.attribute_names.size() == K, "attribute_names length equals K");

  for (std::size_t i = 0; i < d.samples.size(); ++i) {
    const auto& s = d.samples[i];
    require(s.regions.rows() == R && s.regions.cols() == D,
            "all samples share (R, D); sample " + std::to_string(i) + " has " + s.regions.shape_string());
    require(s.label < C, "label within [0, C) for sample " + std::to_string(i));
    require(s.regions.all_finite(), "region features finite for sample " + std::to_string(i));
  }

  const Split& sp = d.split;
  check_index_list(sp.seen_classes, C, "seen_classes");
  check_index_list(sp.unseen_classes, C, "unseen_classes");
  const std::set<std::size_t> seen(sp.seen_classes.begin(), sp.seen_classes.end());
  const std::set<std::size_t> unseen(sp.unseen_classes.begin(), sp.unseen_classes.end());
  require(seen.size() == sp.seen_classes.size(), "seen_classes has no duplicates");
  require(unseen.size() == sp.unseen_classes.size(), "unseen_classes has no duplicates");
  for (auto c : seen) require(!unseen.contains(c), "seen and unseen classes are disjoint (class " + std::to_string(c) + ")");
  require(!seen.empty(), "at least one seen class");

  const std::size_t N = d.samples.size();
  check_index_list(sp.train_samples, N, "train_idx");
  check_index_list(sp.test_seen_samples, N, "test_seen_idx");
  check_index_list(sp.test_unseen_samples, N, "test_unseen_idx");
  for (const auto& s : d.samples) {
    require(seen.contains(s.label) || unseen.contains(s.label),
            "seen and unseen classes cover every used label (class " + std::to_string(s.label) + ")");
  }
  for (auto i : sp.train_samples) require(seen.contains(d.samples[i].label), "train sample labels are seen classes");
  for (auto i : sp.test_seen_samples) require(seen.contains(d.samples[i].label), "test_seen sample labels are seen classes");
  for (auto i : sp.test_unseen_samples) {
    require(unseen.contains(d.samples[i].label), "test_unseen sample labels are unseen classes");
  }
}

namespace {

constexpr const char* kManifest = "manifest.json";

std::vector<std::size_t> read_index_array(const json& manifest, const char* key) {
  if (!manifest.contains(key) || !manifest[key].is_array()) {
    throw ValidationError(std::string("manifest: missing integer array '") + key + "'");
  }
  std::vector<std::size_t> out;
  for (const auto& v : manifest[key]) {
    if (!v.is_number_unsigned()) throw ValidationError(std::string("manifest: '") + key + "' must hold non-negative integers");
    out.push_back(v.get<std::size_t>());
  }
  return out;
}

std::size_t read_count(const json& manifest, const char* key) {
  if (!manifest.contains(key) || !manifest[key].is_number_unsigned()) {
    throw ValidationError(std::string("manifest: missing non-negative integer '") + key + "'");
  }
  return manifest[key].get<std::size_t>();
}

std::string read_string(const json& manifest, const char* key) {
  if (!manifest.contains(key) || !manifest[key].is_string()) {
    throw ValidationError(std::string("manifest: missing string '") + key + "'");
  }
  return manifest[key].get<std::string>();
}

std::vector<std::string> read_names(const json& manifest, const char* key) {
  std::vector<std::string> out;
  if (!manifest.contains(key)) return out;
  if (!manifest[key].is_array()) throw ValidationError(std::string("manifest: '") + key + "' must be an array");
  for (const auto& v : manifest[key]) {
    if (!v.is_string()) throw ValidationError(std::string("manifest: '") + key + "' must hold strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

void expect_dims(const Tensor& t, std::vector<std::uint32_t> dims, const std::string& what) {
  if (t.dims != dims) {
    std::string got, want;
    for (auto d : t.dims) got += std::to_string(d) + " ";
    for (auto d : dims) want += std::to_string(d) + " ";
    throw ValidationError(what + ": tensor shape [ " + got + "] does not match manifest [ " + want + "]");
  }
}

}  // namespace

Dataset load_dataset(const std::filesystem::path& directory) {
  const auto manifest_path = directory / kManifest;
  const auto manifest_bytes = read_file_bytes(manifest_path);
  json manifest;
  try {
    manifest = json::parse(manifest_bytes.begin(), manifest_bytes.end());
  } catch (const json::parse_error& e) {
    throw FormatError(manifest_path.string() + ": invalid JSON: " + e.what(), e.byte);
  }
  if (!manifest.is_object()) throw FormatError(manifest_path.string() + ": manifest must be a JSON object", 0);

  Dataset d;
  d.name = read_string(manifest, "name");
  const std::size_t C = read_count(manifest, "num_classes");
  const std::size_t K = read_count(manifest, "num_attributes");
  const std::size_t D = read_count(manifest, "feature_dim");
  const std::size_t R = read_count(manifest, "regions_per_sample");

  const Tensor attributes = read_msdt(directory / read_string(manifest, "attributes"));
  if (attributes.dims.size() != 2 || attributes.dims[0] != K) {
    throw ValidationError("attributes: expected rank-2 tensor with K=" + std::to_string(K) + " rows");
  }
  d.attributes = to_matrix(attributes);

  const Tensor semantics = read_msdt(directory / read_string(manifest, "class_semantics"));
  expect_dims(semantics, {static_cast<std::uint32_t>(C), static_cast<std::uint32_t>(K)}, "class_semantics");
  d.class_semantics = to_matrix(semantics);

  const Tensor features = read_msdt(directory / read_string(manifest, "features"));
  if (features.dims.size() != 3) throw ValidationError("features: expected rank-3 tensor N x R x D");
  const std::size_t N = features.dims[0];
  expect_dims(features, {static_cast<std::uint32_t>(N), static_cast<std::uint32_t>(R), static_cast<std::uint32_t>(D)},
              "features");

  const Tensor labels = read_msdt(directory / read_string(manifest, "labels"));
  expect_dims(labels, {static_cast<std::uint32_t>(N)}, "labels");

  d.samples.reserve(N);
  const std::size_t per_sample = R * D;
  for (std::size_t i = 0; i < N; ++i) {
    const float raw = labels.data[i];
    if (raw < 0.0f || raw != std::floor(raw)) {
      throw ValidationError("labels: entry " + std::to_string(i) + " is not a non-negative integral value");
    }
    const auto first = features.data.begin() + static_cast<std::ptrdiff_t>(i * per_sample);
    d.samples.push_back(Sample{Matrix(R, D, std::vector<double>(first, first + static_cast<std::ptrdiff_t>(per_sample))),
                               static_cast<std::size_t>(raw)});
  }

  d.split.seen_classes = read_index_array(manifest, "seen_classes");
  d.split.unseen_classes = read_index_array(manifest, "unseen_classes");
  d.split.train_samples = read_index_array(manifest, "train_idx");
  d.split.test_seen_samples = read_index_array(manifest, "test_seen_idx");
  d.split.test_unseen_samples = read_index_array(manifest, "test_unseen_idx");
  d.class_names = read_names(manifest, "class_names");
  d.attribute_names = read_names(manifest, "attribute_names");

  validate_dataset(d);
  return d;
}

void save_dataset(const Dataset& d, const std::filesystem::path& directory) {
  validate_dataset(d);
  std::error_code ec;
  std::filesystem::create_directories(directory, ec);
  if (ec) throw IoError("cannot create directory " + directory.string() + ": " + ec.message());

  const std::size_t N = d.samples.size();
  const std::size_t R = d.regions_per_sample();
  const std::size_t D = d.feature_dim();

  Tensor features;
  features.dims = {static_cast<std::uint32_t>(N), static_cast<std::uint32_t>(R), static_cast<std::uint32_t>(D)};
  features.data.reserve(N * R * D);
  Tensor labels;
  labels.dims = {static_cast<std::uint32_t>(N)};
  for (const auto& s : d.samples) {
    for (double v : s.regions.values()) features.data.push_back(static_cast<float>(v));
    labels.data.push_back(static_cast<float>(s.label));
  }

  write_msdt(directory / "attributes.msdt", to_tensor(d.attributes));
  write_msdt(directory / "class_semantics.msdt", to_tensor(d.class_semantics));
  write_msdt(directory / "features.msdt", features);
  write_msdt(directory / "labels.msdt", labels);

  json manifest = {
      {"name", d.name},
      {"num_classes", d.num_classes()},
      {"num_attributes", d.num_attributes()},
      {"feature_dim", D},
      {"regions_per_sample", R},
      {"attributes", "attributes.msdt"},
      {"class_semantics", "class_semantics.msdt"},
      {"features", "features.msdt"},
      {"labels", "labels.msdt"},
      {"seen_classes", d.split.seen_classes},
      {"unseen_classes", d.split.unseen_classes},
      {"train_idx", d.split.train_samples},
      {"test_seen_idx", d.split.test_seen_samples},
      {"test_unseen_idx", d.split.test_unseen_samples},
  };
  if (!d.class_names.empty()) manifest["class_names"] = d.class_names;
  if (!d.attribute_names.empty()) manifest["attribute_names"] = d.attribute_names;

  const std::string text = manifest.dump(2) + "\n";
  write_file_bytes(directory / kManifest,
                   std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace msdn
