#include "msdn/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "msdn/errors.hpp"
#include "msdn/rng.hpp"

namespace msdn {

void SynthConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ArgumentError("synthetic config: " + msg); };
  if (classes < 4) fail("classes must be >= 4, got " + std::to_string(classes));
  if (attributes < 4) fail("attributes must be >= 4, got " + std::to_string(attributes));
  if (attribute_dim < 1) fail("attribute_dim must be >= 1");
  if (regions < 2) fail("regions must be >= 2, got " + std::to_string(regions));
  if (feature_dim < 2) fail("feature_dim must be >= 2, got " + std::to_string(feature_dim));
  if (samples_per_class < 2) fail("samples_per_class must be >= 2, got " + std::to_string(samples_per_class));
  if (!(unseen_fraction > 0.0 && unseen_fraction < 1.0)) fail("unseen_fraction must lie in (0, 1)");
  if (!(test_seen_fraction > 0.0 && test_seen_fraction < 1.0)) fail("test_seen_fraction must lie in (0, 1)");
  if (!(noise >= 0.0) || !std::isfinite(noise)) fail("noise must be finite and >= 0");
  if (!(active_fraction > 0.0 && active_fraction < 1.0)) fail("active_fraction must lie in (0, 1)");
}

namespace {

// Values are rounded through float so saved datasets reload bit-exactly.
double f32(double x) { return static_cast<double>(static_cast<float>(x)); }

enum Stream : std::uint64_t { kAttributes = 1, kMap, kPrototypes, kSplit, kSamples };

std::vector<bool> random_active_set(RngStream& rng, std::size_t K, std::size_t active) {
  const auto perm = rng.permutation(K);
  std::vector<bool> on(K, false);
  for (std::size_t i = 0; i < active; ++i) on[perm[i]] = true;
  return on;
}

std::size_t hamming(const std::vector<bool>& a, const std::vector<bool>& b) {
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i];
  return d;
}

}  // namespace

SyntheticDataset generate_synthetic_with_truth(const SynthConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  const std::size_t C = cfg.classes, K = cfg.attributes, Da = cfg.attribute_dim;
  const std::size_t R = cfg.regions, D = cfg.feature_dim;
  const RngStream root(seed);

  SyntheticDataset out;
  Dataset& d = out.dataset;
  d.name = "synthetic-" + std::to_string(seed);

  RngStream attr_rng = root.derive(kAttributes);
  d.attributes = Matrix(K, Da);
  const double attr_scale = 1.0 / std::sqrt(static_cast<double>(Da));
  for (double& x : d.attributes.values()) x = f32(attr_rng.normal() * attr_scale);

  // Planted linear map from attribute space into feature space.
  RngStream map_rng = root.derive(kMap);
  Matrix planted_map(D, Da);
  for (double& x : planted_map.values()) x = map_rng.normal() * attr_scale;
  Matrix& signatures = out.planted.signatures;
  signatures = matmul_bt(d.attributes, planted_map);  // K×D, row k = M·a_k
  out.planted.region_of_attribute.resize(K);
  for (std::size_t k = 0; k < K; ++k) out.planted.region_of_attribute[k] = k % R;

  // Prototypes: distinct active sets, preferring well-separated ones.
  RngStream proto_rng = root.derive(kPrototypes);
  const std::size_t active = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::lround(cfg.active_fraction * static_cast<double>(K))), 1, K - 1);
  std::vector<std::vector<bool>> active_sets;
  std::size_t min_distance = std::max<std::size_t>(2, std::min(active, K - active));
  while (active_sets.size() < C) {
    bool placed = false;
    for (int attempt = 0; attempt < 2000 && !placed; ++attempt) {
      auto candidate = random_active_set(proto_rng, K, active);
      const bool far = std::all_of(active_sets.begin(), active_sets.end(),
                                   [&](const auto& s) { return hamming(s, candidate) >= min_distance; });
      if (far) {
        active_sets.push_back(std::move(candidate));
        placed = true;
      }
    }
    if (!placed) {
      if (min_distance == 0) throw ArgumentError("synthetic config: cannot place distinct class prototypes");
      --min_distance;
    }
  }
  d.class_semantics = Matrix(C, K);
  for (std::size_t c = 0; c < C; ++c) {
    for (std::size_t k = 0; k < K; ++k) {
      d.class_semantics(c, k) = f32(active_sets[c][k] ? proto_rng.uniform(0.8, 1.0) : proto_rng.uniform(0.0, 0.1));
    }
  }

  RngStream split_rng = root.derive(kSplit);
  const std::size_t n_unseen = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::lround(cfg.unseen_fraction * static_cast<double>(C))), 1, C - 1);
  const auto class_perm = split_rng.permutation(C);
  std::vector<bool> unseen(C, false);
  for (std::size_t i = 0; i < n_unseen; ++i) unseen[class_perm[i]] = true;
  for (std::size_t c = 0; c < C; ++c) (unseen[c] ? d.split.unseen_classes : d.split.seen_classes).push_back(c);

  RngStream sample_rng = root.derive(kSamples);
  const std::size_t n_test_seen = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::lround(cfg.test_seen_fraction * static_cast<double>(cfg.samples_per_class))), 1,
      cfg.samples_per_class - 1);
  for (std::size_t c = 0; c < C; ++c) {
    // Noise-free region contents for this class, indexed by region slot.
    Matrix slots(R, D);
    for (std::size_t k = 0; k < K; ++k) {
      auto slot = slots.row(out.planted.region_of_attribute[k]);
      auto sig = signatures.row(k);
      const double z = d.class_semantics(c, k);
      for (std::size_t j = 0; j < D; ++j) slot[j] += z * sig[j];
    }
    const auto holdout = split_rng.permutation(cfg.samples_per_class);
    std::vector<bool> is_test(cfg.samples_per_class, false);
    for (std::size_t i = 0; i < n_test_seen; ++i) is_test[holdout[i]] = true;

    for (std::size_t i = 0; i < cfg.samples_per_class; ++i) {
      const auto order = sample_rng.permutation(R);
      Matrix regions(R, D);
      for (std::size_t r = 0; r < R; ++r) {
        auto src = slots.row(order[r]);
        auto dst = regions.row(r);
        for (std::size_t j = 0; j < D; ++j) {
          const double eps = cfg.noise > 0.0 ? cfg.noise * sample_rng.normal() : 0.0;
          dst[j] = f32(src[j] + eps);
        }
      }
      const std::size_t index = d.samples.size();
      d.samples.push_back(Sample{std::move(regions), c});
      if (unseen[c]) {
        d.split.test_unseen_samples.push_back(index);
      } else if (is_test[i]) {
        d.split.test_seen_samples.push_back(index);
      } else {
        d.split.train_samples.push_back(index);
      }
    }
  }

  for (std::size_t c = 0; c < C; ++c) d.class_names.push_back("class_" + std::to_string(c));
  for (std::size_t k = 0; k < K; ++k) d.attribute_names.push_back("attribute_" + std::to_string(k));

  validate_dataset(d);
  return out;
}

}  // namespace msdn
