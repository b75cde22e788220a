#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <string>
#include <vector>

#include <unistd.h>

#include "msdn/dataset.hpp"
#include "msdn/gradcheck.hpp"
#include "msdn/intervention.hpp"
#include "msdn/model.hpp"
#include "msdn/objective.hpp"
#include "msdn/rng.hpp"

namespace msdn::test {

namespace fs = std::filesystem;

/// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("msdnpp_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

inline std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Relative path → file bytes, for every regular file below `dir`.
inline std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file()) files[fs::relative(entry.path(), dir).string()] = read_text(entry.path());
  }
  return files;
}

/// Rounds every entry through float so on-disk round trips are exact.
inline Matrix float_rounded(Matrix m) {
  for (auto& x : m.values()) x = static_cast<double>(static_cast<float>(x));
  return m;
}

/// Random dataset with `per_class` samples per class. Classes
/// [C - unseen, C) are unseen. The last sample of every seen class is held out
/// as test_seen; all unseen-class samples are test_unseen.
inline Dataset tiny_dataset(std::size_t C, std::size_t K, std::size_t Da, std::size_t R, std::size_t D,
                            std::size_t unseen, std::uint64_t seed, std::size_t per_class = 2) {
  RngStream rng(seed);
  Dataset d;
  d.name = "tiny";
  d.attributes = float_rounded(sample_uniform(rng, K, Da, -1.0, 1.0));
  d.class_semantics = float_rounded(sample_uniform(rng, C, K, 0.0, 1.0));
  for (std::size_t c = 0; c < C; ++c) {
    const bool is_unseen = c >= C - unseen;
    (is_unseen ? d.split.unseen_classes : d.split.seen_classes).push_back(c);
    for (std::size_t j = 0; j < per_class; ++j) {
      const std::size_t index = d.samples.size();
      d.samples.push_back({float_rounded(sample_uniform(rng, R, D, -1.0, 1.0)), c});
      if (is_unseen) {
        d.split.test_unseen_samples.push_back(index);
      } else if (j + 1 == per_class && per_class > 1) {
        d.split.test_seen_samples.push_back(index);
      } else {
        d.split.train_samples.push_back(index);
      }
    }
  }
  return d;
}

/// One random intervention pair per batch entry.
inline std::vector<SampleInterventions> random_interventions(const Dataset& d, std::size_t n, std::uint64_t seed) {
  RngStream rng(seed);
  const std::size_t K = d.num_attributes();
  const std::size_t R = d.regions_per_sample();
  std::vector<SampleInterventions> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back({make_intervention_attention(InterventionKind::random, K, R, nullptr, rng),
                   make_intervention_attention(InterventionKind::random, R, K, nullptr, rng)});
  }
  return out;
}

/// Gradient check of the batch total loss over all five weight matrices.
inline GradCheckReport check_total_gradient(const Dataset& d, ModelParams& params, const LossWeights& weights,
                                            std::span<const std::size_t> batch,
                                            std::span<const SampleInterventions> interventions,
                                            double epsilon = 1e-5, double tolerance = 1e-4) {
  const LossWithGrad loss = [&](std::vector<Matrix>* grads) {
    const BatchObjective obj = batch_objective(d, batch, params, weights, interventions, grads != nullptr);
    if (grads != nullptr) {
      grads->clear();
      for (const Matrix* g : obj.grads.tensors()) grads->push_back(*g);
    }
    return obj.report.total;
  };
  std::vector<NamedParam> named;
  const auto tensors = params.tensors();
  for (std::size_t i = 0; i < tensors.size(); ++i) named.push_back({std::string(ModelParams::kNames[i]), tensors[i]});
  return finite_difference_check(loss, named, epsilon, tolerance);
}

inline double naive_entry(const Matrix& a, const Matrix& b, std::size_t i, std::size_t j) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
  return s;
}

}  // namespace msdn::test
