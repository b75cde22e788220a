#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "msdn/dataset.hpp"
#include "msdn/model.hpp"

namespace msdn {

enum class Setting { czsl, gzsl };

struct FusionConfig {
  double alpha1 = 0.8;  ///< AVCA weight
  double alpha2 = 0.2;  ///< VACA weight
  Setting setting = Setting::gzsl;
  /// Magnitude of the ±1 calibration offset. Only changed by the argmax
  /// scaling property test; inference uses 1.
  double calibration = 1.0;

  static FusionConfig cub() { return {0.8, 0.2}; }
  static FusionConfig sun() { return {0.7, 0.3}; }
  static FusionConfig awa2() { return {0.8, 0.2}; }

  void validate() const;
};

/// Both semantic embeddings of one sample.
struct Embeddings {
  Vector psi;       ///< AVCA ψ(x)
  Vector psi_attr;  ///< VACA Ψ(x)
};

Embeddings embed(const Matrix& regions, const Matrix& attributes, const ModelParams& params);

struct ScoredClasses {
  std::vector<std::size_t> classes;  ///< candidate classes in ascending order
  Vector scores;
};

/// score[c] = (α1·ψ + α2·Ψ)·z^c + I[c ∈ unseen], I = +1 unseen / -1 otherwise,
/// over unseen classes (CZSL) or all classes (GZSL).
ScoredClasses fused_score(std::span<const double> psi, std::span<const double> psi_attr, const Matrix& class_semantics,
                          const Split& split, const FusionConfig& cfg);

/// Index into `scores` of the maximum; ties go to the lowest index.
std::size_t argmax_lowest(std::span<const double> scores);

std::size_t predict(const Sample& sample, const ModelParams& params, const Dataset& dataset, const FusionConfig& cfg);

struct GzslMetrics {
  double unseen = 0.0;  ///< U
  double seen = 0.0;    ///< S
  double harmonic = 0.0;
};

struct EvalReport {
  std::optional<double> czsl_acc;
  std::optional<GzslMetrics> gzsl;
  std::map<std::size_t, double> czsl_per_class;
  std::map<std::size_t, double> gzsl_per_class;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> czsl_confusion;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> gzsl_confusion;
};

/// H = 2SU / (S + U), and 0 when S + U = 0.
double harmonic_mean(double seen, double unseen);

struct ClassAccuracy {
  double mean = 0.0;
  std::map<std::size_t, double> per_class;
};

/// Top-1 accuracy averaged over the classes present in `labels`.
ClassAccuracy per_class_accuracy(std::span<const std::size_t> labels, std::span<const std::size_t> predictions);

/// Evaluates one setting (or both when `setting` is empty). Throws
/// ArgumentError if a split the setting needs is empty.
EvalReport evaluate(const Dataset& dataset, const ModelParams& params, const FusionConfig& cfg,
                    std::size_t threads = 1);
EvalReport evaluate_both(const Dataset& dataset, const ModelParams& params, const FusionConfig& cfg,
                         std::size_t threads = 1);

std::string eval_report_json(const EvalReport& report, const FusionConfig& cfg);
std::string per_class_csv(const EvalReport& report, const Dataset& dataset);

}  // namespace msdn
