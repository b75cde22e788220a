#pragma once

#include <span>

#include "msdn/dataset.hpp"
#include "msdn/matrix.hpp"

namespace msdn {

struct LossWeights {
  double lambda_cal = 0.05;
  double lambda_ar = 0.03;
  double lambda_causal = 0.3;
  double lambda_distill = 0.001;

  static LossWeights cub() { return {0.05, 0.03, 0.3, 0.001}; }
  static LossWeights sun() { return {0.0001, 0.01, 0.0005, 0.05}; }
  static LossWeights awa2() { return {0.4, 0.06, 0.1, 0.01}; }

  /// Throws ArgumentError if any weight is negative or non-finite.
  void validate() const;

  friend bool operator==(const LossWeights&, const LossWeights&) = default;
};

/// Per-term batch means. acec, ar and causal are summed over both sub-nets.
struct LossReport {
  double acec = 0.0;
  double ar = 0.0;
  double causal = 0.0;
  double distill = 0.0;
  double total = 0.0;
  LossWeights weights;
};

/// Floor applied to probabilities inside the KL logarithms.
inline constexpr double kProbabilityFloor = 1e-12;

/// A scalar loss and its gradient w.r.t. the embedding it was evaluated at.
struct LossGrad {
  double value = 0.0;
  Vector grad;
};

/// Attribute-based cross-entropy with self-calibration for one sample:
///   -log softmax_{seen}(f·z)[label]
///   - λ_cal Σ_{c'∈unseen} log softmax_{all}(f·z + I)[c'],   I = +1 unseen, -1 otherwise.
double acec_loss(std::span<const double> f, std::size_t label, const Matrix& class_semantics, const Split& split,
                 double lambda_cal);
LossGrad acec_loss_grad(std::span<const double> f, std::size_t label, const Matrix& class_semantics,
                        const Split& split, double lambda_cal);

/// ‖f - z‖².
double ar_loss(std::span<const double> f, std::span<const double> z_true);
LossGrad ar_loss_grad(std::span<const double> f, std::span<const double> z_true);

/// Cross-entropy over seen classes for the observed and the intervened embedding, summed.
double causal_loss(std::span<const double> f, std::span<const double> f_bar, std::size_t label,
                   const Matrix& class_semantics, const Split& split);

struct CausalGrad {
  double value = 0.0;
  Vector grad_f;
  Vector grad_f_bar;
};
CausalGrad causal_loss_grad(std::span<const double> f, std::span<const double> f_bar, std::size_t label,
                            const Matrix& class_semantics, const Split& split);

/// ½(KL(p1‖p2) + KL(p2‖p1)) + ‖p1 - p2‖² over seen-class posteriors.
double distill_loss(std::span<const double> p1, std::span<const double> p2);

struct DistillGrad {
  double value = 0.0;
  Vector grad_p1;
  Vector grad_p2;
};
DistillGrad distill_loss_grad(std::span<const double> p1, std::span<const double> p2);

/// Per-sub-net term values entering the weighted total.
struct SubnetTerms {
  double acec = 0.0;
  double ar = 0.0;
  double causal = 0.0;
};

/// total = ACEC + λ_AR·AR + λ_causal·causal + λ_distill·distill, where the first
/// three are summed over the two sub-nets with equal weight.
LossReport total_loss(const SubnetTerms& avca, const SubnetTerms& vaca, double distill, const LossWeights& weights);

/// Seen-class logits z^c·f for c in split.seen_classes order.
Vector seen_logits(std::span<const double> f, const Matrix& class_semantics, const Split& split);

/// Cross-entropy of softmax over seen classes; gradient w.r.t. f.
LossGrad seen_cross_entropy_grad(std::span<const double> f, std::size_t label, const Matrix& class_semantics,
                                 const Split& split);

}  // namespace msdn
