#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "msdn/dataset.hpp"
#include "msdn/losses.hpp"
#include "msdn/model.hpp"

namespace msdn {

/// Exogenous attentions for one sample: β̄ (K×R) for AVCA and γ̄ (R×K) for VACA.
struct SampleInterventions {
  Matrix beta_bar;
  Matrix gamma_bar;
};

struct BatchObjective {
  LossReport report;
  /// ∂total/∂params, already divided by the batch size. Empty when not requested.
  ModelParams grads;
  /// Samples whose summed seen-class logits (p1 + p2) rank the true class first.
  std::size_t correct = 0;
};

/// Batch-mean total loss of both sub-nets with fixed interventions, optionally
/// with its analytic gradient. Per-sample work may run on `threads` workers;
/// the reduction is performed in sample order, so results do not depend on the
/// thread count. Throws NumericError naming the sample on a non-finite loss.
BatchObjective batch_objective(const Dataset& dataset, std::span<const std::size_t> batch,
                               const ModelParams& params, const LossWeights& weights,
                               std::span<const SampleInterventions> interventions, bool want_grad,
                               std::size_t threads = 1);

}  // namespace msdn
