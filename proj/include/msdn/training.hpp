#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "msdn/dataset.hpp"
#include "msdn/intervention.hpp"
#include "msdn/losses.hpp"
#include "msdn/model.hpp"
#include "msdn/objective.hpp"
#include "msdn/rng.hpp"

namespace msdn {

struct Hyperparams {
  double learning_rate = 1e-4;
  std::size_t batch_size = 50;
  std::size_t epochs = 30;
  double momentum = 0.9;
  double weight_decay = 1e-4;
  double rms_decay = 0.99;
  double rms_epsilon = 1e-8;
  LossWeights loss_weights = LossWeights::cub();
  InterventionKind intervention = InterventionKind::random;
  std::uint64_t seed = 0;
  /// Selects the substream that intervention attentions are drawn from,
  /// independently of initialization and shuffling.
  std::uint64_t intervention_stream = 0;
  /// Worker cap for per-sample forward/backward passes (results are identical
  /// for every value).
  std::size_t threads = 1;

  /// Optimizer settings used for real features: lr 1e-4, batch 50,
  /// RMSProp momentum 0.9, weight decay 1e-4.
  static Hyperparams reference_defaults() { return {}; }
  /// Settings used for the desk-scale synthetic datasets, whose training
  /// split is two orders of magnitude smaller.
  static Hyperparams synthetic_defaults();

  /// Throws ArgumentError naming the first invalid field.
  void validate() const;
};

struct ModelState {
  ModelParams params;
  ModelParams grads;
  ModelParams square_avg;
  ModelParams momentum_buffer;
  std::uint64_t steps = 0;

  static ModelState from_params(ModelParams params);
};

/// Fresh state with parameters drawn from the initialization substream of `seed`.
ModelState initialize_state(const Dataset& dataset, std::uint64_t seed);

struct EpochRecord {
  LossReport loss;
  double train_accuracy = 0.0;
  double seconds = 0.0;
};

struct TrainLog {
  std::vector<EpochRecord> epochs;
};

/// RMSProp with momentum and decoupled weight decay, applied using state.grads:
///   s ← ρ s + (1-ρ) g²;  b ← μ b + g / (√s + ε);  θ ← θ - lr·wd·θ - lr·b
void rmsprop_update(ModelState& state, const Hyperparams& hp);

/// Per-sample exogenous attentions for a batch. Each sample gets its own stream
/// derived from one draw of `rng`, so results do not depend on thread count.
std::vector<SampleInterventions> draw_interventions(const Dataset& dataset, std::span<const std::size_t> batch,
                                                   const ModelParams& params, InterventionKind kind,
                                                   RngStream& rng, std::uint64_t batch_index,
                                                   std::size_t threads = 1);

/// One optimization step on `batch`; returns the pre-update loss report.
/// `correct`, when given, receives the number of samples ranked correctly by
/// the pre-update forward pass.
LossReport train_step(std::span<const std::size_t> batch, const Dataset& dataset, ModelState& state,
                      const Hyperparams& hp, RngStream& rng, std::size_t* correct = nullptr);

struct TrainResult {
  ModelState state;
  TrainLog log;
};

/// Called after every epoch with the 1-based epoch number.
using EpochCallback = std::function<void(std::size_t epoch, const EpochRecord&)>;

TrainResult train(const Dataset& dataset, const Hyperparams& hp, const EpochCallback& on_epoch = {});

}  // namespace msdn
