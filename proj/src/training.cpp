#include "msdn/training.hpp"

#include <chrono>
#include <cmath>

#include "msdn/avca.hpp"
#include "msdn/errors.hpp"
#include "msdn/parallel.hpp"
#include "msdn/vaca.hpp"

namespace msdn {

namespace {

enum Stream : std::uint64_t { kInit = 1, kShuffle = 2, kIntervention = 3 };

}  // namespace

Hyperparams Hyperparams::synthetic_defaults() {
  Hyperparams hp;
  hp.learning_rate = 1e-3;
  hp.batch_size = 10;
  return hp;
}

void Hyperparams::validate() const {
  const auto fail = [](const std::string& msg) { throw ArgumentError("hyperparameters: " + msg); };
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) fail("learning_rate must be finite and >= 0");
  if (batch_size < 1) fail("batch_size must be >= 1");
  if (!(momentum >= 0.0 && momentum < 1.0)) fail("momentum must lie in [0, 1)");
  if (!(weight_decay >= 0.0) || !std::isfinite(weight_decay)) fail("weight_decay must be finite and >= 0");
  if (!(rms_decay >= 0.0 && rms_decay < 1.0)) fail("rms_decay must lie in [0, 1)");
  if (!(rms_epsilon > 0.0)) fail("rms_epsilon must be > 0");
  loss_weights.validate();
}

ModelState ModelState::from_params(ModelParams params) {
  ModelState s;
  s.grads = params.zeros_like();
  s.square_avg = params.zeros_like();
  s.momentum_buffer = params.zeros_like();
  s.params = std::move(params);
  return s;
}

ModelState initialize_state(const Dataset& dataset, std::uint64_t seed) {
  return ModelState::from_params(
      init_params(dataset.feature_dim(), dataset.attribute_dim(), derive_seed(seed, kInit)));
}

void rmsprop_update(ModelState& state, const Hyperparams& hp) {
  auto params = state.params.tensors();
  auto grads = state.grads.tensors();
  auto squares = state.square_avg.tensors();
  auto buffers = state.momentum_buffer.tensors();
  const double decay = 1.0 - hp.learning_rate * hp.weight_decay;
  for (std::size_t t = 0; t < params.size(); ++t) {
    auto theta = params[t]->values();
    auto g = grads[t]->values();
    auto s = squares[t]->values();
    auto b = buffers[t]->values();
    for (std::size_t i = 0; i < theta.size(); ++i) {
      s[i] = hp.rms_decay * s[i] + (1.0 - hp.rms_decay) * g[i] * g[i];
      b[i] = hp.momentum * b[i] + g[i] / (std::sqrt(s[i]) + hp.rms_epsilon);
      theta[i] = decay * theta[i] - hp.learning_rate * b[i];
    }
  }
  ++state.steps;
}

std::vector<SampleInterventions> draw_interventions(const Dataset& dataset, std::span<const std::size_t> batch,
                                                   const ModelParams& params, InterventionKind kind,
                                                   RngStream& rng, std::uint64_t batch_index, std::size_t threads) {
  const std::uint64_t step_seed = rng.next_u64();
  const std::size_t K = dataset.num_attributes();
  const std::size_t R = dataset.regions_per_sample();
  std::vector<SampleInterventions> out(batch.size());
  parallel_for(batch.size(), threads, [&](std::size_t i) {
    RngStream sample_rng(derive_seed(step_seed, i));
    const Matrix& V = dataset.samples[batch[i]].regions;
    const bool needs_observed =
        kind == InterventionKind::reversed || (kind == InterventionKind::random_plus_reversed && batch_index % 2 == 1);
    Matrix beta, gamma;
    if (needs_observed) {
      beta = avca_attention(V, dataset.attributes, params.avca);
      gamma = vaca_attention(V, dataset.attributes, params.vaca);
    }
    out[i].beta_bar = make_intervention_attention(kind, K, R, needs_observed ? &beta : nullptr, sample_rng, batch_index);
    out[i].gamma_bar =
        make_intervention_attention(kind, R, K, needs_observed ? &gamma : nullptr, sample_rng, batch_index);
  });
  return out;
}

LossReport train_step(std::span<const std::size_t> batch, const Dataset& dataset, ModelState& state,
                      const Hyperparams& hp, RngStream& rng, std::size_t* correct) {
  if (batch.empty()) throw ArgumentError("train_step: empty batch");
  const ClassPartition classes(dataset.split, dataset.num_classes());
  for (auto i : batch) {
    if (i >= dataset.samples.size()) throw ArgumentError("train_step: sample index out of range");
    if (!classes.is_seen(dataset.samples[i].label)) {
      throw ArgumentError("train_step: sample " + std::to_string(i) + " does not belong to a seen class");
    }
  }
  const auto interventions =
      draw_interventions(dataset, batch, state.params, hp.intervention, rng, state.steps, hp.threads);
  BatchObjective objective =
      batch_objective(dataset, batch, state.params, hp.loss_weights, interventions, true, hp.threads);
  state.grads = std::move(objective.grads);
  rmsprop_update(state, hp);
  if (correct != nullptr) *correct = objective.correct;
  return objective.report;
}

TrainResult train(const Dataset& dataset, const Hyperparams& hp, const EpochCallback& on_epoch) {
  hp.validate();
  validate_dataset(dataset);
  if (dataset.split.train_samples.empty()) throw ArgumentError("train: dataset has no training samples");

  TrainResult result{initialize_state(dataset, hp.seed), {}};
  RngStream shuffle_rng(derive_seed(hp.seed, kShuffle));
  RngStream intervention_rng(derive_seed(hp.seed, kIntervention, hp.intervention_stream));
  const auto& train_idx = dataset.split.train_samples;

  for (std::size_t epoch = 0; epoch < hp.epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    const auto order = shuffle_rng.permutation(train_idx.size());
    std::vector<std::size_t> shuffled(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) shuffled[i] = train_idx[order[i]];

    EpochRecord record;
    record.loss.weights = hp.loss_weights;
    std::size_t correct_total = 0;
    for (std::size_t begin = 0; begin < shuffled.size(); begin += hp.batch_size) {
      const std::size_t end = std::min(shuffled.size(), begin + hp.batch_size);
      const std::span<const std::size_t> batch(shuffled.data() + begin, end - begin);
      std::size_t correct = 0;
      const LossReport r = train_step(batch, dataset, result.state, hp, intervention_rng, &correct);
      // Sample-weighted so a short final batch counts proportionally.
      const double w = static_cast<double>(batch.size()) / static_cast<double>(shuffled.size());
      record.loss.acec += w * r.acec;
      record.loss.ar += w * r.ar;
      record.loss.causal += w * r.causal;
      record.loss.distill += w * r.distill;
      record.loss.total += w * r.total;
      correct_total += correct;
    }
    record.train_accuracy = static_cast<double>(correct_total) / static_cast<double>(shuffled.size());
    record.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.log.epochs.push_back(record);
    if (on_epoch) on_epoch(epoch + 1, record);
  }
  return result;
}

}  // namespace msdn
