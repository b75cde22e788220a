#include "msdn/objective.hpp"

#include <algorithm>
#include <cmath>

#include "msdn/errors.hpp"
#include "msdn/parallel.hpp"

namespace msdn {

namespace {

struct SampleResult {
  SubnetTerms avca;
  SubnetTerms vaca;
  double distill = 0.0;
  bool correct = false;
  ModelParams grads;
};

// ∂L/∂f from a gradient over seen-class logits.
Vector seen_grad_to_embedding(std::span<const double> grad_logits, const Matrix& z, const Split& split) {
  Vector g(z.cols(), 0.0);
  for (std::size_t i = 0; i < split.seen_classes.size(); ++i) {
    const auto row = z.row(split.seen_classes[i]);
    for (std::size_t k = 0; k < g.size(); ++k) g[k] += grad_logits[i] * row[k];
  }
  return g;
}

void axpy(Vector& y, double a, std::span<const double> x) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

SampleResult evaluate_sample(const Dataset& d, std::size_t index, const ModelParams& params,
                             const LossWeights& w, const SampleInterventions& iv, bool want_grad, double scale) {
  const Sample& sample = d.samples[index];
  const Matrix& V = sample.regions;
  const Matrix& A = d.attributes;
  const Matrix& Z = d.class_semantics;
  const Split& split = d.split;
  const auto z_true = d.prototype(sample.label);

  const AvcaForward av = avca_forward(V, A, params.avca, Z);
  const VacaForward va = vaca_forward(V, A, params.vaca, Z);
  const AvcaIntervened av_bar = avca_intervened(V, A, params.avca, iv.beta_bar, Z);
  const VacaIntervened va_bar = vaca_intervened(V, A, params.vaca, iv.gamma_bar, Z);

  const LossGrad acec1 = acec_loss_grad(av.psi, sample.label, Z, split, w.lambda_cal);
  const LossGrad acec2 = acec_loss_grad(va.psi_attr, sample.label, Z, split, w.lambda_cal);
  const LossGrad ar1 = ar_loss_grad(av.psi, z_true);
  const LossGrad ar2 = ar_loss_grad(va.psi_attr, z_true);
  const CausalGrad causal1 = causal_loss_grad(av.psi, av_bar.psi_bar, sample.label, Z, split);
  const CausalGrad causal2 = causal_loss_grad(va.psi_attr, va_bar.psi_attr_bar, sample.label, Z, split);

  const Vector seen1 = seen_logits(av.psi, Z, split);
  const Vector seen2 = seen_logits(va.psi_attr, Z, split);
  const Vector p1 = softmax(seen1);
  const Vector p2 = softmax(seen2);
  const DistillGrad distill = distill_loss_grad(p1, p2);

  SampleResult out;
  out.avca = {acec1.value, ar1.value, causal1.value};
  out.vaca = {acec2.value, ar2.value, causal2.value};
  out.distill = distill.value;

  std::size_t best = 0;
  for (std::size_t i = 1; i < seen1.size(); ++i) {
    if (seen1[i] + seen2[i] > seen1[best] + seen2[best]) best = i;
  }
  out.correct = split.seen_classes[best] == sample.label;

  const double total = acec1.value + acec2.value + w.lambda_ar * (ar1.value + ar2.value) +
                       w.lambda_causal * (causal1.value + causal2.value) + w.lambda_distill * distill.value;
  if (!std::isfinite(total)) {
    throw NumericError("non-finite loss at sample index " + std::to_string(index));
  }
  if (!want_grad) return out;

  // ∂/∂ψ and ∂/∂Ψ on the observed branches.
  Vector g1 = acec1.grad;
  Vector g2 = acec2.grad;
  axpy(g1, w.lambda_ar, ar1.grad);
  axpy(g2, w.lambda_ar, ar2.grad);
  axpy(g1, w.lambda_causal, causal1.grad_f);
  axpy(g2, w.lambda_causal, causal2.grad_f);
  if (w.lambda_distill != 0.0) {
    axpy(g1, w.lambda_distill, seen_grad_to_embedding(softmax_backward(p1, distill.grad_p1), Z, split));
    axpy(g2, w.lambda_distill, seen_grad_to_embedding(softmax_backward(p2, distill.grad_p2), Z, split));
  }

  out.grads = params.zeros_like();
  avca_backward(V, A, params.avca, av, g1, out.grads.avca, scale);
  vaca_backward(V, A, params.vaca, va, g2, out.grads.vaca, scale);

  // Intervened branches: only the embedding weights see these gradients.
  if (w.lambda_causal != 0.0) {
    Vector g1_bar = causal1.grad_f_bar;
    Vector g2_bar = causal2.grad_f_bar;
    for (double& x : g1_bar) x *= w.lambda_causal;
    for (double& x : g2_bar) x *= w.lambda_causal;
    avca_intervened_backward(A, av_bar, g1_bar, out.grads.avca, scale);
    vaca_intervened_backward(V, A, params.vaca, va_bar, g2_bar, out.grads.vaca, scale);
  }
  return out;
}

}  // namespace

BatchObjective batch_objective(const Dataset& dataset, std::span<const std::size_t> batch,
                               const ModelParams& params, const LossWeights& weights,
                               std::span<const SampleInterventions> interventions, bool want_grad,
                               std::size_t threads) {
  if (batch.empty()) throw ArgumentError("batch_objective: empty batch");
  if (interventions.size() != batch.size()) {
    throw ArgumentError("batch_objective: need one intervention per sample (" + std::to_string(batch.size()) +
                        " samples, " + std::to_string(interventions.size()) + " interventions)");
  }
  weights.validate();
  for (auto i : batch) {
    if (i >= dataset.samples.size()) throw ArgumentError("batch_objective: sample index out of range");
  }

  const double scale = 1.0 / static_cast<double>(batch.size());
  std::vector<SampleResult> results(batch.size());
  parallel_for(batch.size(), threads, [&](std::size_t i) {
    results[i] = evaluate_sample(dataset, batch[i], params, weights, interventions[i], want_grad, scale);
  });

  SubnetTerms avca, vaca;
  double distill = 0.0;
  BatchObjective out;
  if (want_grad) out.grads = params.zeros_like();
  for (const auto& r : results) {
    avca.acec += r.avca.acec;
    avca.ar += r.avca.ar;
    avca.causal += r.avca.causal;
    vaca.acec += r.vaca.acec;
    vaca.ar += r.vaca.ar;
    vaca.causal += r.vaca.causal;
    distill += r.distill;
    out.correct += r.correct ? 1 : 0;
    if (want_grad) {
      auto dst = out.grads.tensors();
      auto src = r.grads.tensors();
      for (std::size_t t = 0; t < dst.size(); ++t) add_inplace(*dst[t], *src[t]);
    }
  }
  for (double* v : {&avca.acec, &avca.ar, &avca.causal, &vaca.acec, &vaca.ar, &vaca.causal, &distill}) *v *= scale;
  out.report = total_loss(avca, vaca, distill, weights);
  return out;
}

}  // namespace msdn
