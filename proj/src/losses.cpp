#include "msdn/losses.hpp"

#include <algorithm>
#include <cmath>

#include "msdn/errors.hpp"

namespace msdn {

void LossWeights::validate() const {
  const auto check = [](double v, const char* name) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw ArgumentError(std::string("loss weight ") + name + " must be finite and >= 0");
    }
  };
  check(lambda_cal, "lambda_cal");
  check(lambda_ar, "lambda_ar");
  check(lambda_causal, "lambda_causal");
  check(lambda_distill, "lambda_distill");
}

namespace {

std::size_t seen_index_of(std::size_t label, const Split& split) {
  const auto it = std::find(split.seen_classes.begin(), split.seen_classes.end(), label);
  if (it == split.seen_classes.end()) {
    throw ArgumentError("label " + std::to_string(label) + " is not a seen class");
  }
  return static_cast<std::size_t>(it - split.seen_classes.begin());
}

void check_embedding(std::span<const double> f, const Matrix& class_semantics) {
  if (f.size() != class_semantics.cols()) {
    throw ShapeError("embedding length " + std::to_string(f.size()) + " vs prototypes " +
                     class_semantics.shape_string());
  }
}

// Scatters a gradient over seen-class logits back onto the embedding.
Vector seen_logit_grad_to_embedding(std::span<const double> grad_logits, const Matrix& class_semantics,
                                    const Split& split) {
  Vector g(class_semantics.cols(), 0.0);
  for (std::size_t i = 0; i < split.seen_classes.size(); ++i) {
    const auto z = class_semantics.row(split.seen_classes[i]);
    for (std::size_t k = 0; k < g.size(); ++k) g[k] += grad_logits[i] * z[k];
  }
  return g;
}

bool is_unseen(std::size_t c, const Split& split) {
  return std::find(split.unseen_classes.begin(), split.unseen_classes.end(), c) != split.unseen_classes.end();
}

void check_distribution(std::span<const double> p, const char* name) {
  double sum = 0.0;
  for (double x : p) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw ArgumentError(std::string(name) + " has a negative or non-finite entry");
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-6) {
    throw ArgumentError(std::string(name) + " sums to " + std::to_string(sum) + ", not a distribution");
  }
}

double floored_log(double p) { return std::log(std::max(p, kProbabilityFloor)); }

}  // namespace

Vector seen_logits(std::span<const double> f, const Matrix& class_semantics, const Split& split) {
  check_embedding(f, class_semantics);
  Vector out(split.seen_classes.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = dot(f, class_semantics.row(split.seen_classes[i]));
  return out;
}

LossGrad seen_cross_entropy_grad(std::span<const double> f, std::size_t label, const Matrix& class_semantics,
                                 const Split& split) {
  const std::size_t y = seen_index_of(label, split);
  const Vector logits = seen_logits(f, class_semantics, split);
  const Vector logp = log_softmax(logits);
  Vector grad_logits(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) grad_logits[i] = std::exp(logp[i]) - (i == y ? 1.0 : 0.0);
  return {-logp[y], seen_logit_grad_to_embedding(grad_logits, class_semantics, split)};
}

LossGrad acec_loss_grad(std::span<const double> f, std::size_t label, const Matrix& class_semantics,
                        const Split& split, double lambda_cal) {
  LossGrad out = seen_cross_entropy_grad(f, label, class_semantics, split);
  if (lambda_cal == 0.0 || split.unseen_classes.empty()) return out;

  // Self-calibration over all classes with ±1 indicator offsets.
  const std::size_t C = class_semantics.rows();
  Vector shifted = matvec(class_semantics, f);
  std::vector<bool> unseen(C, false);
  for (std::size_t c = 0; c < C; ++c) {
    unseen[c] = is_unseen(c, split);
    shifted[c] += unseen[c] ? 1.0 : -1.0;
  }
  const Vector logq = log_softmax(shifted);
  const double n_unseen = static_cast<double>(split.unseen_classes.size());
  double term = 0.0;
  Vector grad_logits(C);
  for (std::size_t c = 0; c < C; ++c) {
    if (unseen[c]) term -= logq[c];
    grad_logits[c] = -lambda_cal * ((unseen[c] ? 1.0 : 0.0) - n_unseen * std::exp(logq[c]));
  }
  out.value += lambda_cal * term;
  const Vector g = matvec_t(class_semantics, grad_logits);
  for (std::size_t k = 0; k < g.size(); ++k) out.grad[k] += g[k];
  return out;
}

double acec_loss(std::span<const double> f, std::size_t label, const Matrix& class_semantics, const Split& split,
                 double lambda_cal) {
  return acec_loss_grad(f, label, class_semantics, split, lambda_cal).value;
}

LossGrad ar_loss_grad(std::span<const double> f, std::span<const double> z_true) {
  if (f.size() != z_true.size()) {
    throw ShapeError("ar_loss: length " + std::to_string(f.size()) + " vs " + std::to_string(z_true.size()));
  }
  LossGrad out{0.0, Vector(f.size())};
  for (std::size_t k = 0; k < f.size(); ++k) {
    const double d = f[k] - z_true[k];
    out.value += d * d;
    out.grad[k] = 2.0 * d;
  }
  return out;
}

double ar_loss(std::span<const double> f, std::span<const double> z_true) { return ar_loss_grad(f, z_true).value; }

CausalGrad causal_loss_grad(std::span<const double> f, std::span<const double> f_bar, std::size_t label,
                            const Matrix& class_semantics, const Split& split) {
  LossGrad observed = seen_cross_entropy_grad(f, label, class_semantics, split);
  LossGrad intervened = seen_cross_entropy_grad(f_bar, label, class_semantics, split);
  return {observed.value + intervened.value, std::move(observed.grad), std::move(intervened.grad)};
}

double causal_loss(std::span<const double> f, std::span<const double> f_bar, std::size_t label,
                   const Matrix& class_semantics, const Split& split) {
  return causal_loss_grad(f, f_bar, label, class_semantics, split).value;
}

DistillGrad distill_loss_grad(std::span<const double> p1, std::span<const double> p2) {
  if (p1.size() != p2.size()) {
    throw ArgumentError("distill_loss: distributions of length " + std::to_string(p1.size()) + " and " +
                        std::to_string(p2.size()));
  }
  check_distribution(p1, "distill_loss p1");
  check_distribution(p2, "distill_loss p2");

  DistillGrad out{0.0, Vector(p1.size()), Vector(p2.size())};
  double kl12 = 0.0, kl21 = 0.0, l2 = 0.0;
  for (std::size_t c = 0; c < p1.size(); ++c) {
    const double l1 = floored_log(p1[c]);
    const double lp2 = floored_log(p2[c]);
    const double diff = p1[c] - p2[c];
    // 0·log(0/q) = 0 falls out of the multiplication.
    kl12 += p1[c] * (l1 - lp2);
    kl21 += p2[c] * (lp2 - l1);
    l2 += diff * diff;

    const double dl1 = p1[c] > kProbabilityFloor ? 1.0 / p1[c] : 0.0;
    const double dl2 = p2[c] > kProbabilityFloor ? 1.0 / p2[c] : 0.0;
    out.grad_p1[c] = 0.5 * ((l1 - lp2) + diff * dl1) + 2.0 * diff;
    out.grad_p2[c] = 0.5 * ((lp2 - l1) - diff * dl2) - 2.0 * diff;
  }
  out.value = 0.5 * (kl12 + kl21) + l2;
  return out;
}

double distill_loss(std::span<const double> p1, std::span<const double> p2) {
  return distill_loss_grad(p1, p2).value;
}

LossReport total_loss(const SubnetTerms& avca, const SubnetTerms& vaca, double distill, const LossWeights& weights) {
  weights.validate();
  LossReport r;
  r.weights = weights;
  r.acec = avca.acec + vaca.acec;
  r.ar = avca.ar + vaca.ar;
  r.causal = avca.causal + vaca.causal;
  r.distill = distill;
  r.total = r.acec + weights.lambda_ar * r.ar + weights.lambda_causal * r.causal + weights.lambda_distill * r.distill;
  if (!std::isfinite(r.total)) throw NumericError("total_loss: non-finite loss term");
  return r;
}

}  // namespace msdn
