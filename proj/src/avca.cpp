#include "msdn/avca.hpp"

#include "msdn/attention_common.hpp"
#include "msdn/errors.hpp"

namespace msdn {

namespace {

void check_params(const Matrix& regions, const Matrix& attributes, const AvcaParams& p) {
  const auto expect = [&](const Matrix& w, const char* name) {
    if (w.rows() != attributes.cols() || w.cols() != regions.cols()) {
      throw ShapeError(std::string("avca: ") + name + " is " + w.shape_string() + ", expected [" +
                       std::to_string(attributes.cols()) + "x" + std::to_string(regions.cols()) + "] (Da x D)");
    }
  };
  expect(p.w1, "W1");
  expect(p.w2, "W2");
}

}  // namespace

Matrix avca_attention(const Matrix& regions, const Matrix& attributes, const AvcaParams& params) {
  check_params(regions, attributes, params);
  // scores[k][r] = a_kᵀ W1 v_r
  const Matrix scores = matmul_bt(matmul(attributes, params.w1), regions);
  return softmax_rows(scores);
}

Matrix avca_features(const Matrix& beta, const Matrix& regions) {
  if (beta.cols() != regions.rows()) {
    throw ShapeError("avca_features: beta " + beta.shape_string() + " vs regions " + regions.shape_string());
  }
  return matmul(beta, regions);
}

Vector avca_embed(const Matrix& features, const Matrix& attributes, const AvcaParams& params) {
  if (features.rows() != attributes.rows() || params.w2.rows() != attributes.cols() ||
      params.w2.cols() != features.cols()) {
    throw ShapeError("avca_embed: features " + features.shape_string() + ", attributes " +
                     attributes.shape_string() + ", W2 " + params.w2.shape_string());
  }
  return row_dots(matmul(attributes, params.w2), features);
}

Vector avca_predict(std::span<const double> psi, const Matrix& class_semantics) {
  if (class_semantics.cols() != psi.size()) {
    throw ShapeError("avca_predict: psi length " + std::to_string(psi.size()) + " vs prototypes " +
                     class_semantics.shape_string());
  }
  return matvec(class_semantics, psi);
}

AvcaForward avca_forward(const Matrix& regions, const Matrix& attributes, const AvcaParams& params,
                         const Matrix& class_semantics) {
  AvcaForward out;
  out.beta = avca_attention(regions, attributes, params);
  out.features = avca_features(out.beta, regions);
  out.psi = avca_embed(out.features, attributes, params);
  out.logits = avca_predict(out.psi, class_semantics);
  return out;
}

AvcaIntervened avca_intervened(const Matrix& regions, const Matrix& attributes, const AvcaParams& params,
                               const Matrix& beta_bar, const Matrix& class_semantics) {
  check_params(regions, attributes, params);
  if (beta_bar.rows() != attributes.rows() || beta_bar.cols() != regions.rows()) {
    throw ShapeError("avca_intervened: beta_bar " + beta_bar.shape_string() + ", expected K x R");
  }
  require_rows_normalized(beta_bar, "avca_intervened beta_bar");
  AvcaIntervened out;
  out.features_bar = avca_features(beta_bar, regions);
  out.psi_bar = avca_embed(out.features_bar, attributes, params);
  out.logits_bar = avca_predict(out.psi_bar, class_semantics);
  return out;
}

Vector avca_causal_effect(std::span<const double> logits, std::span<const double> logits_bar) {
  return logit_difference(logits, logits_bar);
}

namespace {

// ∂/∂W2 of Σ_k g_k a_kᵀ W2 F_k = Aᵀ · diag(g) · F
void accumulate_embed_grad(const Matrix& attributes, const Matrix& features, std::span<const double> grad_psi,
                           Matrix& grad_w2, double scale) {
  Matrix scaled = features;
  for (std::size_t k = 0; k < scaled.rows(); ++k) {
    for (double& x : scaled.row(k)) x *= grad_psi[k];
  }
  add_inplace(grad_w2, matmul_at(attributes, scaled), scale);
}

}  // namespace

void avca_backward(const Matrix& regions, const Matrix& attributes, const AvcaParams& params,
                   const AvcaForward& forward, std::span<const double> grad_psi, AvcaParams& grads, double scale) {
  const std::size_t K = attributes.rows();
  if (grad_psi.size() != K) throw ShapeError("avca_backward: grad_psi length mismatch");

  accumulate_embed_grad(attributes, forward.features, grad_psi, grads.w2, scale);

  // ∂L/∂F_k = g_k · (A·W2)_k
  Matrix grad_features = matmul(attributes, params.w2);
  for (std::size_t k = 0; k < K; ++k) {
    for (double& x : grad_features.row(k)) x *= grad_psi[k];
  }
  const Matrix grad_beta = matmul_bt(grad_features, regions);  // K×R
  Matrix grad_scores(K, regions.rows());
  for (std::size_t k = 0; k < K; ++k) {
    const Vector g = softmax_backward(forward.beta.row(k), grad_beta.row(k));
    std::copy(g.begin(), g.end(), grad_scores.row(k).begin());
  }
  // scores = (A W1) Vᵀ  ⇒  ∂W1 = Aᵀ · ∂scores · V
  add_inplace(grads.w1, matmul_at(attributes, matmul(grad_scores, regions)), scale);
}

void avca_intervened_backward(const Matrix& attributes, const AvcaIntervened& intervened,
                              std::span<const double> grad_psi_bar, AvcaParams& grads, double scale) {
  if (grad_psi_bar.size() != attributes.rows()) throw ShapeError("avca_intervened_backward: grad length mismatch");
  accumulate_embed_grad(attributes, intervened.features_bar, grad_psi_bar, grads.w2, scale);
}

}  // namespace msdn
