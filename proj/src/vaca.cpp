#include "msdn/vaca.hpp"

#include "msdn/attention_common.hpp"
#include "msdn/errors.hpp"

namespace msdn {

namespace {

void check_weight(const Matrix& w, const Matrix& regions, const Matrix& attributes, const char* name) {
  if (w.rows() != regions.cols() || w.cols() != attributes.cols()) {
    throw ShapeError(std::string("vaca: ") + name + " is " + w.shape_string() + ", expected [" +
                     std::to_string(regions.cols()) + "x" + std::to_string(attributes.cols()) + "] (D x Da)");
  }
}

Matrix scale_rows(Matrix m, std::span<const double> s) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (double& x : m.row(r)) x *= s[r];
  }
  return m;
}

// Shared tail of the observed and intervened pipelines: Ψ̂ from S, then Ψ and logits.
struct Tail {
  Vector psi_hat;
  Matrix lift;
  Vector psi_attr;
  Vector logits;
};

Tail run_tail(const Matrix& regions, const Matrix& attributes, const VacaParams& params, const Matrix& features,
              const Matrix& class_semantics) {
  Tail t;
  t.psi_hat = vaca_embed(regions, features, params);
  t.lift = vaca_lift(regions, attributes, params);
  t.psi_attr = matvec_t(t.lift, t.psi_hat);
  t.logits = vaca_predict(t.psi_attr, class_semantics);
  return t;
}

// Gradients of the tail w.r.t. W4 and W_att; returns ∂L/∂S.
Matrix backward_tail(const Matrix& regions, const Matrix& attributes, const VacaParams& params,
                     const Matrix& features, std::span<const double> psi_hat, const Matrix& lift,
                     std::span<const double> grad_psi_attr, VacaParams& grads, double scale) {
  const std::size_t R = regions.rows();
  const std::size_t K = attributes.rows();
  if (grad_psi_attr.size() != K) throw ShapeError("vaca backward: grad length mismatch");

  // Ψ = Attᵀ Ψ̂
  const Vector grad_psi_hat = matvec(lift, grad_psi_attr);
  Matrix grad_lift(R, K);
  for (std::size_t r = 0; r < R; ++r) {
    for (std::size_t k = 0; k < K; ++k) grad_lift(r, k) = psi_hat[r] * grad_psi_attr[k];
  }
  // Att = (V W_att) Aᵀ  ⇒  ∂W_att = Vᵀ · ∂Att · A
  add_inplace(grads.w_att, matmul_at(regions, matmul(grad_lift, attributes)), scale);

  // Ψ̂_r = (V W4)_r · S_r
  add_inplace(grads.w4, matmul_at(regions, scale_rows(features, grad_psi_hat)), scale);
  return scale_rows(matmul(regions, params.w4), grad_psi_hat);
}

}  // namespace

Matrix vaca_attention(const Matrix& regions, const Matrix& attributes, const VacaParams& params) {
  check_weight(params.w3, regions, attributes, "W3");
  // scores[r][k] = v_rᵀ W3 a_k
  return softmax_rows(matmul_bt(matmul(regions, params.w3), attributes));
}

Matrix vaca_features(const Matrix& gamma, const Matrix& attributes) {
  if (gamma.cols() != attributes.rows()) {
    throw ShapeError("vaca_features: gamma " + gamma.shape_string() + " vs attributes " + attributes.shape_string());
  }
  return matmul(gamma, attributes);
}

Vector vaca_embed(const Matrix& regions, const Matrix& features, const VacaParams& params) {
  if (features.rows() != regions.rows() || params.w4.rows() != regions.cols() ||
      params.w4.cols() != features.cols()) {
    throw ShapeError("vaca_embed: regions " + regions.shape_string() + ", features " + features.shape_string() +
                     ", W4 " + params.w4.shape_string());
  }
  return row_dots(matmul(regions, params.w4), features);
}

Matrix vaca_lift(const Matrix& regions, const Matrix& attributes, const VacaParams& params) {
  check_weight(params.w_att, regions, attributes, "W_att");
  return matmul_bt(matmul(regions, params.w_att), attributes);
}

Vector vaca_project(std::span<const double> psi_hat, const Matrix& regions, const Matrix& attributes,
                    const VacaParams& params) {
  if (psi_hat.size() != regions.rows()) {
    throw ShapeError("vaca_project: psi_hat length " + std::to_string(psi_hat.size()) + " vs R=" +
                     std::to_string(regions.rows()));
  }
  return matvec_t(vaca_lift(regions, attributes, params), psi_hat);
}

Vector vaca_predict(std::span<const double> psi_attr, const Matrix& class_semantics) {
  if (class_semantics.cols() != psi_attr.size()) {
    throw ShapeError("vaca_predict: psi length " + std::to_string(psi_attr.size()) + " vs prototypes " +
                     class_semantics.shape_string());
  }
  return matvec(class_semantics, psi_attr);
}

VacaForward vaca_forward(const Matrix& regions, const Matrix& attributes, const VacaParams& params,
                         const Matrix& class_semantics) {
  check_weight(params.w4, regions, attributes, "W4");
  VacaForward out;
  out.gamma = vaca_attention(regions, attributes, params);
  out.features = vaca_features(out.gamma, attributes);
  Tail t = run_tail(regions, attributes, params, out.features, class_semantics);
  out.psi_hat = std::move(t.psi_hat);
  out.lift = std::move(t.lift);
  out.psi_attr = std::move(t.psi_attr);
  out.logits = std::move(t.logits);
  return out;
}

VacaIntervened vaca_intervened(const Matrix& regions, const Matrix& attributes, const VacaParams& params,
                               const Matrix& gamma_bar, const Matrix& class_semantics) {
  check_weight(params.w4, regions, attributes, "W4");
  if (gamma_bar.rows() != regions.rows() || gamma_bar.cols() != attributes.rows()) {
    throw ShapeError("vaca_intervened: gamma_bar " + gamma_bar.shape_string() + ", expected R x K");
  }
  require_rows_normalized(gamma_bar, "vaca_intervened gamma_bar");
  VacaIntervened out;
  out.features_bar = vaca_features(gamma_bar, attributes);
  Tail t = run_tail(regions, attributes, params, out.features_bar, class_semantics);
  out.psi_hat_bar = std::move(t.psi_hat);
  out.lift = std::move(t.lift);
  out.psi_attr_bar = std::move(t.psi_attr);
  out.logits_bar = std::move(t.logits);
  return out;
}

Vector vaca_causal_effect(std::span<const double> logits, std::span<const double> logits_bar) {
  return logit_difference(logits, logits_bar);
}

void vaca_backward(const Matrix& regions, const Matrix& attributes, const VacaParams& params,
                   const VacaForward& forward, std::span<const double> grad_psi_attr, VacaParams& grads,
                   double scale) {
  const Matrix grad_features = backward_tail(regions, attributes, params, forward.features, forward.psi_hat,
                                             forward.lift, grad_psi_attr, grads, scale);
  const Matrix grad_gamma = matmul_bt(grad_features, attributes);  // R×K
  Matrix grad_scores(grad_gamma.rows(), grad_gamma.cols());
  for (std::size_t r = 0; r < grad_gamma.rows(); ++r) {
    const Vector g = softmax_backward(forward.gamma.row(r), grad_gamma.row(r));
    std::copy(g.begin(), g.end(), grad_scores.row(r).begin());
  }
  // scores = (V W3) Aᵀ  ⇒  ∂W3 = Vᵀ · ∂scores · A
  add_inplace(grads.w3, matmul_at(regions, matmul(grad_scores, attributes)), scale);
}

void vaca_intervened_backward(const Matrix& regions, const Matrix& attributes, const VacaParams& params,
                              const VacaIntervened& intervened, std::span<const double> grad_psi_attr_bar,
                              VacaParams& grads, double scale) {
  backward_tail(regions, attributes, params, intervened.features_bar, intervened.psi_hat_bar, intervened.lift,
                grad_psi_attr_bar, grads, scale);
}

}  // namespace msdn
