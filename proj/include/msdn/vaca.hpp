#pragma once

#include <span>

#include "msdn/matrix.hpp"

namespace msdn {

// Visual → attribute causal attention sub-net.
//
// Attention γ is R×K and normalized over attributes per region, the axis the
// aggregation S_r = Σ_k γ_r^k a_k sums over. The region scores Ψ̂ (length R)
// are lifted to attribute space through the per-sample bilinear matrix
// Att[r][k] = v_rᵀ W_att a_k using raw scores (no softmax): Ψ = Ψ̂ᵀ · Att.

struct VacaParams {
  Matrix w3;     ///< D×Da, attention bilinear form v_rᵀ W3 a_k
  Matrix w4;     ///< D×Da, embedding bilinear form v_rᵀ W4 S_r
  Matrix w_att;  ///< D×Da, region→attribute lift

  friend bool operator==(const VacaParams&, const VacaParams&) = default;
};

struct VacaForward {
  Matrix gamma;     ///< R×K
  Matrix features;  ///< R×Da, S
  Vector psi_hat;   ///< R
  Matrix lift;      ///< R×K, Att
  Vector psi_attr;  ///< K, Ψ
  Vector logits;    ///< C, prediction p2
};

struct VacaIntervened {
  Matrix features_bar;  ///< R×Da
  Vector psi_hat_bar;   ///< R
  Matrix lift;          ///< R×K
  Vector psi_attr_bar;  ///< K
  Vector logits_bar;    ///< C
};

Matrix vaca_attention(const Matrix& regions, const Matrix& attributes, const VacaParams& params);
Matrix vaca_features(const Matrix& gamma, const Matrix& attributes);
Vector vaca_embed(const Matrix& regions, const Matrix& features, const VacaParams& params);
/// R×K matrix Att[r][k] = v_rᵀ W_att a_k.
Matrix vaca_lift(const Matrix& regions, const Matrix& attributes, const VacaParams& params);
Vector vaca_project(std::span<const double> psi_hat, const Matrix& regions, const Matrix& attributes,
                    const VacaParams& params);
Vector vaca_predict(std::span<const double> psi_attr, const Matrix& class_semantics);

VacaForward vaca_forward(const Matrix& regions, const Matrix& attributes, const VacaParams& params,
                         const Matrix& class_semantics);

/// Prediction under do(γ = γ̄); γ̄ is constant and W3 is not involved.
VacaIntervened vaca_intervened(const Matrix& regions, const Matrix& attributes, const VacaParams& params,
                               const Matrix& gamma_bar, const Matrix& class_semantics);

Vector vaca_causal_effect(std::span<const double> logits, std::span<const double> logits_bar);

void vaca_backward(const Matrix& regions, const Matrix& attributes, const VacaParams& params,
                   const VacaForward& forward, std::span<const double> grad_psi_attr, VacaParams& grads,
                   double scale = 1.0);

void vaca_intervened_backward(const Matrix& regions, const Matrix& attributes, const VacaParams& params,
                              const VacaIntervened& intervened, std::span<const double> grad_psi_attr_bar,
                              VacaParams& grads, double scale = 1.0);

}  // namespace msdn
