#pragma once

#include <span>

#include "msdn/matrix.hpp"

namespace msdn {

// Attribute → visual causal attention sub-net.
//
// Shapes: regions V is R×D, attributes A is K×Da, prototypes Z is C×K.
// Attention β is K×R and normalized over regions (each attribute distributes
// its attention across the R regions), which is the axis the aggregation
// F_k = Σ_r β_k^r v_r sums over.

struct AvcaParams {
  Matrix w1;  ///< Da×D, attention bilinear form a_kᵀ W1 v_r
  Matrix w2;  ///< Da×D, embedding bilinear form a_kᵀ W2 F_k

  friend bool operator==(const AvcaParams&, const AvcaParams&) = default;
};

struct AvcaForward {
  Matrix beta;      ///< K×R
  Matrix features;  ///< K×D, F
  Vector psi;       ///< K
  Vector logits;    ///< C, prediction p1
};

struct AvcaIntervened {
  Matrix features_bar;  ///< K×D
  Vector psi_bar;       ///< K
  Vector logits_bar;    ///< C
};

Matrix avca_attention(const Matrix& regions, const Matrix& attributes, const AvcaParams& params);
Matrix avca_features(const Matrix& beta, const Matrix& regions);
Vector avca_embed(const Matrix& features, const Matrix& attributes, const AvcaParams& params);
Vector avca_predict(std::span<const double> psi, const Matrix& class_semantics);

AvcaForward avca_forward(const Matrix& regions, const Matrix& attributes, const AvcaParams& params,
                         const Matrix& class_semantics);

/// Prediction under do(β = β̄). β̄ is an input constant: no gradient reaches it
/// and W1 is not involved.
AvcaIntervened avca_intervened(const Matrix& regions, const Matrix& attributes, const AvcaParams& params,
                               const Matrix& beta_bar, const Matrix& class_semantics);

Vector avca_causal_effect(std::span<const double> logits, std::span<const double> logits_bar);

/// Accumulates scale · ∂L/∂(W1, W2) into `grads`, given ∂L/∂ψ for a forward pass.
void avca_backward(const Matrix& regions, const Matrix& attributes, const AvcaParams& params,
                   const AvcaForward& forward, std::span<const double> grad_psi, AvcaParams& grads,
                   double scale = 1.0);

/// Accumulates scale · ∂L/∂W2 through the intervened branch, given ∂L/∂ψ̄.
void avca_intervened_backward(const Matrix& attributes, const AvcaIntervened& intervened,
                              std::span<const double> grad_psi_bar, AvcaParams& grads, double scale = 1.0);

}  // namespace msdn
