#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "msdn/matrix.hpp"

namespace msdn {

/// A parameter exposed to the gradient checker. `value` is perturbed in place
/// and restored afterwards.
struct NamedParam {
  std::string name;
  Matrix* value;
};

/// Evaluates the loss at the current parameter values. When `grads` is non-null
/// it is filled with one analytic gradient per parameter, in the same order.
using LossWithGrad = std::function<double(std::vector<Matrix>* grads)>;

struct ParamError {
  std::string name;
  double max_relative_error = 0.0;
  std::size_t worst_index = 0;
};

struct GradCheckReport {
  double max_relative_error = 0.0;
  std::string worst_parameter;
  std::vector<ParamError> per_parameter_errors;
  bool passed = true;
};

/// Entry-wise relative error is |analytic - numeric| / max(|analytic|, |numeric|, floor).
/// The floor keeps entries whose true gradient is ~0 from reporting round-off as
/// a large relative error.
inline constexpr double kGradCheckFloor = 1e-4;

/// Compares analytic gradients against central differences
/// (f(θ+ε) - f(θ-ε)) / 2ε for every entry of every parameter.
/// Throws NumericError naming the parameter if any evaluation is non-finite.
GradCheckReport finite_difference_check(const LossWithGrad& loss_fn, std::span<const NamedParam> params,
                                        double epsilon, double tolerance);

}  // namespace msdn
