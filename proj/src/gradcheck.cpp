#include "msdn/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "msdn/errors.hpp"

namespace msdn {

namespace {

double checked(double v, const std::string& context) {
  if (!std::isfinite(v)) throw NumericError("non-finite loss while perturbing " + context);
  return v;
}

}  // namespace

GradCheckReport finite_difference_check(const LossWithGrad& loss_fn, std::span<const NamedParam> params,
                                        double epsilon, double tolerance) {
  if (!(epsilon > 0.0)) throw ArgumentError("finite_difference_check: epsilon must be > 0");

  std::vector<Matrix> analytic;
  checked(loss_fn(&analytic), "unperturbed parameters");
  if (analytic.size() != params.size()) {
    throw ShapeError("finite_difference_check: loss function returned " + std::to_string(analytic.size()) +
                     " gradients for " + std::to_string(params.size()) + " parameters");
  }

  GradCheckReport report;
  for (std::size_t p = 0; p < params.size(); ++p) {
    const NamedParam& param = params[p];
    Matrix& value = *param.value;
    if (analytic[p].rows() != value.rows() || analytic[p].cols() != value.cols()) {
      throw ShapeError("finite_difference_check: gradient for " + param.name + " has shape " +
                       analytic[p].shape_string() + ", parameter has " + value.shape_string());
    }
    ParamError err{param.name, 0.0, 0};
    auto entries = value.values();
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const double saved = entries[i];
      const std::string where = param.name + "[" + std::to_string(i) + "]";
      entries[i] = saved + epsilon;
      const double plus = checked(loss_fn(nullptr), where);
      entries[i] = saved - epsilon;
      const double minus = checked(loss_fn(nullptr), where);
      entries[i] = saved;

      const double numeric = (plus - minus) / (2.0 * epsilon);
      const double a = analytic[p].values()[i];
      const double denom = std::max({std::abs(a), std::abs(numeric), kGradCheckFloor});
      const double rel = std::abs(a - numeric) / denom;
      if (rel > err.max_relative_error) {
        err.max_relative_error = rel;
        err.worst_index = i;
      }
    }
    if (report.worst_parameter.empty() || err.max_relative_error > report.max_relative_error) {
      report.max_relative_error = err.max_relative_error;
      report.worst_parameter = param.name;
    }
    report.per_parameter_errors.push_back(err);
  }
  report.passed = report.max_relative_error < tolerance;
  return report;
}

}  // namespace msdn
