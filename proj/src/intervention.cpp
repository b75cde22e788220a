#include "msdn/intervention.hpp"

#include <cmath>

#include "msdn/errors.hpp"

namespace msdn {

std::string_view to_string(InterventionKind kind) {
  switch (kind) {
    case InterventionKind::random: return "random";
    case InterventionKind::uniform: return "uniform";
    case InterventionKind::reversed: return "reversed";
    case InterventionKind::random_plus_reversed: return "random_plus_reversed";
  }
  return "unknown";
}

InterventionKind parse_intervention_kind(std::string_view name) {
  for (auto kind : kAllInterventionKinds) {
    if (to_string(kind) == name) return kind;
  }
  throw ArgumentError("unknown intervention kind '" + std::string(name) +
                      "' (expected random, uniform, reversed or random_plus_reversed)");
}

Matrix make_intervention_attention(InterventionKind kind, std::size_t rows, std::size_t cols,
                                   const Matrix* observed, RngStream& rng, std::uint64_t batch_index) {
  if (rows == 0 || cols == 0) throw ArgumentError("intervention attention needs a non-empty shape");
  if (kind == InterventionKind::random_plus_reversed) {
    kind = batch_index % 2 == 0 ? InterventionKind::random : InterventionKind::reversed;
  }
  switch (kind) {
    case InterventionKind::random:
      return softmax_rows(sample_uniform(rng, rows, cols, 0.0, 1.0));
    case InterventionKind::uniform:
      return Matrix(rows, cols, 1.0 / static_cast<double>(cols));
    case InterventionKind::reversed: {
      if (observed == nullptr) throw ArgumentError("reversed intervention requires the observed attention");
      if (observed->rows() != rows || observed->cols() != cols) {
        throw ShapeError("reversed intervention: observed attention is " + observed->shape_string());
      }
      Matrix neg_log(rows, cols);
      for (std::size_t i = 0; i < observed->size(); ++i) {
        neg_log.values()[i] = -std::log(observed->values()[i] + kReversedEpsilon);
      }
      return softmax_rows(neg_log);
    }
    case InterventionKind::random_plus_reversed:
      break;
  }
  throw ArgumentError("unhandled intervention kind");
}

}  // namespace msdn
