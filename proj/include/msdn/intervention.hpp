#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "msdn/matrix.hpp"
#include "msdn/rng.hpp"

namespace msdn {

enum class InterventionKind { random, uniform, reversed, random_plus_reversed };

std::string_view to_string(InterventionKind kind);
/// Throws ArgumentError for unknown names.
InterventionKind parse_intervention_kind(std::string_view name);

inline constexpr std::array<InterventionKind, 4> kAllInterventionKinds = {
    InterventionKind::random, InterventionKind::uniform, InterventionKind::reversed,
    InterventionKind::random_plus_reversed};

/// Offset inside the log of the reversed construction softmax(-log(w + ε)).
inline constexpr double kReversedEpsilon = 1e-8;

/// Builds a rows×cols attention matrix, normalized along each row, used as the
/// exogenous value in do(attention = ·).
///   random   Uniform(0,1) entries, then row softmax
///   uniform  every weight 1/cols
///   reversed row softmax of -log(observed + ε), which inverts the ranking
///   random_plus_reversed  random on even `batch_index`, reversed on odd
/// `observed` is required for reversed (and for random_plus_reversed on odd
/// batches). The result is a plain value: no gradient ever flows into it.
Matrix make_intervention_attention(InterventionKind kind, std::size_t rows, std::size_t cols,
                                   const Matrix* observed, RngStream& rng, std::uint64_t batch_index = 0);

}  // namespace msdn
