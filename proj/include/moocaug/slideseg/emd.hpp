#pragma once

#include <span>
#include <vector>

#include "moocaug/common/error.hpp"

namespace moocaug::slideseg {

enum class EmdErrc { kLengthMismatch, kNotNormalized, kNonSquareDistance, kInvalidDistance };

using EmdError = CodedError<EmdErrc>;

inline constexpr double kMassTolerance = 1e-9;

// Earth mover's distance between two normalized histograms over equally
// spaced bins (unit spacing): the L1 distance between their CDFs.
double emd_1d(std::span<const double> h1, std::span<const double> h2);

// Square ground-distance matrix, row-major by source bin.
using GroundDistance = std::vector<std::vector<double>>;

// |i - j|, the ground distance under which emd_transport equals emd_1d.
GroundDistance linear_ground_distance(std::size_t bins);

// Optimal transportation cost between two normalized histograms under an
// arbitrary nonnegative ground distance, solved exactly as a min-cost flow
// (successive shortest paths with Dijkstra potentials) on the bipartite bin
// graph.
double emd_transport(std::span<const double> h1, std::span<const double> h2,
                     const GroundDistance& distance);

}  // namespace moocaug::slideseg
