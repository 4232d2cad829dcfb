#pragma once

#include <cstdint>
#include <vector>

#include "threshcal/types.hpp"

namespace threshcal {

/// Batch input: strictly ascending scores (equal scores pre-aggregated),
/// nonempty, plus the mapping target pair.
struct SortedInstance {
  std::vector<Sample> samples;
  MappingBounds bounds;

  SortedInstance(std::vector<Sample> s, MappingBounds b);

  /// Sorts by score and sums the coefficients of equal scores.
  static SortedInstance from_unsorted(std::vector<Sample> s, MappingBounds b);
};

/// Tries every split index with sums recomputed from scratch; O(N^2).
/// Ties break toward the smallest split index.
ThresholdSolution solve_brute_force(const SortedInstance& inst);

/// One prefix pass, one suffix pass, one argmin scan; O(N).
/// Same tie-break as the brute-force solver.
ThresholdSolution solve_iterative(const SortedInstance& inst);

inline constexpr std::uint64_t kEnumerationGuard = 10'000'000;

/// Number of monotone nondecreasing assignments of n samples to grid_levels
/// values, i.e. C(n + g - 1, g - 1), saturated above kEnumerationGuard.
std::uint64_t monotone_assignment_count(std::size_t n, std::size_t grid_levels);

/// Minimum loss over every monotone nondecreasing assignment of the samples
/// to grid_levels equally spaced values in [q0, q1]. The best assignment's
/// mapped values are written to *witness when given.
Real enumerate_monotone_min(const SortedInstance& inst, std::size_t grid_levels,
                            std::vector<Real>* witness = nullptr);

struct OptimalityReport {
  Real threshold_loss = 0;
  Real best_grid_loss = 0;
  std::vector<Real> witness;
  bool threshold_is_optimal = false;  // threshold_loss <= best_grid_loss, exact
};

/// Exhaustively checks that no monotone grid mapping beats the threshold
/// solution. Guarded: the enumeration size must stay within kEnumerationGuard.
OptimalityReport verify_threshold_optimality(const SortedInstance& inst, std::size_t grid_levels);

}  // namespace threshcal
