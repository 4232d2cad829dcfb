#pragma once

#include <span>

#include "threshcal/types.hpp"

namespace threshcal {

/// Converts a labeled observation into its linear-loss coefficient:
/// plain 1-2y, class-weighted 1-(alpha+1)y, sample-weighted beta-beta(alpha+1)y.
Sample reduce_to_linear(const LabeledObservation& obs, const LossSpec& spec);

/// Constant separating the weighted classification error from the linear loss:
/// error(C) = offset + sum_n z_n * C(x_n) for every mapping C into [0, 1].
Real weighted_error_offset(std::span<const LabeledObservation> observations, const LossSpec& spec);

/// Loss of the split mapping samples[0..k) to q0 and samples[k..N) to q1.
/// Scores must be strictly ascending; k may be 0 (all high) or N (all low).
ThresholdSolution evaluate_threshold(std::span<const Sample> samples, std::size_t split_index,
                                     const MappingBounds& bounds);

}  // namespace threshcal
