#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "threshcal/rng.hpp"
#include "threshcal/solvers.hpp"
#include "threshcal/types.hpp"

namespace testutil {

using threshcal::kHigh;
using threshcal::kLow;
using threshcal::MappingBounds;
using threshcal::Real;
using threshcal::Sample;
using threshcal::SortedInstance;
using threshcal::SplitMix64;

// The worked 8-sample stream in arrival order.
inline const std::vector<Sample>& paper_stream() {
  static const std::vector<Sample> stream = {
      {1, 1}, {8, -2}, {5, 3}, {4, -4}, {6, 5}, {3, -6}, {7, 7}, {2, -8},
  };
  return stream;
}

struct RootExpect {
  Real x0, x1, l0, l1;
};

// Expected root summary after each arrival of paper_stream().
inline const std::vector<RootExpect>& paper_roots() {
  static const std::vector<RootExpect> roots = {
      {1, kHigh, 1, 0}, {1, 8, 1, -2}, {5, 8, 4, -2}, {1, 4, 1, -3},
      {6, 8, 5, -2},    {1, 3, 1, -4}, {7, 8, 6, -2}, {1, 2, 1, -5},
  };
  return roots;
}

// Distinct integer scores 1..n in shuffled arrival order, integer z in
// [-zmax, zmax].
inline std::vector<Sample> random_arrivals(SplitMix64& rng, std::size_t n, int zmax) {
  std::vector<Sample> samples;
  samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    samples.emplace_back(static_cast<Real>(i + 1), static_cast<Real>(rng.range(-zmax, zmax)));
  for (std::size_t i = n; i > 1; --i) std::swap(samples[i - 1], samples[rng.below(i)]);
  return samples;
}

inline SortedInstance random_instance(SplitMix64& rng, std::size_t max_n, int zmax,
                                      MappingBounds bounds) {
  const std::size_t n = 1 + rng.below(max_n);
  return SortedInstance::from_unsorted(random_arrivals(rng, n, zmax), bounds);
}

}  // namespace testutil
