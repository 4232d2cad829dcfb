#include "threshcal/solvers.hpp"

#include <algorithm>
#include <stdexcept>

namespace threshcal {

SortedInstance::SortedInstance(std::vector<Sample> s, MappingBounds b)
    : samples(std::move(s)), bounds(b) {
  if (samples.empty()) throw std::invalid_argument("SortedInstance: empty instance");
  for (const auto& sample : samples) {
    if (!std::isfinite(sample.x) || !std::isfinite(sample.z))
      throw std::invalid_argument("SortedInstance: samples must be finite");
  }
  for (std::size_t i = 1; i < samples.size(); ++i)
    if (!(samples[i - 1].x < samples[i].x))
      throw std::invalid_argument("SortedInstance: scores must be strictly ascending");
}

SortedInstance SortedInstance::from_unsorted(std::vector<Sample> s, MappingBounds b) {
  std::sort(s.begin(), s.end(), [](const Sample& a, const Sample& c) { return a.x < c.x; });
  std::vector<Sample> merged;
  merged.reserve(s.size());
  for (const auto& sample : s) {
    if (!merged.empty() && merged.back().x == sample.x)
      merged.back().z += sample.z;
    else
      merged.push_back(sample);
  }
  return SortedInstance(std::move(merged), b);
}

namespace {

ThresholdSolution make_solution(const SortedInstance& inst, std::size_t k, Real l0, Real l1) {
  ThresholdSolution sol;
  sol.n = inst.samples.size();
  sol.l0 = l0;
  sol.l1 = l1;
  sol.x0 = k == 0 ? kLow : inst.samples[k - 1].x;
  sol.x1 = k == inst.samples.size() ? kHigh : inst.samples[k].x;
  sol.loss = inst.bounds.q0 * l0 + inst.bounds.q1 * l1;
  return sol;
}

}  // namespace

ThresholdSolution solve_brute_force(const SortedInstance& inst) {
  const auto& s = inst.samples;
  const std::size_t n = s.size();
  std::size_t best_k = 0;
  Real best_loss = 0, best_l0 = 0, best_l1 = 0;
  for (std::size_t k = 0; k <= n; ++k) {
    Real l0 = 0, l1 = 0;
    for (std::size_t i = 0; i < k; ++i) l0 += s[i].z;
    for (std::size_t i = k; i < n; ++i) l1 += s[i].z;
    const Real loss = inst.bounds.q0 * l0 + inst.bounds.q1 * l1;
    if (k == 0 || loss < best_loss) {
      best_k = k;
      best_loss = loss;
      best_l0 = l0;
      best_l1 = l1;
    }
  }
  return make_solution(inst, best_k, best_l0, best_l1);
}

ThresholdSolution solve_iterative(const SortedInstance& inst) {
  const auto& s = inst.samples;
  const std::size_t n = s.size();
  std::vector<Real> suffix(n + 1, 0.0);
  for (std::size_t i = n; i-- > 0;) suffix[i] = s[i].z + suffix[i + 1];

  std::size_t best_k = 0;
  Real best_loss = inst.bounds.q1 * suffix[0];
  Real best_l0 = 0;
  Real prefix = 0;
  for (std::size_t k = 1; k <= n; ++k) {
    prefix += s[k - 1].z;
    const Real loss = inst.bounds.q0 * prefix + inst.bounds.q1 * suffix[k];
    if (loss < best_loss) {
      best_k = k;
      best_loss = loss;
      best_l0 = prefix;
    }
  }
  return make_solution(inst, best_k, best_l0, suffix[best_k]);
}

std::uint64_t monotone_assignment_count(std::size_t n, std::size_t grid_levels) {
  if (grid_levels < 2) throw std::invalid_argument("monotone_assignment_count: need >= 2 levels");
  // C(n + g - 1, g - 1) built as a product of integral prefixes, saturated
  // once it can no longer matter against the guard.
  std::uint64_t count = 1;
  for (std::size_t i = 1; i < grid_levels; ++i) {
    const std::uint64_t num = static_cast<std::uint64_t>(n) + i;
    if (count > kEnumerationGuard || num > UINT64_MAX / count) return kEnumerationGuard + 1;
    count = count * num / i;
  }
  return count;
}

Real enumerate_monotone_min(const SortedInstance& inst, std::size_t grid_levels,
                            std::vector<Real>* witness) {
  if (grid_levels < 2) throw std::invalid_argument("enumerate_monotone_min: need >= 2 levels");
  const std::size_t n = inst.samples.size();
  if (monotone_assignment_count(n, grid_levels) > kEnumerationGuard)
    throw std::invalid_argument("enumerate_monotone_min: enumeration guard exceeded");

  std::vector<Real> grid(grid_levels);
  for (std::size_t j = 0; j < grid_levels; ++j)
    grid[j] = inst.bounds.q0 +
              static_cast<Real>(j) * (inst.bounds.q1 - inst.bounds.q0) /
                  static_cast<Real>(grid_levels - 1);

  std::vector<std::size_t> assignment(n, 0), best_assignment(n, 0);
  bool have_best = false;
  Real best = 0;

  // Depth-first walk over nondecreasing level sequences with running sums.
  std::vector<Real> partial(n + 1, 0.0);
  std::size_t pos = 0;
  std::size_t level = 0;
  for (;;) {
    if (level >= grid_levels) {  // backtrack
      if (pos == 0) break;
      --pos;
      level = assignment[pos] + 1;
      continue;
    }
    assignment[pos] = level;
    partial[pos + 1] = partial[pos] + inst.samples[pos].z * grid[level];
    if (pos + 1 == n) {
      if (!have_best || partial[n] < best) {
        have_best = true;
        best = partial[n];
        best_assignment = assignment;
      }
      ++level;
    } else {
      ++pos;
      // levels must stay nondecreasing
      // (level stays where it is for the next position)
    }
  }

  if (witness) {
    witness->resize(n);
    for (std::size_t i = 0; i < n; ++i) (*witness)[i] = grid[best_assignment[i]];
  }
  return best;
}

OptimalityReport verify_threshold_optimality(const SortedInstance& inst, std::size_t grid_levels) {
  OptimalityReport report;
  report.threshold_loss = solve_iterative(inst).loss;
  report.best_grid_loss = enumerate_monotone_min(inst, grid_levels, &report.witness);
  report.threshold_is_optimal = report.threshold_loss <= report.best_grid_loss;
  return report;
}

}  // namespace threshcal
