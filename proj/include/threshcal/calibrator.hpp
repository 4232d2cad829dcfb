#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "threshcal/merge_tree.hpp"
#include "threshcal/reduction.hpp"
#include "threshcal/types.hpp"

namespace threshcal {

struct Metrics {
  Real loss = 0;                       // at the calibrator's bounds
  std::optional<Real> weighted_error;  // labeled modes only
  std::optional<Real> accuracy;        // labeled modes only
  std::size_t n = 0;                   // observations ingested
};

class SnapshotError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Streaming facade: reduces observations to linear-loss samples, aggregates
/// repeated scores, keeps the merge tree current, and answers predictions.
///
/// Single writer, like the tree underneath. snapshot() may run concurrently
/// with reads but not with observe().
class Calibrator {
 public:
  Calibrator(LossSpec spec, MappingBounds bounds, Real tie_tol = 0.0);

  /// Labeled ingestion (any mode except raw). Returns the refreshed optimum.
  ThresholdSolution observe(const LabeledObservation& obs);

  /// Raw ingestion (raw mode only).
  ThresholdSolution observe(const Sample& s);

  ThresholdSolution solution() const;  // throws when empty
  Real predict(Real x) const;          // q0 below/inside the bracket, q1 from x1 up
  Metrics metrics() const;

  /// Versioned, checksummed byte image of the state. See docs/snapshot-format.md.
  std::vector<std::uint8_t> snapshot() const;
  static Calibrator restore(std::span<const std::uint8_t> bytes);

  bool empty() const { return n_obs_ == 0; }
  std::size_t observations() const { return n_obs_; }
  std::size_t distinct_scores() const { return tree_.size(); }
  std::size_t last_update_count() const { return last_updates_; }
  std::uint64_t update_counter() const { return tree_.update_counter(); }
  const MergeTree& tree() const { return tree_; }
  const LossSpec& spec() const { return spec_; }
  const MappingBounds& bounds() const { return bounds_; }

 private:
  struct LeafStat {
    Real z = 0;
    Real offset = 0;  // sum of beta*alpha*y at this score
    std::uint64_t n0 = 0;
    std::uint64_t n1 = 0;
  };

  ThresholdSolution apply(Real x, Real z, Real offset_contrib, int label);

  LossSpec spec_;
  MappingBounds bounds_;
  MergeTree tree_;
  std::map<Real, LeafStat> leaves_;
  Real offset_total_ = 0;
  std::size_t n_obs_ = 0;
  std::size_t last_updates_ = 0;
};

}  // namespace threshcal
