#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "threshcal/solvers.hpp"
#include "threshcal/types.hpp"

namespace threshcal {

/// Mergeable summary of one contiguous score span: its optimal split bracket
/// (x0, x1), the side sums (l0, l1), and span bookkeeping.
struct AuxSummary {
  Real x0 = kLow;   // largest score on the q0 side, kLow when that side is empty
  Real x1 = kHigh;  // smallest score on the q1 side, kHigh when that side is empty
  Real l0 = 0;
  Real l1 = 0;
  Real x_min = 0;
  Real x_max = 0;
  std::size_t count = 0;

  bool operator==(const AuxSummary&) const = default;
};

/// Summary of a single sample. z >= 0 puts it on the q0 side.
AuxSummary singleton(const Sample& s);

/// O(1) combination of two adjacent span summaries (left.x_max < right.x_min).
/// Branches on the sign of s = left.l1 + right.l0: s > tie_tol keeps the right
/// split, anything else (including ties) keeps the left split.
AuxSummary merge_aux(const AuxSummary& left, const AuxSummary& right, Real tie_tol = 0.0);

struct AuditReport {
  std::size_t depth = 0;                 // internal levels above the leaves
  std::vector<std::size_t> level_sizes;  // leaves first
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
};

/// Leveled tree of span summaries over score-ordered leaves. Each internal
/// node combines two adjacent children or promotes a single child one level;
/// no two adjacent nodes at any level are promotions, which keeps the depth
/// logarithmic. Inserts of unordered samples touch at most two leaf-to-root
/// paths.
///
/// Single writer: insert/update_leaf mutate exclusive state. Concurrent reads
/// are safe only on a copy of the root summary taken between mutations.
class MergeTree {
 public:
  explicit MergeTree(Real tie_tol = 0.0);

  MergeTree(MergeTree&&) noexcept = default;
  MergeTree& operator=(MergeTree&&) noexcept = default;
  MergeTree(const MergeTree&) = delete;
  MergeTree& operator=(const MergeTree&) = delete;

  /// Inserts a sample with a score not yet present (aggregate duplicates
  /// before calling). Returns the number of summary recomputations.
  std::size_t insert(const Sample& s);

  /// Reassigns the coefficient of an existing leaf and refreshes its path.
  /// Returns the number of summary recomputations.
  std::size_t update_leaf(Real x, Real z);

  bool contains(Real x) const { return leaf_index_.contains(x); }
  bool empty() const { return leaf_index_.empty(); }
  std::size_t size() const { return leaf_index_.size(); }
  std::size_t depth() const { return levels_.empty() ? 0 : levels_.size() - 1; }
  std::uint64_t update_counter() const { return update_counter_; }
  Real tie_tol() const { return tie_tol_; }

  const AuxSummary& root() const;
  ThresholdSolution root_solution(const MappingBounds& bounds) const;

  /// Verifies every structural invariant by full recomputation.
  AuditReport audit() const;

  /// Per-level summaries in score order, leaves first.
  std::vector<std::vector<AuxSummary>> level_summaries() const;

  /// Visits the leaves in ascending score order.
  void for_each_leaf(const std::function<void(Real x, Real z)>& fn) const;

 private:
  struct Node {
    AuxSummary sum;
    Node* parent = nullptr;
    Node* child_left = nullptr;
    Node* child_right = nullptr;
    Node* prev = nullptr;
    Node* next = nullptr;
    std::uint32_t level = 0;
    Real leaf_z = 0;
    std::uint64_t epoch = 0;  // pending-recompute stamp

    bool is_leaf() const { return child_left == nullptr; }
    bool is_promotion() const { return child_left != nullptr && child_right == nullptr; }
  };
  struct Level {
    Node* head = nullptr;
    Node* tail = nullptr;
    std::size_t size = 0;
  };

  friend MergeTree batch_build(const SortedInstance& inst, Real tie_tol);

  Node* new_node(std::uint32_t level);
  void link_after(Node* pos, Node* n);   // pos == nullptr prepends to n's level
  void link_before(Node* pos, Node* n);  // pos == nullptr appends to n's level
  void recompute(Node* n);
  void mark(Node* n);  // queue n for the post-surgery recompute sweep
  void sweep();        // recompute marked nodes bottom-up, propagating changes
  void place(Node* u);

  Real tie_tol_ = 0;
  std::deque<Node> arena_;
  std::vector<Level> levels_;
  std::map<Real, Node*> leaf_index_;
  std::uint64_t update_counter_ = 0;
  std::size_t updates_this_op_ = 0;
  std::uint64_t epoch_ = 0;
  std::vector<Node*> pending_;  // min-heap by level
};

/// Builds the tree bottom-up, pairing adjacent nodes left to right at every
/// level (odd node out promoted); O(N) total work.
MergeTree batch_build(const SortedInstance& inst, Real tie_tol = 0.0);

}  // namespace threshcal
