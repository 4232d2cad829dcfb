#include "threshcal/merge_tree.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace threshcal {

AuxSummary singleton(const Sample& s) {
  AuxSummary a;
  a.x_min = a.x_max = s.x;
  a.count = 1;
  if (s.z < 0) {
    a.x0 = kLow;
    a.x1 = s.x;
    a.l1 = s.z;
  } else {  // z == 0 stays on the q0 side
    a.x0 = s.x;
    a.x1 = kHigh;
    a.l0 = s.z;
  }
  return a;
}

AuxSummary merge_aux(const AuxSummary& left, const AuxSummary& right, Real tie_tol) {
  if (left.count == 0 || right.count == 0)
    throw std::invalid_argument("merge_aux: empty span");
  if (!(left.x_max < right.x_min))
    throw std::invalid_argument("merge_aux: spans must be disjoint and adjacent");

  AuxSummary out;
  out.x_min = left.x_min;
  out.x_max = right.x_max;
  out.count = left.count + right.count;
  const Real s = left.l1 + right.l0;
  if (s > tie_tol) {
    // Right split wins: the whole left span joins the q0 side.
    out.x1 = right.x1;
    out.x0 = is_concrete(right.x0) ? right.x0 : left.x_max;
    out.l0 = left.l0 + left.l1 + right.l0;
    out.l1 = right.l1;
  } else {
    // Left split wins (ties stay left): the whole right span joins the q1 side.
    out.x0 = left.x0;
    out.x1 = is_concrete(left.x1) ? left.x1 : right.x_min;
    out.l0 = left.l0;
    out.l1 = left.l1 + right.l0 + right.l1;
  }
  return out;
}

MergeTree::MergeTree(Real tie_tol) : tie_tol_(tie_tol) {
  if (!std::isfinite(tie_tol) || tie_tol < 0)
    throw std::invalid_argument("MergeTree: tie tolerance must be nonnegative");
}

MergeTree::Node* MergeTree::new_node(std::uint32_t level) {
  arena_.emplace_back();
  Node* n = &arena_.back();
  n->level = level;
  return n;
}

void MergeTree::link_after(Node* pos, Node* n) {
  Level& lv = levels_[n->level];
  if (pos == nullptr) {  // prepend
    n->prev = nullptr;
    n->next = lv.head;
    if (lv.head) lv.head->prev = n;
    lv.head = n;
    if (!lv.tail) lv.tail = n;
  } else {
    n->prev = pos;
    n->next = pos->next;
    if (pos->next) pos->next->prev = n;
    pos->next = n;
    if (lv.tail == pos) lv.tail = n;
  }
  ++lv.size;
}

void MergeTree::link_before(Node* pos, Node* n) {
  Level& lv = levels_[n->level];
  if (pos == nullptr) {  // append
    n->next = nullptr;
    n->prev = lv.tail;
    if (lv.tail) lv.tail->next = n;
    lv.tail = n;
    if (!lv.head) lv.head = n;
    ++lv.size;
  } else {
    link_after(pos->prev, n);
  }
}

void MergeTree::recompute(Node* n) {
  ++updates_this_op_;
  assert(!n->is_leaf());
  if (n->is_promotion())
    n->sum = n->child_left->sum;
  else
    n->sum = merge_aux(n->child_left->sum, n->child_right->sum, tie_tol_);
}

void MergeTree::mark(Node* n) {
  if (!n || n->epoch == epoch_) return;
  n->epoch = epoch_;
  pending_.push_back(n);
  std::push_heap(pending_.begin(), pending_.end(),
                 [](const Node* a, const Node* b) { return a->level > b->level; });
}

// Recomputes the marked nodes strictly bottom-up, so every node sees final
// child summaries; a node whose summary comes out unchanged stops the
// propagation into its ancestors.
void MergeTree::sweep() {
  const auto by_level = [](const Node* a, const Node* b) { return a->level > b->level; };
  while (!pending_.empty()) {
    std::pop_heap(pending_.begin(), pending_.end(), by_level);
    Node* n = pending_.back();
    pending_.pop_back();
    bool changed = true;
    if (!n->is_leaf()) {
      const AuxSummary before = n->sum;
      recompute(n);
      changed = !(n->sum == before);
    }
    if (changed) mark(n->parent);
  }
}

// Placement rules for a parentless node u at some level. Surgery is purely
// structural; summaries refresh afterwards in one sweep.
//  - landing inside a combined pair adopts u on the left and pushes the
//    right child up as the new parentless node;
//  - a neighboring promotion absorbs u instead of leaving two adjacent
//    promotions;
//  - meeting the old root combines one level up;
//  - otherwise u promotes one level and placement continues there.
void MergeTree::place(Node* u) {
  for (;;) {
    Node* l = u->prev;
    Node* r = u->next;

    if (!l && !r) {
      assert(levels_.size() == u->level + 1);
      return;  // u is the root
    }

    if (l && r && l->parent && l->parent == r->parent) {
      Node* p = l->parent;
      p->child_right = u;
      u->parent = p;
      r->parent = nullptr;
      mark(p);
      u = r;
      continue;
    }

    if (l && l->parent && l->parent->is_promotion()) {
      Node* p = l->parent;
      p->child_right = u;
      u->parent = p;
      mark(p);
      return;
    }

    if (r && r->parent && r->parent->is_promotion()) {
      Node* p = r->parent;
      p->child_left = u;
      p->child_right = r;
      u->parent = p;
      mark(p);
      return;
    }

    if ((l && !l->parent) || (r && !r->parent)) {
      // u reached the top level next to the old root: combine one level up.
      Node* a = (l && !l->parent) ? l : u;
      Node* b = (l && !l->parent) ? u : r;
      assert(levels_.size() == u->level + 1);
      levels_.emplace_back();
      Node* c = new_node(u->level + 1);
      c->child_left = a;
      c->child_right = b;
      a->parent = c;
      b->parent = c;
      mark(c);
      link_before(nullptr, c);
      u = c;
      continue;
    }

    // Plain promotion one level up.
    Node* p = new_node(u->level + 1);
    p->child_left = u;
    u->parent = p;
    mark(p);
    if (l)
      link_after(l->parent, p);
    else
      link_before(r->parent, p);
    u = p;
  }
}

std::size_t MergeTree::insert(const Sample& s) {
  if (!std::isfinite(s.x) || !std::isfinite(s.z))
    throw std::invalid_argument("MergeTree::insert: sample must be finite");
  auto hint = leaf_index_.lower_bound(s.x);
  if (hint != leaf_index_.end() && hint->first == s.x)
    throw std::invalid_argument("MergeTree::insert: duplicate score");

  updates_this_op_ = 0;
  ++epoch_;
  if (levels_.empty()) levels_.emplace_back();

  Node* u = new_node(0);
  u->sum = singleton(s);
  u->leaf_z = s.z;
  ++updates_this_op_;
  const auto it = leaf_index_.emplace_hint(hint, s.x, u);

  Node* left = it == leaf_index_.begin() ? nullptr : std::prev(it)->second;
  link_after(left, u);

  place(u);
  sweep();

  update_counter_ += updates_this_op_;
  return updates_this_op_;
}

std::size_t MergeTree::update_leaf(Real x, Real z) {
  if (!std::isfinite(z)) throw std::invalid_argument("MergeTree::update_leaf: z must be finite");
  auto it = leaf_index_.find(x);
  if (it == leaf_index_.end())
    throw std::invalid_argument("MergeTree::update_leaf: unknown score");

  updates_this_op_ = 0;
  ++epoch_;
  Node* leaf = it->second;
  leaf->leaf_z = z;
  leaf->sum = singleton(Sample(x, z));
  ++updates_this_op_;
  mark(leaf->parent);
  sweep();

  update_counter_ += updates_this_op_;
  return updates_this_op_;
}

const AuxSummary& MergeTree::root() const {
  if (leaf_index_.empty()) throw std::logic_error("MergeTree: empty tree has no root");
  assert(levels_.back().size == 1);
  return levels_.back().head->sum;
}

ThresholdSolution MergeTree::root_solution(const MappingBounds& bounds) const {
  const AuxSummary& r = root();
  ThresholdSolution sol;
  sol.x0 = r.x0;
  sol.x1 = r.x1;
  sol.l0 = r.l0;
  sol.l1 = r.l1;
  sol.loss = bounds.q0 * r.l0 + bounds.q1 * r.l1;
  sol.n = r.count;
  return sol;
}

std::vector<std::vector<AuxSummary>> MergeTree::level_summaries() const {
  std::vector<std::vector<AuxSummary>> out;
  out.reserve(levels_.size());
  for (const Level& lv : levels_) {
    std::vector<AuxSummary> row;
    row.reserve(lv.size);
    for (Node* n = lv.head; n; n = n->next) row.push_back(n->sum);
    out.push_back(std::move(row));
  }
  return out;
}

void MergeTree::for_each_leaf(const std::function<void(Real, Real)>& fn) const {
  if (levels_.empty()) return;
  for (Node* n = levels_[0].head; n; n = n->next) fn(n->sum.x_min, n->leaf_z);
}

AuditReport MergeTree::audit() const {
  AuditReport report;
  report.depth = depth();
  auto fail = [&report](std::string msg) { report.violations.push_back(std::move(msg)); };

  for (const Level& lv : levels_) report.level_sizes.push_back(lv.size);
  if (levels_.empty()) return report;

  for (std::size_t k = 0; k < levels_.size(); ++k) {
    const Level& lv = levels_[k];
    std::size_t walked = 0;
    std::size_t children_covered = 0;
    const Node* prev = nullptr;
    for (const Node* n = lv.head; n; n = n->next) {
      ++walked;
      const std::string where =
          "level " + std::to_string(k) + " node " + std::to_string(walked - 1);
      if (n->level != k) fail(where + ": wrong level tag");
      if (n->prev != prev) fail(where + ": broken back link");

      if (prev && !(prev->sum.x_max < n->sum.x_min))
        fail(where + ": spans out of order");
      if (prev && prev->is_promotion() && n->is_promotion())
        fail(where + ": adjacent promotions");

      if (k == 0) {
        if (!n->is_leaf()) fail(where + ": non-leaf at leaf level");
        else if (n->sum != singleton(Sample(n->sum.x_min, n->leaf_z)))
          fail(where + ": leaf summary mismatch");
      } else {
        if (n->is_leaf()) fail(where + ": leaf above level 0");
        else {
          children_covered += n->child_right ? 2 : 1;
          if (n->child_left->parent != n ||
              (n->child_right && n->child_right->parent != n))
            fail(where + ": child parent link mismatch");
          if (n->child_left->level != k - 1 ||
              (n->child_right && n->child_right->level != k - 1))
            fail(where + ": child level mismatch");
          if (n->child_right && n->child_left->next != n->child_right)
            fail(where + ": children not adjacent");
          try {
            const AuxSummary expect =
                n->is_promotion() ? n->child_left->sum
                                  : merge_aux(n->child_left->sum, n->child_right->sum, tie_tol_);
            if (!(n->sum == expect)) fail(where + ": summary does not recompute");
          } catch (const std::exception& e) {
            fail(where + ": recompute failed: " + e.what());
          }
        }
      }

      const AuxSummary& a = n->sum;
      if (is_low(a.x0) && is_high(a.x1)) fail(where + ": both endpoints empty");
      if (is_low(a.x0) && a.l0 != 0) fail(where + ": empty q0 side with nonzero l0");
      if (is_high(a.x1) && a.l1 != 0) fail(where + ": empty q1 side with nonzero l1");
      if (is_concrete(a.x0) && is_concrete(a.x1) &&
          !(a.x_min <= a.x0 && a.x0 < a.x1 && a.x1 <= a.x_max))
        fail(where + ": bracket outside span");
      prev = n;
    }
    if (prev != lv.tail) fail("level " + std::to_string(k) + ": broken tail link");
    if (walked != lv.size) fail("level " + std::to_string(k) + ": size mismatch");
    if (k > 0) {
      if (children_covered != levels_[k - 1].size)
        fail("level " + std::to_string(k) + ": children do not cover the level below");
      // N_{k+1} <= ceil((2 N_k + 1) / 3)
      const std::size_t below = levels_[k - 1].size;
      if (3 * lv.size > 2 * below + 3)
        fail("level " + std::to_string(k) + ": level size bound violated");
    }
  }

  if (levels_.back().size != 1) fail("top level must hold exactly one node");
  else if (levels_.back().head->parent) fail("root has a parent");
  if (levels_[0].size != leaf_index_.size()) fail("leaf index out of sync");
  return report;
}

MergeTree batch_build(const SortedInstance& inst, Real tie_tol) {
  MergeTree tree(tie_tol);
  tree.updates_this_op_ = 0;
  tree.levels_.emplace_back();
  for (const Sample& s : inst.samples) {
    MergeTree::Node* n = tree.new_node(0);
    n->sum = singleton(s);
    n->leaf_z = s.z;
    ++tree.updates_this_op_;
    tree.leaf_index_.emplace(s.x, n);
    tree.link_before(nullptr, n);
  }
  while (tree.levels_.back().size > 1) {
    const std::uint32_t k = static_cast<std::uint32_t>(tree.levels_.size() - 1);
    tree.levels_.emplace_back();
    MergeTree::Node* a = tree.levels_[k].head;
    while (a) {
      MergeTree::Node* b = a->next;
      MergeTree::Node* p = tree.new_node(k + 1);
      p->child_left = a;
      a->parent = p;
      if (b) {
        p->child_right = b;
        b->parent = p;
      }
      tree.recompute(p);
      tree.link_before(nullptr, p);
      a = b ? b->next : nullptr;
    }
  }
  tree.update_counter_ += tree.updates_this_op_;
  return tree;
}

}  // namespace threshcal
