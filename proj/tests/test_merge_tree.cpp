#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "threshcal/merge_tree.hpp"

using namespace threshcal;
using testutil::paper_roots;
using testutil::paper_stream;

namespace {

bool root_matches(const AuxSummary& root, const testutil::RootExpect& e) {
  return root.x0 == e.x0 && root.x1 == e.x1 && root.l0 == e.l0 && root.l1 == e.l1;
}

bool level_contains(const std::vector<std::vector<AuxSummary>>& levels, Real x0, Real x1, Real l0,
                    Real l1) {
  for (const auto& level : levels)
    for (const AuxSummary& a : level)
      if (a.x0 == x0 && a.x1 == x1 && a.l0 == l0 && a.l1 == l1) return true;
  return false;
}

}  // namespace

TEST_CASE("singleton splits on the coefficient sign") {
  const AuxSummary pos = singleton(Sample(1, 1));
  CHECK(pos.x0 == 1.0);
  CHECK(is_high(pos.x1));
  CHECK(pos.l0 == 1.0);
  CHECK(pos.l1 == 0.0);
  CHECK(pos.count == 1);

  const AuxSummary neg = singleton(Sample(8, -2));
  CHECK(is_low(neg.x0));
  CHECK(neg.x1 == 8.0);
  CHECK(neg.l0 == 0.0);
  CHECK(neg.l1 == -2.0);

  const AuxSummary zero = singleton(Sample(5, 0));
  CHECK(zero.x0 == 5.0);
  CHECK(is_high(zero.x1));
  CHECK(zero.l0 == 0.0);
  CHECK(zero.l1 == 0.0);
}

TEST_CASE("merge_aux reproduces the drawn combinations") {
  const AuxSummary a = merge_aux(singleton(Sample(1, 1)), singleton(Sample(8, -2)));
  CHECK(a == AuxSummary{1, 8, 1, -2, 1, 8, 2});

  const AuxSummary b = merge_aux(singleton(Sample(1, 1)), AuxSummary{5, kHigh, 3, 0, 5, 5, 1});
  CHECK(b.x0 == 5.0);
  CHECK(is_high(b.x1));
  CHECK(b.l0 == 4.0);
  CHECK(b.l1 == 0.0);

  const AuxSummary c =
      merge_aux(AuxSummary{1, 4, 1, -4, 1, 4, 2}, AuxSummary{5, 8, 3, -2, 5, 8, 2});
  CHECK(c == AuxSummary{1, 4, 1, -3, 1, 8, 4});
}

TEST_CASE("merge_aux rejects overlapping spans") {
  CHECK_THROWS_AS(merge_aux(singleton(Sample(3, 1)), singleton(Sample(2, 1))),
                  std::invalid_argument);
  CHECK_THROWS_AS(merge_aux(singleton(Sample(3, 1)), singleton(Sample(3, 1))),
                  std::invalid_argument);
}

TEST_CASE("merge_aux ties yield identical side sums either way") {
  testutil::SplitMix64 rng(3);
  int ties = 0;
  for (int t = 0; t < 400; ++t) {
    const SortedInstance all =
        testutil::random_instance(rng, 16, 4, MappingBounds(0, 1));
    if (all.samples.size() < 2) continue;
    const std::size_t cut = 1 + rng.below(all.samples.size() - 1);
    std::vector<Sample> lo(all.samples.begin(), all.samples.begin() + cut);
    std::vector<Sample> hi(all.samples.begin() + cut, all.samples.end());
    const MergeTree left = batch_build(SortedInstance(lo, all.bounds));
    const MergeTree right = batch_build(SortedInstance(hi, all.bounds));
    const AuxSummary& l = left.root();
    const AuxSummary& r = right.root();
    if (l.l1 + r.l0 != 0) continue;
    ++ties;
    const Real left_l0 = l.l0, left_l1 = l.l1 + r.l0 + r.l1;
    const Real right_l0 = l.l0 + l.l1 + r.l0, right_l1 = r.l1;
    CHECK(left_l0 == right_l0);
    CHECK(left_l1 == right_l1);
    CHECK(merge_aux(l, r).l0 == left_l0);
  }
  CHECK(ties > 0);
}

// Children solved optimally + the O(1) merge = the union solved optimally.
TEST_CASE("merge_aux matches brute force on adjacent spans") {
  testutil::SplitMix64 rng(8);
  for (int t = 0; t < 300; ++t) {
    const MappingBounds b(0, 1);
    const SortedInstance all = testutil::random_instance(rng, 32, 10, b);
    if (all.samples.size() < 2) continue;
    const std::size_t cut = 1 + rng.below(all.samples.size() - 1);
    std::vector<Sample> lo(all.samples.begin(), all.samples.begin() + cut);
    std::vector<Sample> hi(all.samples.begin() + cut, all.samples.end());
    const AuxSummary l = batch_build(SortedInstance(lo, b)).root();
    const AuxSummary r = batch_build(SortedInstance(hi, b)).root();
    const AuxSummary merged = merge_aux(l, r);
    const ThresholdSolution best = solve_brute_force(all);
    CHECK(b.q0 * merged.l0 + b.q1 * merged.l1 == best.loss);
    CHECK(merged.l0 + merged.l1 == best.l0 + best.l1);
  }
}

TEST_CASE("batch_build") {
  SUBCASE("worked example root") {
    const SortedInstance inst = SortedInstance::from_unsorted(paper_stream(), MappingBounds(0, 1));
    const MergeTree tree = batch_build(inst);
    CHECK(tree.root() == AuxSummary{1, 2, 1, -5, 1, 8, 8});
    CHECK(tree.audit().ok());
  }
  SUBCASE("single sample promotes nothing") {
    const MergeTree tree = batch_build(SortedInstance({{3, -1}}, MappingBounds(0, 1)));
    CHECK(tree.root() == singleton(Sample(3, -1)));
    CHECK(tree.depth() == 0);
  }
  SUBCASE("500 random instances match brute force exactly") {
    testutil::SplitMix64 rng(12);
    for (int t = 0; t < 500; ++t) {
      const MappingBounds b(0, 1);
      const SortedInstance inst = testutil::random_instance(rng, 256, 10, b);
      const MergeTree tree = batch_build(inst);
      CHECK(tree.root_solution(b).loss == solve_brute_force(inst).loss);
    }
  }
}

TEST_CASE("sequential inserts replay the worked example") {
  MergeTree tree;
  const auto& stream = paper_stream();
  const auto& roots = paper_roots();
  for (std::size_t i = 0; i < stream.size(); ++i) {
    tree.insert(stream[i]);
    CAPTURE(i);
    CHECK(root_matches(tree.root(), roots[i]));
    CHECK(tree.audit().ok());

    if (i + 1 == 3) {
      // after n=3 the drawn internal node (5,--)/(4,0) exists
      CHECK(level_contains(tree.level_summaries(), 5, kHigh, 4, 0));
    }
    if (i + 1 == 4) {
      // after n=4 the drawn internal nodes (1,4)/(1,-4) and (5,8)/(3,-2) exist
      const auto levels = tree.level_summaries();
      CHECK(level_contains(levels, 1, 4, 1, -4));
      CHECK(level_contains(levels, 5, 8, 3, -2));
    }
  }
  CHECK(tree.size() == 8);
  CHECK(tree.depth() == 3);  // leaf level plus three internal levels
  CHECK_THROWS_AS(tree.insert(Sample(5, 1)), std::invalid_argument);
}

TEST_CASE("insert into an empty tree is the singleton") {
  MergeTree tree;
  CHECK(tree.empty());
  CHECK_THROWS_AS(tree.root(), std::logic_error);
  const std::size_t updates = tree.insert(Sample(2, -7));
  CHECK(updates == 1);
  CHECK(tree.root() == singleton(Sample(2, -7)));
}

TEST_CASE("every prefix of random permutations matches the batch answer") {
  testutil::SplitMix64 rng(2024);
  for (int t = 0; t < 60; ++t) {
    const std::size_t n = 1 + rng.below(200);
    const std::vector<Sample> arrivals = testutil::random_arrivals(rng, n, 10);
    const MappingBounds b(0, 1);
    MergeTree tree;
    std::vector<Sample> sorted;
    for (const Sample& s : arrivals) {
      tree.insert(s);
      sorted.insert(std::upper_bound(sorted.begin(), sorted.end(), s,
                                     [](const Sample& a, const Sample& c) { return a.x < c.x; }),
                    s);
      const ThresholdSolution expect = solve_iterative(SortedInstance(sorted, b));
      CHECK(tree.root_solution(b).loss == expect.loss);
      Real total = 0;
      for (const Sample& q : sorted) total += q.z;
      CHECK(tree.root().l0 + tree.root().l1 == total);
      if (n <= 48) CHECK(tree.audit().ok());  // exhaustive audit while it is cheap
    }
    const AuditReport audit = tree.audit();
    CHECK(audit.ok());
  }
}

TEST_CASE("update_leaf rewrites a coefficient in place") {
  MergeTree tree;
  for (const Sample& s : paper_stream()) tree.insert(s);
  CHECK_THROWS_AS(tree.update_leaf(99, 1), std::invalid_argument);

  tree.update_leaf(2, 8);  // flip the strongest negative to positive
  std::vector<Sample> edited;
  tree.for_each_leaf([&](Real x, Real z) { edited.emplace_back(x, z); });
  const MappingBounds b(0, 1);
  const ThresholdSolution expect = solve_brute_force(SortedInstance(edited, b));
  CHECK(tree.root_solution(b).loss == expect.loss);
  CHECK(tree.audit().ok());

  testutil::SplitMix64 rng(31);
  for (int t = 0; t < 200; ++t) {
    const Real x = static_cast<Real>(rng.range(1, 8));
    const Real z = static_cast<Real>(rng.range(-10, 10));
    tree.update_leaf(x, z);
    std::vector<Sample> leaves;
    tree.for_each_leaf([&](Real lx, Real lz) { leaves.emplace_back(lx, lz); });
    CHECK(tree.root_solution(b).loss == solve_brute_force(SortedInstance(leaves, b)).loss);
  }
  CHECK(tree.audit().ok());
}

TEST_CASE("root_solution evaluates the root at arbitrary bounds") {
  SUBCASE("empty upper side costs nothing at (0,1)") {
    const MergeTree tree = batch_build(SortedInstance({{1, 2}, {2, 1}, {3, 4}}, MappingBounds(0, 1)));
    const ThresholdSolution sol = tree.root_solution(MappingBounds(0, 1));
    CHECK(sol.loss == 0.0);
    CHECK(is_high(sol.x1));
    CHECK(sol.l1 == 0.0);
  }
  SUBCASE("random instances match brute force") {
    testutil::SplitMix64 rng(55);
    for (int t = 0; t < 100; ++t) {
      const MappingBounds b(-1, 2);
      const SortedInstance inst = testutil::random_instance(rng, 64, 10, b);
      const MergeTree tree = batch_build(inst);
      CHECK(tree.root_solution(b).loss == solve_brute_force(inst).loss);
    }
  }
}

TEST_CASE("audit reports structure") {
  SUBCASE("single leaf") {
    MergeTree tree;
    tree.insert(Sample(1, 1));
    const AuditReport r = tree.audit();
    CHECK(r.ok());
    CHECK(r.depth == 0);
    CHECK(r.level_sizes == std::vector<std::size_t>{1});
  }
  SUBCASE("4096 random inserts stay within the depth bound") {
    MergeTree tree;
    testutil::SplitMix64 rng(7);
    while (tree.size() < 4096) {
      Real x = rng.real01();
      while (tree.contains(x)) x = rng.real01();
      tree.insert(Sample(x, static_cast<Real>(rng.range(-10, 10))));
    }
    const AuditReport r = tree.audit();
    CHECK(r.ok());
    // ceil(log_{3/2} 4096) + 2
    CHECK(r.depth <= 23);
    for (std::size_t k = 1; k < r.level_sizes.size(); ++k)
      CHECK(3 * r.level_sizes[k] <= 2 * r.level_sizes[k - 1] + 3);
  }
}
