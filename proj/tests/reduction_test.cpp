#include <catch2/catch_amalgamated.hpp>

#include <unordered_set>
#include <vector>

#include "lmq/reduction.hpp"
#include "lmq/rng.hpp"
#include "support/naive.hpp"

using namespace lmq;

namespace {
Example ex(std::initializer_list<int> coords) { return Example(std::vector<int>(coords)); }
}  // namespace

TEST_CASE("phi doubles every coordinate") {
  REQUIRE(phi(ex({1, -1})) == ex({1, 1, -1, -1}));

  Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    int n = rng.next_int(1, 12);
    Example x = Example::from_bits(n, rng.next_u64() & ((std::uint64_t{1} << n) - 1));
    Example y = Example::from_bits(n, rng.next_u64() & ((std::uint64_t{1} << n) - 1));
    REQUIRE(hamming(phi(x), phi(y)) == 2 * hamming(x, y));
    if (x != y) REQUIRE(phi(x) != phi(y));
    // coordinates 2j-1 recover x
    for (int j = 1; j <= n; ++j) REQUIRE(phi(x).coordinate(2 * j - 1) == x.coordinate(j));
  }
}

TEST_CASE("single 1-leaf reduces to the always-true doubled formula") {
  ReductionOutput out = tree_to_dnf(DecisionTree::leaf(3, 1));
  REQUIRE(out.formula.dimension() == 6);
  REQUIRE(out.formula.term_count() == 1);
  REQUIRE(out.formula.terms()[0] == Term());
  REQUIRE(out.term_provenance == std::vector<int>{0});

  ReductionOutput zero = tree_to_dnf(DecisionTree::leaf(3, 0));
  REQUIRE(zero.formula.term_count() == 0);
}

TEST_CASE("stump reduces to a two-literal term") {
  DecisionTree stump = DecisionTree::split(1, DecisionTree::leaf(1, 0), DecisionTree::leaf(1, 1));
  ReductionOutput out = tree_to_dnf(stump);
  REQUIRE(out.formula.dimension() == 2);
  REQUIRE(out.formula.terms() == std::vector<Term>{Term::of({{1, false}, {2, false}})});
  for (const Example& x : enumerate_cube(1))
    REQUIRE(eval_tree(stump, x) == eval_dnf(out.formula, phi(x)));
}

TEST_CASE("depth-2 tree with two positive leaves") {
  DecisionTree inner = DecisionTree::split(2, DecisionTree::leaf(2, 1), DecisionTree::leaf(2, 0));
  DecisionTree tree = DecisionTree::split(1, std::move(inner), DecisionTree::leaf(2, 1));
  ReductionOutput out = tree_to_dnf(tree);
  REQUIRE(out.formula.term_count() == 2);
  for (const Example& x : enumerate_cube(2))
    REQUIRE(eval_tree(tree, x) == eval_dnf(out.formula, phi(x)));
}

TEST_CASE("conflicting paths are dropped, consistent revisits deduplicate") {
  // x1 tested twice with opposite branches: the inner 1-leaf is unreachable
  DecisionTree conflict = DecisionTree::split(
      1, DecisionTree::leaf(2, 0),
      DecisionTree::split(1, DecisionTree::leaf(2, 1), DecisionTree::leaf(2, 0)));
  ReductionOutput out = tree_to_dnf(conflict);
  REQUIRE(out.formula.term_count() == 0);
  for (const Example& x : enumerate_cube(2))
    REQUIRE(eval_tree(conflict, x) == eval_dnf(out.formula, phi(x)));

  // x1 tested twice with the same branch: one literal, not two
  DecisionTree consistent = DecisionTree::split(
      1, DecisionTree::leaf(2, 0),
      DecisionTree::split(1, DecisionTree::leaf(2, 0), DecisionTree::leaf(2, 1)));
  ReductionOutput kept = tree_to_dnf(consistent);
  REQUIRE(kept.formula.terms() == std::vector<Term>{Term::of({{1, false}, {2, false}})});
}

TEST_CASE("reduction invariants over random trees") {
  Rng rng(32);
  for (int trial = 0; trial < 60; ++trial) {
    int n = rng.next_int(1, 8);
    DecisionTree tree = random_tree(n, rng.next_int(1, n * n), rng);
    ReductionOutput out = tree_to_dnf(tree);
    REQUIRE(out.formula.term_count() <= tree.leaf_count());
    REQUIRE(out.term_provenance.size() == out.formula.term_count());
    for (const Example& x : enumerate_cube(n)) {
      Label label = eval_tree(tree, x);
      REQUIRE(label == eval_dnf(out.formula, phi(x)));
      if (label == 1) {
        bool evident = false;
        for (std::size_t i = 0; i < out.formula.term_count() && !evident; ++i)
          evident = satisfies_evidently(out.formula, i, phi(x));
        REQUIRE(evident);
      }
    }
  }
}

TEST_CASE("distribution lift") {
  Example x = ex({1, -1});
  ExplicitDistribution lifted = lift_distribution(ExplicitDistribution::point_mass(x));
  REQUIRE(lifted.dimension() == 4);
  REQUIRE(lifted.mass_of(phi(x)) == 1.0);

  ExplicitDistribution uniform1 = ExplicitDistribution::uniform_cube(1);
  ExplicitDistribution lifted1 = lift_distribution(uniform1);
  REQUIRE(lifted1.support().size() == 2);
  REQUIRE(lifted1.mass_of(ex({1, 1})) == 0.5);
  REQUIRE(lifted1.mass_of(ex({-1, -1})) == 0.5);
  REQUIRE(lifted1.mass_of(ex({1, -1})) == 0.0);

  Rng rng(33);
  for (int trial = 0; trial < 30; ++trial) {
    RealizedInstance inst = gen_opposite_pair_instance(rng.next_int(2, 6), 2, rng);
    ExplicitDistribution lifted_any = lift_distribution(inst.distribution);
    REQUIRE(lifted_any.support().size() == inst.distribution.support().size());
  }
}

TEST_CASE("hardness transfer: lifted samples are realized by the reduced formula") {
  Rng rng(34);
  for (int trial = 0; trial < 40; ++trial) {
    int n = rng.next_int(2, 8);
    RealizedInstance inst = gen_from_tree(n, std::min(n * n, 12), rng);
    REQUIRE(inst.flavor == Flavor::realized_evident);
    REQUIRE(inst.source_tree.has_value());
    REQUIRE(validate_realized(inst.distribution, inst.formula));

    // lifted sample labels agree with the tree through phi, and negatives stay negative
    const DecisionTree& tree = *inst.source_tree;
    for (const auto& [point, mass] : inst.distribution.support()) {
      (void)mass;
      // recover the base point from the doubled coordinates
      std::vector<int> base;
      for (int j = 1; j <= tree.dimension(); ++j) base.push_back(point.coordinate(2 * j - 1));
      Example original{base};
      REQUIRE(phi(original) == point);
      REQUIRE(eval_tree(tree, original) == eval_dnf(inst.formula, point));
    }
  }
}
