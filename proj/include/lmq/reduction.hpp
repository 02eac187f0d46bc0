#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "lmq/boolcube.hpp"
#include "lmq/concepts.hpp"
#include "lmq/distributions.hpp"
#include "lmq/error.hpp"

namespace lmq {

/// Variable-doubling embedding: (x1,...,xn) -> (x1,x1,x2,x2,...,xn,xn).
inline Example phi(const Example& x) {
  int n = x.dimension();
  if (2 * n > Example::max_dimension)
    throw capacity_error("phi: doubled dimension exceeds cap");
  std::uint64_t bits = 0;
  for (int j = 1; j <= n; ++j)
    if (x.coordinate(j) == 1) bits |= std::uint64_t{3} << (2 * (j - 1));
  return Example::from_bits(2 * n, bits);
}

struct ReductionOutput {
  DnfFormula formula;                 // over dimension 2n
  std::vector<int> term_provenance;   // term index -> pre-order position of its leaf
};

namespace detail {

inline Term double_term(const Term& t) {
  Term doubled;
  for (const Literal& l : t.literals()) {
    doubled.add({2 * l.variable - 1, l.negated});
    doubled.add({2 * l.variable, l.negated});
  }
  return doubled;
}

}  // namespace detail

/// Builds the doubled DNF for a tree: each 1-leaf contributes the conjunction
/// of literals along its path, with every variable doubled. Paths that test a
/// variable twice with conflicting branches are unreachable and are dropped.
inline ReductionOutput tree_to_dnf(const DecisionTree& tree) {
  int n = tree.dimension();
  if (2 * n > Example::max_dimension)
    throw capacity_error("tree_to_dnf: doubled dimension exceeds cap");
  std::vector<Term> terms;
  std::vector<int> provenance;
  int position = 0;
  auto walk = [&](const DecisionTree::Node& node, Term path, auto&& self) -> void {
    int here = position++;
    if (node.is_leaf()) {
      if (node.label == 1 && !path.contradictory()) {
        terms.push_back(detail::double_term(path));
        provenance.push_back(here);
      }
      return;
    }
    Term minus = path;
    minus.add({node.variable, true});
    self(*node.left, minus, self);
    Term plus = path;
    plus.add({node.variable, false});
    self(*node.right, plus, self);
  };
  walk(tree.root(), Term(), walk);
  return ReductionOutput{DnfFormula(2 * n, std::move(terms)), std::move(provenance)};
}

/// Pushes a distribution through phi: mass of phi(x) equals mass of x, all
/// off-image points have mass 0.
inline ExplicitDistribution lift_distribution(const ExplicitDistribution& d) {
  std::vector<std::pair<Example, double>> support;
  support.reserve(d.support().size());
  for (const auto& [point, mass] : d.support()) support.emplace_back(phi(point), mass);
  return ExplicitDistribution(2 * d.dimension(), std::move(support));
}

/// Random tree with the requested number of leaves: repeatedly splits a random
/// leaf on a random variable; leaf labels are fair coin flips. Paths may
/// revisit variables.
inline DecisionTree random_tree(int n, int leaves, Rng& rng) {
  if (leaves < 1) throw std::invalid_argument("random_tree: need at least one leaf");
  DecisionTree tree = DecisionTree::leaf(n, rng.next_int(0, 1));
  for (int grown = 1; grown < leaves; ++grown) {
    // splits the leaf at a uniformly random leaf index
    int target = rng.next_int(0, grown - 1);
    int variable = rng.next_int(1, n);
    Label left_label = rng.next_int(0, 1);
    Label right_label = rng.next_int(0, 1);
    int seen = 0;
    auto rebuild = [&](const DecisionTree::Node& node, auto&& self) -> DecisionTree {
      if (node.is_leaf()) {
        if (seen++ == target)
          return DecisionTree::split(variable, DecisionTree::leaf(n, left_label),
                                     DecisionTree::leaf(n, right_label));
        return DecisionTree::leaf(n, node.label);
      }
      DecisionTree minus = self(*node.left, self);
      DecisionTree plus = self(*node.right, self);
      return DecisionTree::split(node.variable, std::move(minus), std::move(plus));
    };
    tree = rebuild(tree.root(), rebuild);
  }
  return tree;
}

/// Realized instance over dimension 2n built by the reduction: random tree,
/// random base support, doubled formula, lifted distribution. The source tree
/// is retained for diagnostics.
inline RealizedInstance gen_from_tree(int n, int leaf_budget, Rng& rng) {
  if (leaf_budget < 1 || static_cast<long long>(leaf_budget) > static_cast<long long>(n) * n)
    throw std::invalid_argument("gen_from_tree: leaf budget must be in 1..n^2");
  DecisionTree tree = random_tree(n, rng.next_int(1, leaf_budget), rng);
  ReductionOutput reduced = tree_to_dnf(tree);

  int count = rng.next_int(2, static_cast<int>(std::min<std::uint64_t>(16, std::uint64_t{1} << n)));
  std::vector<Example> points;
  std::unordered_set<Example> seen;
  for (int attempts = 0; static_cast<int>(points.size()) < count && attempts < 64 * count;
       ++attempts)
    detail::push_unique(points, seen, detail::random_point(n, rng));
  std::vector<std::pair<Example, double>> support;
  support.reserve(points.size());
  KahanSum total;
  std::vector<double> weights;
  weights.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    double w = 0.1 + rng.next_double();
    weights.push_back(w);
    total.add(w);
  }
  for (std::size_t i = 0; i < points.size(); ++i)
    support.emplace_back(points[i], weights[i] / total.value());
  ExplicitDistribution base(n, std::move(support));

  RealizedInstance instance{lift_distribution(base), std::move(reduced.formula),
                            Flavor::realized_evident, std::move(tree)};
  if (!validate_realized(instance.distribution, instance.formula))
    throw generation_error("gen_from_tree: reduction produced a non-realized instance");
  return instance;
}

}  // namespace lmq
