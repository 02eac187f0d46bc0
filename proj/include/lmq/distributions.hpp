#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "lmq/boolcube.hpp"
#include "lmq/concepts.hpp"
#include "lmq/error.hpp"
#include "lmq/numeric.hpp"
#include "lmq/rng.hpp"

namespace lmq {

inline constexpr double kMassTolerance = 1e-12;

/// Finitely supported probability mass over {-1,+1}^n. Masses are validated
/// (positive, distinct points, total within 1e-12 of 1) and stored exactly as
/// given so fixtures round-trip bit-for-bit.
class ExplicitDistribution {
 public:
  ExplicitDistribution(int n, std::vector<std::pair<Example, double>> support)
      : n_(n), support_(std::move(support)) {
    if (support_.empty())
      throw std::invalid_argument("ExplicitDistribution: empty support");
    KahanSum total;
    std::unordered_set<Example> seen;
    for (const auto& [point, mass] : support_) {
      if (point.dimension() != n_)
        throw std::invalid_argument("ExplicitDistribution: support point dimension mismatch");
      if (!(mass > 0.0))
        throw std::invalid_argument("ExplicitDistribution: masses must be positive");
      if (!seen.insert(point).second)
        throw std::invalid_argument("ExplicitDistribution: duplicate support point " +
                                    lmq::to_string(point));
      total.add(mass);
    }
    if (std::abs(total.value() - 1.0) > kMassTolerance)
      throw std::invalid_argument("ExplicitDistribution: masses sum to " +
                                  std::to_string(total.value()) + ", not 1 within 1e-12");
    cumulative_.reserve(support_.size());
    KahanSum running;
    for (const auto& [point, mass] : support_) {
      running.add(mass);
      cumulative_.push_back(running.value());
    }
  }

  static ExplicitDistribution point_mass(const Example& x) {
    return ExplicitDistribution(x.dimension(), {{x, 1.0}});
  }

  static ExplicitDistribution uniform(const std::vector<Example>& points) {
    if (points.empty()) throw std::invalid_argument("uniform: no points");
    double mass = 1.0 / static_cast<double>(points.size());
    std::vector<std::pair<Example, double>> support;
    support.reserve(points.size());
    for (const Example& x : points) support.emplace_back(x, mass);
    return ExplicitDistribution(points.front().dimension(), std::move(support));
  }

  static ExplicitDistribution uniform_cube(int n) {
    std::vector<Example> points;
    for (const Example& x : enumerate_cube(n)) points.push_back(x);
    return uniform(points);
  }

  int dimension() const { return n_; }
  const std::vector<std::pair<Example, double>>& support() const { return support_; }

  double mass_of(const Example& x) const {
    for (const auto& [point, mass] : support_)
      if (point == x) return mass;
    return 0.0;
  }

  Example sample(Rng& rng) const {
    double u = rng.next_double();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    std::size_t i = static_cast<std::size_t>(it - cumulative_.begin());
    if (i >= support_.size()) i = support_.size() - 1;  // guards fp shortfall at the top
    return support_[i].first;
  }

  friend bool operator==(const ExplicitDistribution& a, const ExplicitDistribution& b) {
    return a.n_ == b.n_ && a.support_ == b.support_;
  }

 private:
  int n_;
  std::vector<std::pair<Example, double>> support_;
  std::vector<double> cumulative_;
};

inline Example sample(const ExplicitDistribution& d, Rng& rng) { return d.sample(rng); }

namespace detail {
inline void check_same_dimension(const ExplicitDistribution& d, const DnfFormula& f) {
  if (d.dimension() != f.dimension())
    throw std::invalid_argument("distribution/formula dimension mismatch");
}

inline void check_small(const DnfFormula& f, int n) {
  std::size_t bound = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
  if (f.term_count() > bound)
    throw not_small_error("formula has " + std::to_string(f.term_count()) +
                          " terms; small means at most n^2 = " + std::to_string(bound));
}
}  // namespace detail

/// p_i: exact probability that a draw satisfies term i.
inline double term_mass(const ExplicitDistribution& d, const DnfFormula& f, std::size_t term_index) {
  detail::check_same_dimension(d, f);
  if (term_index >= f.term_count())
    throw std::invalid_argument("term_mass: term index out of range");
  KahanSum total;
  for (const auto& [point, mass] : d.support())
    if (eval_term(f.terms()[term_index], point)) total.add(mass);
  return total.value();
}

/// s_i: exact probability that a draw satisfies term i evidently.
inline double evident_mass(const ExplicitDistribution& d, const DnfFormula& f,
                           std::size_t term_index) {
  detail::check_same_dimension(d, f);
  if (term_index >= f.term_count())
    throw std::invalid_argument("evident_mass: term index out of range");
  KahanSum total;
  for (const auto& [point, mass] : d.support())
    if (satisfies_evidently(f, term_index, point)) total.add(mass);
  return total.value();
}

/// Every positive support point must satisfy some term evidently.
inline bool validate_realized(const ExplicitDistribution& d, const DnfFormula& f) {
  detail::check_same_dimension(d, f);
  detail::check_small(f, d.dimension());
  for (const auto& [point, mass] : d.support()) {
    if (eval_dnf(f, point) == 0) continue;
    bool evident = false;
    for (std::size_t i = 0; i < f.term_count() && !evident; ++i)
      evident = satisfies_evidently(f, i, point);
    if (!evident) return false;
  }
  return true;
}

/// Every term must carry evident mass of at least n^-3 (inclusive).
inline bool validate_weakly_realized(const ExplicitDistribution& d, const DnfFormula& f) {
  detail::check_same_dimension(d, f);
  detail::check_small(f, d.dimension());
  double n = static_cast<double>(d.dimension());
  double threshold = 1.0 / (n * n * n);
  for (std::size_t i = 0; i < f.term_count(); ++i)
    if (evident_mass(d, f, i) < threshold) return false;
  return true;
}

enum class Flavor { realized_evident, weakly_realized_evident };

inline std::string to_string(Flavor flavor) {
  return flavor == Flavor::realized_evident ? "realized-evident" : "weakly-realized-evident";
}

inline Flavor parse_flavor(std::string_view text) {
  if (text == "realized-evident") return Flavor::realized_evident;
  if (text == "weakly-realized-evident") return Flavor::weakly_realized_evident;
  throw parse_error("unknown flavor '" + std::string(text) + "'");
}

/// A (distribution, certifying formula) pair that passes its flavor's
/// validator. Generators may attach the source decision tree for diagnostics.
struct RealizedInstance {
  ExplicitDistribution distribution;
  DnfFormula formula;
  Flavor flavor;
  std::optional<DecisionTree> source_tree;
};

/// Uniformly random DNF: each variable joins each term with probability 0.4,
/// negated half the time. Terms may be empty (always true).
inline DnfFormula random_dnf(int n, int max_terms, Rng& rng) {
  if (max_terms < 1) throw std::invalid_argument("random_dnf: max_terms must be >= 1");
  int d = rng.next_int(1, max_terms);
  std::vector<Term> terms;
  terms.reserve(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    Term t;
    for (int j = 1; j <= n; ++j) {
      double u = rng.next_double();
      if (u < 0.2)
        t.add({j, false});
      else if (u < 0.4)
        t.add({j, true});
    }
    terms.push_back(t);
  }
  return DnfFormula(n, std::move(terms));
}

namespace detail {

inline Example random_point(int n, Rng& rng) {
  std::uint64_t bits = rng.next_u64();
  if (n < 64) bits &= (std::uint64_t{1} << n) - 1;
  return Example::from_bits(n, bits);
}

/// Point satisfying every literal of `term`, other coordinates random.
inline Example random_satisfying_point(int n, const Term& term, Rng& rng) {
  std::uint64_t bits = rng.next_u64();
  if (n < 64) bits &= (std::uint64_t{1} << n) - 1;
  bits |= term.positive_mask();
  bits &= ~term.negative_mask();
  return Example::from_bits(n, bits);
}

inline void push_unique(std::vector<Example>& points, std::unordered_set<Example>& seen,
                        const Example& x) {
  if (seen.insert(x).second) points.push_back(x);
}

inline ExplicitDistribution half_half_support(int n, const std::vector<Example>& positives,
                                              const std::vector<Example>& negatives) {
  std::vector<std::pair<Example, double>> support;
  support.reserve(positives.size() + negatives.size());
  double pos_mass = 0.5 / static_cast<double>(positives.size());
  for (const Example& x : positives) support.emplace_back(x, pos_mass);
  double neg_mass = 0.5 / static_cast<double>(negatives.size());
  for (const Example& x : negatives) support.emplace_back(x, neg_mass);
  return ExplicitDistribution(n, std::move(support));
}

}  // namespace detail

/// Instance family where every pair of distinct terms disagrees on at least
/// two shared variables, so one coordinate flip can never move satisfaction
/// from one term to another: every positive point of the cube is evident.
///
/// Terms share b+1 "anchor" variables (b = ceil(log2 d)); term i's anchor
/// polarities are the bits of i extended with an even-parity bit, giving
/// pairwise Hamming distance >= 2 between anchor patterns. Each term then adds
/// up to two random extra literals. Support mixes per-term satisfying points
/// with guaranteed-negative points (odd anchor parity), mass split 50/50.
inline RealizedInstance gen_opposite_pair_instance(int n, int d, Rng& rng) {
  if (d < 1) throw generation_error("gen_opposite_pair_instance: d must be >= 1");
  if (static_cast<long long>(d) > static_cast<long long>(n) * n)
    throw generation_error("gen_opposite_pair_instance: d exceeds the small bound n^2");
  int b = d == 1 ? 0 : std::bit_width(static_cast<unsigned>(d - 1));
  int anchors = b + 1;
  if (anchors > n)
    throw generation_error("gen_opposite_pair_instance: need " + std::to_string(anchors) +
                           " anchor variables but n = " + std::to_string(n));

  std::vector<Term> terms;
  terms.reserve(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    Term t;
    unsigned parity = static_cast<unsigned>(std::popcount(static_cast<unsigned>(i))) & 1u;
    for (int a = 1; a <= b; ++a) t.add({a, ((static_cast<unsigned>(i) >> (a - 1)) & 1u) == 0});
    t.add({anchors, parity == 0});
    int spare = n - anchors;
    int extras = spare > 0 ? rng.next_int(0, std::min(2, spare)) : 0;
    for (int e = 0; e < extras; ++e) {
      int variable = anchors + 1 + rng.next_int(0, spare - 1);
      if (!t.contains_variable(variable)) t.add({variable, rng.next_bool()});
    }
    terms.push_back(t);
  }
  DnfFormula formula(n, terms);

  std::vector<Example> positives, negatives;
  std::unordered_set<Example> seen;
  for (int i = 0; i < d; ++i) {
    int count = rng.next_int(1, 3);
    for (int c = 0; c < count; ++c)
      detail::push_unique(positives, seen, detail::random_satisfying_point(n, terms[static_cast<std::size_t>(i)], rng));
  }
  int negative_count = std::max(2, d);
  for (int c = 0; c < negative_count; ++c) {
    // odd anchor parity violates every term's anchor codeword
    std::uint64_t bits = rng.next_u64();
    if (n < 64) bits &= (std::uint64_t{1} << n) - 1;
    std::uint64_t anchor_mask = (std::uint64_t{1} << anchors) - 1;
    if (std::popcount(bits & anchor_mask) % 2 == 0) bits ^= std::uint64_t{1} << (anchors - 1);
    Example x = Example::from_bits(n, bits);
    if (eval_dnf(formula, x) != 0)
      throw generation_error("gen_opposite_pair_instance: internal negative construction failed");
    detail::push_unique(negatives, seen, x);
  }

  RealizedInstance instance{detail::half_half_support(n, positives, negatives), formula,
                            Flavor::realized_evident, std::nullopt};
  if (!validate_realized(instance.distribution, instance.formula))
    throw generation_error("gen_opposite_pair_instance: generated instance failed validation");
  return instance;
}

/// Weakly-realized instance: d terms on disjoint variable pairs. For each term
/// the support plants evident points (all other terms violated twice over) and,
/// for d >= 2, one point satisfying every term at once, which is positive but
/// not evident, so validate_realized rejects while validate_weakly_realized
/// accepts. Masses are uniform over the support.
inline RealizedInstance gen_weak_instance(int n, int d, Rng& rng) {
  if (d < 1) throw generation_error("gen_weak_instance: d must be >= 1");
  if (static_cast<long long>(d) > static_cast<long long>(n) * n)
    throw generation_error("gen_weak_instance: d exceeds the small bound n^2");
  if (2 * d > n)
    throw generation_error("gen_weak_instance: need 2d <= n disjoint variables, got n = " +
                           std::to_string(n) + ", d = " + std::to_string(d));

  std::vector<Term> terms;
  terms.reserve(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    Term t;
    t.add({2 * i + 1, rng.next_bool()});
    t.add({2 * i + 2, rng.next_bool()});
    terms.push_back(t);
  }
  DnfFormula formula(n, terms);

  auto match = [](std::uint64_t bits, const Term& t) {
    return (bits | t.positive_mask()) & ~t.negative_mask();
  };
  auto anti_match = [](std::uint64_t bits, const Term& t) {
    // violate both literals: negate the required polarity on each variable
    return (bits & ~t.positive_mask()) | t.negative_mask();
  };

  std::vector<Example> points;
  std::unordered_set<Example> seen;
  int variants = 2 * d < n ? 2 : 1;
  for (int i = 0; i < d; ++i) {
    for (int v = 0; v < variants; ++v) {
      std::uint64_t bits = rng.next_u64();
      if (n < 64) bits &= (std::uint64_t{1} << n) - 1;
      bits = match(bits, terms[static_cast<std::size_t>(i)]);
      for (int k = 0; k < d; ++k)
        if (k != i) bits = anti_match(bits, terms[static_cast<std::size_t>(k)]);
      detail::push_unique(points, seen, Example::from_bits(n, bits));
    }
  }
  if (d >= 2) {
    std::uint64_t bits = rng.next_u64();
    if (n < 64) bits &= (std::uint64_t{1} << n) - 1;
    for (int k = 0; k < d; ++k) bits = match(bits, terms[static_cast<std::size_t>(k)]);
    detail::push_unique(points, seen, Example::from_bits(n, bits));
  }
  int negative_count = std::max(2, d);
  for (int c = 0; c < negative_count; ++c) {
    std::uint64_t bits = rng.next_u64();
    if (n < 64) bits &= (std::uint64_t{1} << n) - 1;
    for (int k = 0; k < d; ++k) {
      const Term& t = terms[static_cast<std::size_t>(k)];
      // violate one randomly chosen literal of each term
      Literal l = t.literals()[static_cast<std::size_t>(rng.next_int(0, 1))];
      std::uint64_t vbit = std::uint64_t{1} << (l.variable - 1);
      if (l.negated)
        bits |= vbit;
      else
        bits &= ~vbit;
    }
    Example x = Example::from_bits(n, bits);
    if (eval_dnf(formula, x) != 0)
      throw generation_error("gen_weak_instance: internal negative construction failed");
    detail::push_unique(points, seen, x);
  }

  RealizedInstance instance{ExplicitDistribution::uniform(points), formula,
                            Flavor::weakly_realized_evident, std::nullopt};
  if (!validate_weakly_realized(instance.distribution, instance.formula))
    throw generation_error("gen_weak_instance: generated instance failed weak validation");
  if (d >= 2 && validate_realized(instance.distribution, instance.formula))
    throw generation_error("gen_weak_instance: planted non-evident positive went missing");
  return instance;
}

}  // namespace lmq
