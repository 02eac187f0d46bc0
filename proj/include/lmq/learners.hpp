#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "lmq/boolcube.hpp"
#include "lmq/concepts.hpp"
#include "lmq/oracles.hpp"

namespace lmq {

/// Per-example term recovery. Starts from the full 2n-literal term and asks
/// one 1-local query per coordinate: an answer of 1 removes the variable
/// entirely; an answer of 0 removes the one literal that x itself violates.
/// If x satisfies some term of the hidden formula evidently, the result is
/// exactly that term.
inline Term recover_term(const Example& x, LocalMembershipOracle& oracle) {
  int n = x.dimension();
  Term t = Term::full(n);
  for (int j = 1; j <= n; ++j) {
    Label answer = oracle.query(flip(x, j));
    if (answer == 1) {
      t.remove_variable(j);
    } else if (x.coordinate(j) == 1) {
      t.remove({j, true});
    } else {
      t.remove({j, false});
    }
  }
  return t;
}

/// Phase-1 term construction shared by both learners: one recovered term per
/// positive example, duplicates removed. Issues exactly n queries per positive
/// example and none otherwise.
inline std::vector<Term> build_candidate_terms(const LabeledSample& sample,
                                               LocalMembershipOracle& oracle) {
  std::vector<Term> candidates;
  for (const auto& [x, y] : sample) {
    if (y != 1) continue;
    Term t = recover_term(x, oracle);
    if (std::find(candidates.begin(), candidates.end(), t) == candidates.end())
      candidates.push_back(t);
  }
  return candidates;
}

/// Deletes every candidate that fires on a negatively labeled checking
/// example. Candidates that survive are returned in their original order.
inline std::vector<Term> prune_false_terms(std::vector<Term> candidates,
                                           const LabeledSample& checking_sample) {
  std::vector<Term> kept;
  kept.reserve(candidates.size());
  for (const Term& t : candidates) {
    bool contradicted = false;
    for (const auto& [x, y] : checking_sample) {
      if (y == 0 && eval_term(t, x)) {
        contradicted = true;
        break;
      }
    }
    if (!contradicted) kept.push_back(t);
  }
  return kept;
}

/// Learner for instances realized by a small DNF with evident examples: the
/// disjunction of the recovered terms of all positive examples.
inline DnfFormula algorithm1(const LabeledSample& sample, LocalMembershipOracle& oracle) {
  return DnfFormula(sample.dimension(), build_candidate_terms(sample, oracle));
}

/// Learner for the weakly realized case: terms built from s1 as in
/// algorithm1, then every term contradicted by a negative example of s2 is
/// deleted. Queries are issued only while building.
inline DnfFormula algorithm2(const LabeledSample& s1, const LabeledSample& s2,
                             LocalMembershipOracle& oracle) {
  if (s1.dimension() != s2.dimension())
    throw std::invalid_argument("algorithm2: sample dimension mismatch");
  return DnfFormula(s1.dimension(),
                    prune_false_terms(build_candidate_terms(s1, oracle), s2));
}

struct SampleSizePlan {
  double epsilon = 0.0;
  int d_bound = 0;
  long long m = 0;   // realized case
  long long m1 = 0;  // weak case, term-building sample
  long long m2 = 0;  // weak case, checking sample
};

namespace detail {
inline void check_epsilon(double epsilon) {
  if (!(epsilon > 0.0) || !(epsilon < 1.0))
    throw std::invalid_argument("sample size plan: epsilon must lie in (0,1)");
}

inline long long ceil_x_log_x(double x) {
  return static_cast<long long>(std::ceil(x * std::log(x)));
}
}  // namespace detail

/// m = ceil((2d/eps) ln(2d/eps)). Natural logarithm: the analysis bounds
/// (1-p)^m by e^(-mp).
inline SampleSizePlan plan_realized(double epsilon, int d_bound) {
  detail::check_epsilon(epsilon);
  if (d_bound < 1) throw std::invalid_argument("plan_realized: d must be >= 1");
  SampleSizePlan plan;
  plan.epsilon = epsilon;
  plan.d_bound = d_bound;
  plan.m = detail::ceil_x_log_x(2.0 * d_bound / epsilon);
  return plan;
}

/// m2 = ceil((2 m1/eps) ln(2 m1/eps)), the checking-sample size for a given
/// number of candidate terms m1.
inline long long checking_sample_size(long long m1, double epsilon) {
  detail::check_epsilon(epsilon);
  if (m1 < 1) throw std::invalid_argument("checking_sample_size: m1 must be >= 1");
  return detail::ceil_x_log_x(2.0 * static_cast<double>(m1) / epsilon);
}

/// m1 = ceil(n^3 ln(8 n^2)), m2 = ceil((2 m1/eps) ln(2 m1/eps)).
inline SampleSizePlan plan_weak(double epsilon, int n) {
  detail::check_epsilon(epsilon);
  if (n < 1) throw std::invalid_argument("plan_weak: n must be >= 1");
  SampleSizePlan plan;
  plan.epsilon = epsilon;
  plan.d_bound = n * n;
  double cube = static_cast<double>(n) * n * n;
  plan.m1 = static_cast<long long>(std::ceil(cube * std::log(8.0 * n * n)));
  plan.m2 = checking_sample_size(plan.m1, epsilon);
  return plan;
}

/// Desk-scale alternative to plan_weak's m1, not taken from the analysis:
/// ceil((1/s_min) ln(8d)) where s_min is the smallest per-term evident mass.
inline long long tight_building_sample_size(double s_min, int d) {
  if (!(s_min > 0.0)) throw std::invalid_argument("tight_building_sample_size: s_min must be positive");
  if (d < 1) throw std::invalid_argument("tight_building_sample_size: d must be >= 1");
  return static_cast<long long>(std::ceil(std::log(8.0 * d) / s_min));
}

}  // namespace lmq
