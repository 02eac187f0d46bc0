#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lmq/boolcube.hpp"
#include "lmq/distributions.hpp"
#include "lmq/error.hpp"

namespace lmq {

/// Ordered list of labeled examples sharing one dimension.
class LabeledSample {
 public:
  explicit LabeledSample(int n, std::vector<std::pair<Example, Label>> pairs = {})
      : n_(n), pairs_(std::move(pairs)) {
    if (n < 1 || n > Example::max_dimension)
      throw std::invalid_argument("LabeledSample: bad dimension");
    for (const auto& [x, y] : pairs_) {
      if (x.dimension() != n_)
        throw std::invalid_argument("LabeledSample: example dimension mismatch");
      if (!is_valid_label(y)) throw std::invalid_argument("LabeledSample: label must be 0 or 1");
    }
  }

  /// Validating constructor: every label must agree with the target (which in
  /// particular forces duplicated examples to carry one consistent label).
  LabeledSample(int n, std::vector<std::pair<Example, Label>> pairs,
                const std::function<Label(const Example&)>& target)
      : LabeledSample(n, std::move(pairs)) {
    for (const auto& [x, y] : pairs_)
      if (target(x) != y)
        throw consistency_error("LabeledSample: label of " + lmq::to_string(x) +
                                " contradicts the target");
  }

  int dimension() const { return n_; }
  std::size_t size() const { return pairs_.size(); }
  bool empty() const { return pairs_.empty(); }
  const std::vector<std::pair<Example, Label>>& pairs() const { return pairs_; }
  auto begin() const { return pairs_.begin(); }
  auto end() const { return pairs_.end(); }

  std::size_t positive_count() const {
    std::size_t count = 0;
    for (const auto& [x, y] : pairs_) count += static_cast<std::size_t>(y == 1);
    return count;
  }

  std::vector<Example> examples() const {
    std::vector<Example> out;
    out.reserve(pairs_.size());
    for (const auto& [x, y] : pairs_) out.push_back(x);
    return out;
  }

 private:
  int n_;
  std::vector<std::pair<Example, Label>> pairs_;
};

/// m i.i.d. draws from d, each labeled by the target. Deterministic given the
/// generator state.
template <class Target>
LabeledSample draw_sample(const ExplicitDistribution& d, Target&& target, std::size_t m,
                          Rng& rng) {
  std::vector<std::pair<Example, Label>> pairs;
  pairs.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    Example x = d.sample(rng);
    Label y = target(x);
    if (!is_valid_label(y)) throw std::invalid_argument("draw_sample: target returned a non-binary label");
    pairs.emplace_back(std::move(x), y);
  }
  return LabeledSample(d.dimension(), std::move(pairs));
}

/// Membership oracle that only answers queries within Hamming distance q of
/// some reference (training) example. Rejected queries raise
/// non_local_query_error and are not counted by the meter. The target stays
/// behind an opaque function so learners cannot inspect its structure.
class LocalMembershipOracle {
 public:
  LocalMembershipOracle(int n, std::function<Label(const Example&)> target,
                        std::vector<Example> reference, int q)
      : n_(n), target_(std::move(target)), reference_(std::move(reference)), q_(q) {
    if (n < 1 || n > Example::max_dimension)
      throw std::invalid_argument("LocalMembershipOracle: bad dimension");
    if (q < 0) throw std::invalid_argument("LocalMembershipOracle: radius must be >= 0");
    if (!target_) throw std::invalid_argument("LocalMembershipOracle: missing target");
    for (const Example& x : reference_)
      if (x.dimension() != n_)
        throw std::invalid_argument("LocalMembershipOracle: reference dimension mismatch");
  }

  Label query(const Example& x) {
    if (x.dimension() != n_)
      throw std::invalid_argument("LocalMembershipOracle: query dimension mismatch");
    int nearest = std::numeric_limits<int>::max();
    for (const Example& ref : reference_) nearest = std::min(nearest, hamming(x, ref));
    if (nearest > q_) throw non_local_query_error(nearest, q_);
    ++meter_;
    return target_(x);
  }

  std::uint64_t meter() const { return meter_; }
  int locality_radius() const { return q_; }
  int dimension() const { return n_; }
  std::size_t reference_size() const { return reference_.size(); }

  void extend_reference(std::span<const Example> additions) {
    for (const Example& x : additions) {
      if (x.dimension() != n_)
        throw std::invalid_argument("extend_reference: dimension mismatch");
      reference_.push_back(x);
    }
  }

 private:
  int n_;
  std::function<Label(const Example&)> target_;
  std::vector<Example> reference_;
  int q_;
  std::uint64_t meter_ = 0;
};

}  // namespace lmq
