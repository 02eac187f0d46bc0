#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "lmq/boolcube.hpp"
#include "lmq/distributions.hpp"
#include "lmq/numeric.hpp"
#include "lmq/oracles.hpp"

namespace lmq {

struct LossBreakdown {
  double loss = 0.0;
  double false_positive_mass = 0.0;  // target 0, hypothesis 1
  double false_negative_mass = 0.0;  // target 1, hypothesis 0
};

/// Exact loss over the explicit support, split by disagreement direction.
/// Off-support points carry no mass, so this equals the full-cube loss.
template <class Target, class Hypothesis>
LossBreakdown exact_loss(const ExplicitDistribution& d, Target&& target, Hypothesis&& hypothesis) {
  KahanSum fp, fn;
  for (const auto& [point, mass] : d.support()) {
    Label truth = target(point);
    Label predicted = hypothesis(point);
    if (truth == predicted) continue;
    if (truth == 0)
      fp.add(mass);
    else
      fn.add(mass);
  }
  LossBreakdown out;
  out.false_positive_mass = fp.value();
  out.false_negative_mass = fn.value();
  out.loss = out.false_positive_mass + out.false_negative_mass;
  return out;
}

/// Diagnostic mode: walks the whole cube and looks masses up in the support.
/// Must agree with exact_loss; capped by the enumeration dimension limit.
template <class Target, class Hypothesis>
LossBreakdown exact_loss_full_cube(const ExplicitDistribution& d, Target&& target,
                                   Hypothesis&& hypothesis) {
  KahanSum fp, fn;
  for (const Example& point : enumerate_cube(d.dimension())) {
    double mass = d.mass_of(point);
    if (mass == 0.0) continue;
    Label truth = target(point);
    Label predicted = hypothesis(point);
    if (truth == predicted) continue;
    if (truth == 0)
      fp.add(mass);
    else
      fn.add(mass);
  }
  LossBreakdown out;
  out.false_positive_mass = fp.value();
  out.false_negative_mass = fn.value();
  out.loss = out.false_positive_mass + out.false_negative_mass;
  return out;
}

/// Disagreement fraction on a held-out sample.
template <class Hypothesis>
double empirical_loss(const LabeledSample& sample, Hypothesis&& hypothesis) {
  if (sample.empty())
    throw std::invalid_argument("empirical_loss: undefined on an empty sample");
  std::size_t disagreements = 0;
  for (const auto& [x, y] : sample)
    disagreements += static_cast<std::size_t>(hypothesis(x) != y);
  return static_cast<double>(disagreements) / static_cast<double>(sample.size());
}

/// One row of an experiment report. The serialized column order is fixed:
/// seed,n,d,m,m1,m2,loss,fp,fn,queries,ms. The positives field is an
/// in-memory diagnostic and is not serialized.
struct TrialRecord {
  std::uint64_t seed = 0;
  int n = 0;
  int d = 0;
  long long m = 0;
  long long m1 = 0;
  long long m2 = 0;
  double loss = 0.0;
  double false_positive_mass = 0.0;
  double false_negative_mass = 0.0;
  std::uint64_t queries = 0;
  long long wall_ms = 0;
  std::size_t positives = 0;
  bool failed = false;
};

inline std::string csv_header() { return "seed,n,d,m,m1,m2,loss,fp,fn,queries,ms"; }

inline std::string to_csv_row(const TrialRecord& r) {
  std::string row;
  row += std::to_string(r.seed);
  row += ',';
  row += std::to_string(r.n);
  row += ',';
  row += std::to_string(r.d);
  row += ',';
  row += std::to_string(r.m);
  row += ',';
  row += std::to_string(r.m1);
  row += ',';
  row += std::to_string(r.m2);
  row += ',';
  row += format_double(r.loss);
  row += ',';
  row += format_double(r.false_positive_mass);
  row += ',';
  row += format_double(r.false_negative_mass);
  row += ',';
  row += std::to_string(r.queries);
  row += ',';
  row += std::to_string(r.wall_ms);
  return row;
}

/// Fraction of records with loss strictly below the threshold. Failed trials
/// count against success.
inline double success_rate(const std::vector<TrialRecord>& records, double threshold) {
  if (records.empty()) throw std::invalid_argument("success_rate: no records");
  std::size_t good = 0;
  for (const TrialRecord& r : records)
    good += static_cast<std::size_t>(!r.failed && r.loss < threshold);
  return static_cast<double>(good) / static_cast<double>(records.size());
}

}  // namespace lmq
