#pragma once

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "lmq/distributions.hpp"
#include "lmq/evaluation.hpp"
#include "lmq/learners.hpp"
#include "lmq/numeric.hpp"
#include "lmq/oracles.hpp"
#include "lmq/reduction.hpp"
#include "lmq/rng.hpp"

namespace lmq {

enum class Mode { alg1_realized, alg2_weak, reduction_check, propeq_check };
enum class GeneratorKind { opposite_pair, from_tree, weak_planted, fixture };
enum class ReportFormat { csv, json };

inline std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::alg1_realized:
      return "alg1-realized";
    case Mode::alg2_weak:
      return "alg2-weak";
    case Mode::reduction_check:
      return "reduction-check";
    default:
      return "propeq-check";
  }
}

inline Mode parse_mode(std::string_view text) {
  if (text == "alg1-realized") return Mode::alg1_realized;
  if (text == "alg2-weak") return Mode::alg2_weak;
  if (text == "reduction-check") return Mode::reduction_check;
  if (text == "propeq-check") return Mode::propeq_check;
  throw std::invalid_argument("unknown mode '" + std::string(text) + "'");
}

inline std::string to_string(GeneratorKind g) {
  switch (g) {
    case GeneratorKind::opposite_pair:
      return "opposite-pair";
    case GeneratorKind::from_tree:
      return "from-tree";
    case GeneratorKind::weak_planted:
      return "weak-planted";
    default:
      return "fixture";
  }
}

struct ExperimentConfig {
  Mode mode = Mode::alg1_realized;
  int n = 8;
  int d = 2;  // term bound for opposite-pair/weak-planted, leaf budget for from-tree
  double epsilon = 0.1;
  int trials = 1;
  std::uint64_t seed = 0;
  std::optional<GeneratorKind> generator;  // defaults per mode
  std::string fixture_path;
  std::optional<long long> override_m1;  // replaces the analyzed building-sample bound
  bool tight_m1 = false;  // per-instance ceil((1/s_min) ln(8d)) instead of the analyzed bound
  std::string out_path;                  // empty: no report file
  ReportFormat format = ReportFormat::csv;
  int verbosity = 0;
  bool timings = false;  // measured ms column breaks byte-identical reports, so opt-in
  unsigned threads = 0;  // 0: LMQLAB_THREADS env var, then hardware concurrency
};

struct Summary {
  int trials = 0;
  int failed = 0;
  double threshold = 0.0;  // 4 epsilon
  double success_rate = 0.0;
  double mean_loss = 0.0;
  double max_false_positive_mass = 0.0;
  double mean_queries = 0.0;
  long long checks = 0;
  long long violations = 0;
  long long true_terms_pruned = 0;
};

struct Report {
  std::vector<TrialRecord> records;
  Summary summary;
};

inline GeneratorKind default_generator(Mode mode) {
  return mode == Mode::alg2_weak ? GeneratorKind::weak_planted : GeneratorKind::opposite_pair;
}

inline void validate(const ExperimentConfig& config) {
  if (config.trials < 1) throw std::invalid_argument("config: trials must be >= 1");
  if (!(config.epsilon > 0.0) || !(config.epsilon < 1.0))
    throw std::invalid_argument("config: epsilon must lie in (0,1)");
  if (config.n < 1) throw std::invalid_argument("config: n must be >= 1");
  if (config.n > CubeRange::max_enumeration_dimension)
    throw std::invalid_argument("config: n must be <= 24; every mode validates exhaustively");
  if (config.d < 1) throw std::invalid_argument("config: d must be >= 1");
  if (config.override_m1 && *config.override_m1 < 1)
    throw std::invalid_argument("config: override m1 must be >= 1");
  if (config.override_m1 && config.tight_m1)
    throw std::invalid_argument("config: choose either a numeric m1 override or 'tight'");

  GeneratorKind generator = config.generator.value_or(default_generator(config.mode));
  if (generator == GeneratorKind::fixture && config.fixture_path.empty())
    throw std::invalid_argument("config: fixture generator needs a fixture path");
  if (config.mode == Mode::alg1_realized &&
      (generator != GeneratorKind::opposite_pair && generator != GeneratorKind::from_tree &&
       generator != GeneratorKind::fixture))
    throw std::invalid_argument("config: alg1-realized expects a realized-instance generator");
  if (config.mode == Mode::alg2_weak &&
      (generator != GeneratorKind::weak_planted && generator != GeneratorKind::fixture))
    throw std::invalid_argument("config: alg2-weak expects the weak-planted generator or a fixture");
  if ((config.override_m1 || config.tight_m1) && config.mode != Mode::alg2_weak)
    throw std::invalid_argument("config: m1 override applies to alg2-weak only");
}

// --- fixtures ---------------------------------------------------------------

namespace detail {
inline std::pair<std::size_t, std::size_t> line_column_of(const std::string& text,
                                                          std::size_t byte) {
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}
}  // namespace detail

/// Fixture schema: {"n": ..., "formula": "...", "support": [{"point": "+-+",
/// "mass": ...}], "flavor": "..."}. The flavor's validator must accept.
inline RealizedInstance import_fixture(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open fixture " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  std::string text = buffer.str();

  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    auto [line, column] = detail::line_column_of(text, e.byte);
    throw parse_error(std::string("fixture: ") + e.what(), line, column);
  }

  try {
    int n = j.at("n").get<int>();
    if (n < 1 || n > Example::max_dimension)
      throw parse_error("fixture: n out of range 1..64");
    DnfFormula formula = parse_dnf(j.at("formula").get<std::string>(), n);
    detail::check_small(formula, n);
    std::vector<std::pair<Example, double>> support;
    for (const auto& item : j.at("support")) {
      Example point = parse_example(item.at("point").get<std::string>());
      if (point.dimension() != n) throw parse_error("fixture: support point dimension mismatch");
      support.emplace_back(point, item.at("mass").get<double>());
    }
    ExplicitDistribution distribution(n, std::move(support));
    Flavor flavor = parse_flavor(j.at("flavor").get<std::string>());
    bool valid = flavor == Flavor::realized_evident
                     ? validate_realized(distribution, formula)
                     : validate_weakly_realized(distribution, formula);
    if (!valid)
      throw consistency_error("fixture: instance does not satisfy flavor '" +
                              lmq::to_string(flavor) + "'");
    return RealizedInstance{std::move(distribution), std::move(formula), flavor, std::nullopt};
  } catch (const nlohmann::json::exception& e) {
    throw parse_error(std::string("fixture: ") + e.what());
  }
}

inline void export_fixture(const RealizedInstance& instance, const std::string& path) {
  nlohmann::ordered_json j;
  j["n"] = instance.distribution.dimension();
  j["formula"] = lmq::to_string(instance.formula);
  nlohmann::ordered_json support = nlohmann::ordered_json::array();
  for (const auto& [point, mass] : instance.distribution.support())
    support.push_back({{"point", lmq::to_string(point)}, {"mass", mass}});
  j["support"] = support;
  j["flavor"] = lmq::to_string(instance.flavor);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write fixture " + path);
  out << j.dump(2) << '\n';
}

// --- conformance scans -------------------------------------------------------

struct ScanOutcome {
  long long checks = 0;
  long long violations = 0;
};

/// One random DNF (dimension 2..max_n, up to 5 terms): for every evident
/// (x, i) pair and every coordinate j, flipping j keeps the formula true
/// exactly when variable j is absent from term i.
inline ScanOutcome propeq_check_trial(int max_n, Rng& rng) {
  int n = rng.next_int(2, std::max(2, max_n));
  DnfFormula f = random_dnf(n, 5, rng);
  ScanOutcome outcome;
  for (const Example& x : enumerate_cube(n)) {
    for (std::size_t i = 0; i < f.term_count(); ++i) {
      if (!satisfies_evidently(f, i, x)) continue;
      for (int j = 1; j <= n; ++j) {
        ++outcome.checks;
        bool neighbor_positive = eval_dnf(f, flip(x, j)) == 1;
        bool variable_absent = !f.terms()[i].contains_variable(j);
        if (neighbor_positive != variable_absent) ++outcome.violations;
      }
    }
  }
  return outcome;
}

/// One random tree (dimension 2..max_n, up to n^2 leaves): the doubled formula
/// must agree with the tree through phi everywhere, make every positive point
/// evident, respect the leaf-count bound, and validate as realized under a
/// random lifted base distribution.
inline ScanOutcome reduction_check_trial(int max_n, Rng& rng) {
  int n = rng.next_int(2, std::max(2, max_n));
  DecisionTree tree = random_tree(n, rng.next_int(1, n * n), rng);
  ReductionOutput reduced = tree_to_dnf(tree);
  ScanOutcome outcome;

  ++outcome.checks;
  if (reduced.formula.term_count() > tree.leaf_count()) ++outcome.violations;

  for (const Example& x : enumerate_cube(n)) {
    ++outcome.checks;
    Label label = eval_tree(tree, x);
    if (label != eval_dnf(reduced.formula, phi(x))) {
      ++outcome.violations;
      continue;
    }
    if (label == 1) {
      ++outcome.checks;
      bool evident = false;
      for (std::size_t i = 0; i < reduced.formula.term_count() && !evident; ++i)
        evident = satisfies_evidently(reduced.formula, i, phi(x));
      if (!evident) ++outcome.violations;
    }
  }

  int count = rng.next_int(2, static_cast<int>(std::min<std::uint64_t>(16, std::uint64_t{1} << n)));
  std::vector<Example> points;
  std::unordered_set<Example> seen;
  for (int attempts = 0; static_cast<int>(points.size()) < count && attempts < 64 * count;
       ++attempts)
    detail::push_unique(points, seen, detail::random_point(n, rng));
  ExplicitDistribution base = ExplicitDistribution::uniform(points);
  ++outcome.checks;
  if (!validate_realized(lift_distribution(base), reduced.formula)) ++outcome.violations;
  return outcome;
}

// --- trial execution ---------------------------------------------------------

namespace detail {

struct TrialOutcome {
  TrialRecord record;
  long long checks = 0;
  long long violations = 0;
  long long true_terms_pruned = 0;
  std::string error;
};

inline RealizedInstance make_instance(const ExperimentConfig& config, GeneratorKind generator,
                                      const std::optional<RealizedInstance>& fixture, Rng& rng) {
  switch (generator) {
    case GeneratorKind::opposite_pair:
      return gen_opposite_pair_instance(config.n, config.d, rng);
    case GeneratorKind::from_tree:
      return gen_from_tree(config.n, config.d, rng);
    case GeneratorKind::weak_planted:
      return gen_weak_instance(config.n, config.d, rng);
    default:
      return *fixture;
  }
}

inline TrialOutcome run_trial(const ExperimentConfig& config, GeneratorKind generator,
                              const std::optional<RealizedInstance>& fixture, int trial_index) {
  TrialOutcome outcome;
  TrialRecord& record = outcome.record;
  record.seed = derive_trial_seed(config.seed, static_cast<std::uint64_t>(trial_index));
  record.n = config.n;
  Rng rng(record.seed);
  auto started = std::chrono::steady_clock::now();

  try {
    if (config.mode == Mode::propeq_check) {
      ScanOutcome scan = propeq_check_trial(config.n, rng);
      outcome.checks = scan.checks;
      outcome.violations = scan.violations;
    } else if (config.mode == Mode::reduction_check) {
      ScanOutcome scan = reduction_check_trial(config.n, rng);
      outcome.checks = scan.checks;
      outcome.violations = scan.violations;
    } else {
      RealizedInstance instance = make_instance(config, generator, fixture, rng);
      const DnfFormula& formula = instance.formula;
      const ExplicitDistribution& distribution = instance.distribution;
      record.n = distribution.dimension();
      record.d = static_cast<int>(formula.term_count());
      auto target = [&formula](const Example& x) { return eval_dnf(formula, x); };
      auto hypothesis_of = [](const DnfFormula& h) {
        return [&h](const Example& x) { return eval_dnf(h, x); };
      };

      if (config.mode == Mode::alg1_realized) {
        int plan_d = generator == GeneratorKind::fixture ? std::max(record.d, 1) : config.d;
        SampleSizePlan plan = plan_realized(config.epsilon, plan_d);
        record.m = plan.m;
        LabeledSample sample =
            draw_sample(distribution, target, static_cast<std::size_t>(plan.m), rng);
        record.positives = sample.positive_count();
        LocalMembershipOracle oracle(record.n, target, sample.examples(), 1);
        DnfFormula learned = algorithm1(sample, oracle);
        record.queries = oracle.meter();
        LossBreakdown loss = exact_loss(distribution, target, hypothesis_of(learned));
        record.loss = loss.loss;
        record.false_positive_mass = loss.false_positive_mass;
        record.false_negative_mass = loss.false_negative_mass;
      } else {  // alg2-weak
        long long m1;
        if (config.override_m1) {
          m1 = *config.override_m1;
        } else if (config.tight_m1) {
          double s_min = 1.0;
          for (std::size_t i = 0; i < formula.term_count(); ++i)
            s_min = std::min(s_min, evident_mass(distribution, formula, i));
          m1 = tight_building_sample_size(s_min, std::max(record.d, 1));
        } else {
          m1 = plan_weak(config.epsilon, record.n).m1;
        }
        long long m2 = checking_sample_size(m1, config.epsilon);
        record.m1 = m1;
        record.m2 = m2;
        LabeledSample building =
            draw_sample(distribution, target, static_cast<std::size_t>(m1), rng);
        LabeledSample checking =
            draw_sample(distribution, target, static_cast<std::size_t>(m2), rng);
        record.positives = building.positive_count();
        LocalMembershipOracle oracle(record.n, target, building.examples(), 1);
        std::vector<Term> candidates = build_candidate_terms(building, oracle);
        std::vector<Term> survivors = prune_false_terms(candidates, checking);
        record.queries = oracle.meter();
        for (const Term& t : formula.terms()) {
          bool was_candidate =
              std::find(candidates.begin(), candidates.end(), t) != candidates.end();
          bool survived = std::find(survivors.begin(), survivors.end(), t) != survivors.end();
          if (was_candidate && !survived) ++outcome.true_terms_pruned;
        }
        DnfFormula learned(record.n, std::move(survivors));
        LossBreakdown loss = exact_loss(distribution, target, hypothesis_of(learned));
        record.loss = loss.loss;
        record.false_positive_mass = loss.false_positive_mass;
        record.false_negative_mass = loss.false_negative_mass;
      }
    }
  } catch (const std::exception& e) {
    record.failed = true;
    outcome.error = e.what();
  }

  if (config.timings) {
    auto elapsed = std::chrono::steady_clock::now() - started;
    record.wall_ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count();
  }
  return outcome;
}

inline unsigned resolve_threads(const ExperimentConfig& config) {
  unsigned threads = config.threads;
  if (threads == 0) {
    if (const char* env = std::getenv("LMQLAB_THREADS")) {
      long parsed = std::strtol(env, nullptr, 10);
      if (parsed > 0) threads = static_cast<unsigned>(parsed);
    }
  }
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  return std::min<unsigned>(threads, static_cast<unsigned>(config.trials));
}

}  // namespace detail

// --- report writing ----------------------------------------------------------

inline std::string report_to_csv(const Report& report, const ExperimentConfig& config) {
  std::string out = csv_header() + '\n';
  for (const TrialRecord& r : report.records) out += to_csv_row(r) + '\n';
  const Summary& s = report.summary;
  out += "# mode=" + to_string(config.mode) + '\n';
  out += "# trials=" + std::to_string(s.trials) + '\n';
  out += "# failed=" + std::to_string(s.failed) + '\n';
  if (config.mode == Mode::alg1_realized || config.mode == Mode::alg2_weak) {
    out += "# threshold=" + format_double(s.threshold) + '\n';
    out += "# success_rate=" + format_double(s.success_rate) + '\n';
    out += "# mean_loss=" + format_double(s.mean_loss) + '\n';
    out += "# max_fp=" + format_double(s.max_false_positive_mass) + '\n';
    out += "# mean_queries=" + format_double(s.mean_queries) + '\n';
  }
  if (config.mode == Mode::alg2_weak)
    out += "# true_terms_pruned=" + std::to_string(s.true_terms_pruned) + '\n';
  if (config.mode == Mode::reduction_check || config.mode == Mode::propeq_check) {
    out += "# checks=" + std::to_string(s.checks) + '\n';
    out += "# violations=" + std::to_string(s.violations) + '\n';
  }
  return out;
}

inline std::string report_to_json(const Report& report, const ExperimentConfig& config) {
  nlohmann::ordered_json j;
  j["mode"] = to_string(config.mode);
  nlohmann::ordered_json records = nlohmann::ordered_json::array();
  for (const TrialRecord& r : report.records) {
    records.push_back({{"seed", r.seed},
                       {"n", r.n},
                       {"d", r.d},
                       {"m", r.m},
                       {"m1", r.m1},
                       {"m2", r.m2},
                       {"loss", r.loss},
                       {"fp", r.false_positive_mass},
                       {"fn", r.false_negative_mass},
                       {"queries", r.queries},
                       {"ms", r.wall_ms}});
  }
  j["records"] = records;
  nlohmann::ordered_json summary;
  summary["trials"] = report.summary.trials;
  summary["failed"] = report.summary.failed;
  if (config.mode == Mode::alg1_realized || config.mode == Mode::alg2_weak) {
    summary["threshold"] = report.summary.threshold;
    summary["success_rate"] = report.summary.success_rate;
    summary["mean_loss"] = report.summary.mean_loss;
    summary["max_fp"] = report.summary.max_false_positive_mass;
    summary["mean_queries"] = report.summary.mean_queries;
  }
  if (config.mode == Mode::alg2_weak)
    summary["true_terms_pruned"] = report.summary.true_terms_pruned;
  if (config.mode == Mode::reduction_check || config.mode == Mode::propeq_check) {
    summary["checks"] = report.summary.checks;
    summary["violations"] = report.summary.violations;
  }
  j["summary"] = summary;
  return j.dump(2) + '\n';
}

inline void write_report(const Report& report, const ExperimentConfig& config,
                         const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write report " + path);
  out << (config.format == ReportFormat::csv ? report_to_csv(report, config)
                                             : report_to_json(report, config));
}

/// Runs `trials` independent trials on a worker pool. Trial i always uses the
/// seed derived from (master seed, i), so records are identical whatever the
/// thread count; the report is assembled by trial index after all workers
/// join. Writes the report file when an output path is configured.
inline Report run(const ExperimentConfig& config) {
  validate(config);
  GeneratorKind generator = config.generator.value_or(default_generator(config.mode));
  std::optional<RealizedInstance> fixture;
  if (generator == GeneratorKind::fixture) fixture = import_fixture(config.fixture_path);

  std::vector<detail::TrialOutcome> outcomes(static_cast<std::size_t>(config.trials));
  std::atomic<int> next{0};
  std::mutex log_mutex;
  auto worker = [&] {
    while (true) {
      int index = next.fetch_add(1);
      if (index >= config.trials) return;
      detail::TrialOutcome outcome = detail::run_trial(config, generator, fixture, index);
      if (config.verbosity >= 1) {
        std::lock_guard<std::mutex> lock(log_mutex);
        if (outcome.record.failed) {
          std::cerr << "trial " << index << " FAILED: " << outcome.error << '\n';
        } else {
          std::cerr << "trial " << index << " seed=" << outcome.record.seed
                    << " loss=" << format_double(outcome.record.loss)
                    << " queries=" << outcome.record.queries << '\n';
        }
      }
      outcomes[static_cast<std::size_t>(index)] = std::move(outcome);
    }
  };

  unsigned thread_count = detail::resolve_threads(config);
  if (thread_count <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(thread_count);
    for (unsigned t = 0; t < thread_count; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  Report report;
  report.records.reserve(outcomes.size());
  Summary& summary = report.summary;
  summary.trials = config.trials;
  summary.threshold = 4.0 * config.epsilon;
  KahanSum loss_sum;
  double query_sum = 0.0;
  for (const detail::TrialOutcome& outcome : outcomes) {
    report.records.push_back(outcome.record);
    summary.failed += outcome.record.failed ? 1 : 0;
    summary.checks += outcome.checks;
    summary.violations += outcome.violations;
    summary.true_terms_pruned += outcome.true_terms_pruned;
    loss_sum.add(outcome.record.loss);
    query_sum += static_cast<double>(outcome.record.queries);
    summary.max_false_positive_mass =
        std::max(summary.max_false_positive_mass, outcome.record.false_positive_mass);
  }
  summary.mean_loss = loss_sum.value() / static_cast<double>(config.trials);
  summary.mean_queries = query_sum / static_cast<double>(config.trials);
  summary.success_rate = success_rate(report.records, summary.threshold);

  if (!config.out_path.empty()) write_report(report, config, config.out_path);
  return report;
}

}  // namespace lmq
