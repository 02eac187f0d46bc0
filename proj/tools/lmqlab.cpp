// lmqlab: experiment driver for the local-membership-query learning lab.
//
// Learning/check modes run seeded trial sweeps and write CSV/JSON reports;
// richlabel mode runs the annotation-driven feature-selection pipeline on a
// JSON-lines corpus. See README.md for the full interface.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lmq/harness.hpp"
#include "lmq/richlabel.hpp"

namespace {

std::vector<double> parse_fraction_list(const std::string& text) {
  std::vector<double> fractions;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t comma = text.find(',', start);
    std::string piece = text.substr(start, comma == std::string::npos ? comma : comma - start);
    if (!piece.empty()) fractions.push_back(std::stod(piece));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (fractions.empty()) throw std::invalid_argument("--train-frac: empty list");
  return fractions;
}

int run_richlabel(const std::string& corpus_path, int max_n, int cutoff,
                  const std::string& select, double alpha, const std::string& train_frac,
                  std::uint64_t seed, const std::string& out_path, int top_features) {
  using namespace lmq::richlabel;
  std::vector<RichDocument> corpus = load_corpus(corpus_path);

  SweepOptions options;
  options.max_n = max_n;
  options.cutoff = cutoff;
  options.selection = parse_selection(select);
  options.alpha = alpha;
  options.train_fractions = parse_fraction_list(train_frac);
  options.seed = seed;
  std::vector<SweepRow> rows = run_sweep(corpus, options);

  std::string csv = sweep_csv_header() + '\n';
  for (const SweepRow& row : rows) csv += to_csv_row(row) + '\n';
  if (out_path.empty()) {
    std::cout << csv;
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    out << csv;
    std::cout << "rows: " << rows.size() << '\n';
  }

  if (top_features > 0) {
    FeaturizedCorpus base = featurize(corpus, max_n, cutoff);
    std::vector<Sentiment> labels;
    for (const RichDocument& doc : corpus) labels.push_back(doc.label);
    NaiveBayes nb = NaiveBayes::train(base.vectors, labels, alpha);
    for (Sentiment c : {Sentiment::negative, Sentiment::neutral, Sentiment::positive}) {
      std::cout << "# most informative for " << to_string(c) << ":\n";
      for (const auto& [gram, p] :
           most_informative(nb, base.space, c, static_cast<std::size_t>(top_features)))
        std::cout << gram << ' ' << lmq::format_double(p) << '\n';
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"local membership query learning lab"};
  app.get_formatter()->column_width(34);

  std::string mode = "alg1-realized";
  lmq::ExperimentConfig config;
  std::string generator;
  std::string override_m1;
  std::string format = "csv";
  std::string emit_fixture;

  std::string corpus_path;
  int max_n = 1;
  int cutoff = 0;
  std::string select = "none";
  double alpha = 0.1;
  std::string train_frac = "1.0";
  int top_features = 0;

  app.add_option("--mode", mode,
                 "alg1-realized | alg2-weak | reduction-check | propeq-check | richlabel");
  app.add_option("--n", config.n, "instance dimension (base tree dimension for from-tree)");
  app.add_option("--d", config.d, "term bound (leaf budget for from-tree)");
  app.add_option("--epsilon", config.epsilon, "target accuracy in (0,1)");
  app.add_option("--trials", config.trials, "number of independent trials");
  app.add_option("--seed", config.seed, "master seed; trial i uses a derived seed");
  app.add_option("--generator", generator,
                 "opposite-pair | from-tree | weak-planted | fixture:<path>");
  app.add_option("--override-m1", override_m1,
                 "alg2-weak building-sample override: an integer or 'tight' (replaces the analyzed bound)");
  app.add_option("--out", config.out_path, "report file path");
  app.add_option("--format", format, "csv | json");
  app.add_option("--verbosity", config.verbosity, "1 logs a line per trial to stderr");
  app.add_flag("--timings", config.timings,
               "fill the ms column with wall-clock times (reports stop being byte-identical)");
  app.add_option("--emit-fixture", emit_fixture,
                 "generate one instance, write it as a fixture, and exit");

  app.add_option("--corpus", corpus_path, "richlabel: JSON-lines corpus path");
  app.add_option("--max-n", max_n, "richlabel: n-gram order (1, 2 or 3)");
  app.add_option("--cutoff", cutoff, "richlabel: drop n-grams in <= cutoff documents");
  app.add_option("--select", select, "richlabel: none | user | filter | backward");
  app.add_option("--alpha", alpha, "richlabel: Naive Bayes smoothing");
  app.add_option("--train-frac", train_frac, "richlabel: comma-separated training fractions");
  app.add_option("--top-features", top_features, "richlabel: print top-k P(f|c) rankings");

  CLI11_PARSE(app, argc, argv);

  try {
    if (mode == "richlabel") {
      if (corpus_path.empty()) throw std::invalid_argument("richlabel mode needs --corpus");
      return run_richlabel(corpus_path, max_n, cutoff, select, alpha, train_frac, config.seed,
                           config.out_path, top_features);
    }

    config.mode = lmq::parse_mode(mode);
    if (!generator.empty()) {
      if (generator.rfind("fixture:", 0) == 0) {
        config.generator = lmq::GeneratorKind::fixture;
        config.fixture_path = generator.substr(8);
      } else if (generator == "opposite-pair") {
        config.generator = lmq::GeneratorKind::opposite_pair;
      } else if (generator == "from-tree") {
        config.generator = lmq::GeneratorKind::from_tree;
      } else if (generator == "weak-planted") {
        config.generator = lmq::GeneratorKind::weak_planted;
      } else {
        throw std::invalid_argument("unknown generator '" + generator + "'");
      }
    }
    if (!override_m1.empty()) {
      if (override_m1 == "tight")
        config.tight_m1 = true;
      else
        config.override_m1 = std::stoll(override_m1);
    }
    if (format == "csv") {
      config.format = lmq::ReportFormat::csv;
    } else if (format == "json") {
      config.format = lmq::ReportFormat::json;
    } else {
      throw std::invalid_argument("unknown format '" + format + "'");
    }

    if (!emit_fixture.empty()) {
      lmq::Rng rng(config.seed);
      lmq::GeneratorKind kind = config.generator.value_or(lmq::default_generator(config.mode));
      lmq::RealizedInstance instance =
          lmq::detail::make_instance(config, kind, std::nullopt, rng);
      lmq::export_fixture(instance, emit_fixture);
      std::cout << "fixture written to " << emit_fixture << '\n';
      return 0;
    }

    lmq::Report report = lmq::run(config);
    const lmq::Summary& s = report.summary;
    std::cout << "trials: " << s.trials << '\n';
    std::cout << "failed: " << s.failed << '\n';
    if (config.mode == lmq::Mode::alg1_realized || config.mode == lmq::Mode::alg2_weak) {
      std::cout << "success_rate(loss < " << lmq::format_double(s.threshold)
                << "): " << lmq::format_double(s.success_rate) << '\n';
      std::cout << "mean_loss: " << lmq::format_double(s.mean_loss) << '\n';
      std::cout << "max_fp: " << lmq::format_double(s.max_false_positive_mass) << '\n';
      std::cout << "mean_queries: " << lmq::format_double(s.mean_queries) << '\n';
    }
    if (config.mode == lmq::Mode::alg2_weak)
      std::cout << "true_terms_pruned: " << s.true_terms_pruned << '\n';
    if (config.mode == lmq::Mode::reduction_check || config.mode == lmq::Mode::propeq_check) {
      std::cout << "checks: " << s.checks << '\n';
      std::cout << "violations: " << s.violations << '\n';
    }
    bool bad = s.failed > 0 || ((config.mode == lmq::Mode::reduction_check ||
                                 config.mode == lmq::Mode::propeq_check) &&
                                s.violations > 0);
    return bad ? 1 : 0;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
