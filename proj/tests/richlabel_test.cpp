#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "lmq/richlabel.hpp"
#include "lmq/rng.hpp"
#include "support/corpus.hpp"

using namespace lmq::richlabel;

namespace {

RichDocument doc(std::string text, Sentiment label,
                 std::vector<IndicativePhrase> indicative = {}) {
  return RichDocument{std::move(text), label, std::move(indicative)};
}

std::string join(const std::vector<std::string>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

}  // namespace

TEST_CASE("preprocess applies the documented rules") {
  REQUIRE(preprocess("Check http://t.co/x #Perfect @bob!") ==
          std::vector<std::string>{"check", "URL", "perfect", "USR"});
  REQUIRE(preprocess("").empty());
  REQUIRE(preprocess(":) #Win") == std::vector<std::string>{":)", "win"});

  REQUIRE(preprocess("WWW.example.com HTTPS://x") == std::vector<std::string>{"URL", "URL"});
  REQUIRE(preprocess("don't STOP!!!") == std::vector<std::string>{"dont", "stop"});
  REQUIRE(preprocess("... @ ...").empty());  // bare punctuation drops out
  REQUIRE(preprocess("a <3 b :/") == std::vector<std::string>{"a", "<3", "b", ":/"});
}

TEST_CASE("preprocess is idempotent on its own output") {
  std::vector<std::string> inputs{
      "Check http://t.co/x #Perfect @bob!", ":) #Win so GOOD", "@a @bb www.c.d #e :P",
      "plain words only", "mixed CASE With 123 and !!!"};
  lmq::Rng rng(81);
  for (int trial = 0; trial < 30; ++trial) {
    std::string s;
    for (int w = 0; w < 6; ++w) {
      s += "w" + std::to_string(rng.next_below(100));
      s += rng.next_bool() ? "!" : "";
      s += ' ';
    }
    inputs.push_back(s);
  }
  for (const std::string& input : inputs) {
    std::vector<std::string> once = preprocess(input);
    REQUIRE(preprocess(join(once)) == once);
  }
}

TEST_CASE("featurize applies the document-frequency cutoff") {
  std::vector<RichDocument> corpus{doc("alpha beta", Sentiment::positive),
                                   doc("alpha gamma", Sentiment::negative)};
  FeaturizedCorpus shared = featurize(corpus, 1, 1);
  REQUIRE(shared.space.vocabulary == std::vector<std::string>{"alpha"});
  REQUIRE(shared.vectors == std::vector<std::vector<std::uint8_t>>{{1}, {1}});

  FeaturizedCorpus all = featurize(corpus, 1, 0);
  REQUIRE(all.space.vocabulary == std::vector<std::string>{"alpha", "beta", "gamma"});

  // presence stays binary however often a token repeats
  FeaturizedCorpus repeated = featurize({doc("go go go", Sentiment::neutral)}, 1, 0);
  REQUIRE(repeated.vectors == std::vector<std::vector<std::uint8_t>>{{1}});

  FeaturizedCorpus bigrams = featurize({doc("not good here", Sentiment::negative)}, 2, 0);
  REQUIRE(bigrams.space.vocabulary ==
          std::vector<std::string>{"good", "good here", "here", "not", "not good"});

  REQUIRE_THROWS_AS(featurize({}, 1, 0), std::invalid_argument);
  REQUIRE_THROWS_AS(featurize(corpus, 4, 0), std::invalid_argument);
  REQUIRE_THROWS_AS(featurize(corpus, 1, -1), std::invalid_argument);
}

TEST_CASE("user feature space intersects marked phrases with the base") {
  std::vector<RichDocument> corpus{
      doc("this is not good at all", Sentiment::negative,
          {{"not good", Sentiment::negative}}),
      doc("plain neutral words", Sentiment::neutral)};
  FeaturizedCorpus base = featurize(corpus, 2, 0);
  FeatureSpace user = user_feature_space(corpus, base.space);
  REQUIRE(user.vocabulary == std::vector<std::string>{"good", "not", "not good"});
  REQUIRE(user.origin == SpaceOrigin::user_acquired);

  for (const std::string& gram : user.vocabulary)
    REQUIRE(std::find(base.space.vocabulary.begin(), base.space.vocabulary.end(), gram) !=
            base.space.vocabulary.end());

  std::vector<RichDocument> unmarked{doc("nothing marked", Sentiment::positive)};
  FeaturizedCorpus base2 = featurize(unmarked, 1, 0);
  REQUIRE(user_feature_space(unmarked, base2.space).vocabulary.empty());

  // restriction produces coordinate sub-vectors of the base vectors
  std::vector<std::vector<std::uint8_t>> restricted =
      restrict_vectors(base.vectors, base.space, user);
  for (std::size_t i = 0; i < restricted.size(); ++i) {
    REQUIRE(restricted[i].size() == user.size());
    for (std::size_t f = 0; f < user.vocabulary.size(); ++f) {
      auto it = std::find(base.space.vocabulary.begin(), base.space.vocabulary.end(),
                          user.vocabulary[f]);
      std::size_t column = static_cast<std::size_t>(it - base.space.vocabulary.begin());
      REQUIRE(restricted[i][f] == base.vectors[i][column]);
    }
  }
  REQUIRE_THROWS_AS(
      restrict_vectors(base.vectors, base.space,
                       FeatureSpace{{"unseen"}, SpaceOrigin::user_acquired, 1}),
      std::invalid_argument);
}

TEST_CASE("naive bayes learns dominant likelihoods") {
  std::vector<RichDocument> corpus{doc("bad awful", Sentiment::negative),
                                   doc("table chair", Sentiment::neutral),
                                   doc("good great", Sentiment::positive)};
  FeaturizedCorpus base = featurize(corpus, 1, 0);
  std::vector<Sentiment> labels{Sentiment::negative, Sentiment::neutral, Sentiment::positive};
  NaiveBayes nb = NaiveBayes::train(base.vectors, labels, 0.1);

  for (std::size_t i = 0; i < corpus.size(); ++i)
    REQUIRE(nb.predict(base.vectors[i]) == labels[i]);

  // a feature seen only in positive documents
  std::size_t good_index = 0;
  while (base.space.vocabulary[good_index] != "good") ++good_index;
  REQUIRE(nb.feature_given_class(good_index, Sentiment::positive) >
          nb.feature_given_class(good_index, Sentiment::negative));
}

TEST_CASE("naive bayes posterior matches the hand-computed three-document oracle") {
  // vocabulary: bad, good, ok (sorted); one document per class
  std::vector<RichDocument> corpus{doc("bad", Sentiment::negative),
                                   doc("ok", Sentiment::neutral),
                                   doc("good", Sentiment::positive)};
  FeaturizedCorpus base = featurize(corpus, 1, 0);
  REQUIRE(base.space.vocabulary == std::vector<std::string>{"bad", "good", "ok"});
  std::vector<Sentiment> labels{Sentiment::negative, Sentiment::neutral, Sentiment::positive};
  double alpha = 0.1;
  NaiveBayes nb = NaiveBayes::train(base.vectors, labels, alpha);

  // query document "good": presence vector (0,1,0)
  std::vector<std::uint8_t> query{0, 1, 0};
  auto scores = nb.class_log_scores(query);

  double prior = std::log((1.0 + alpha) / (3.0 + 3.0 * alpha));  // every class has one document
  double present_hit = std::log((1.0 + alpha) / (1.0 + 2.0 * alpha));
  double present_miss = std::log((0.0 + alpha) / (1.0 + 2.0 * alpha));
  double absent_hit = std::log(1.0 - (1.0 + alpha) / (1.0 + 2.0 * alpha));
  double absent_miss = std::log(1.0 - (0.0 + alpha) / (1.0 + 2.0 * alpha));

  // negative class: bad absent (was present), good present (was absent), ok absent (was absent)
  double expected_negative = prior + absent_hit + present_miss + absent_miss;
  // positive class: bad absent, good present, ok absent
  double expected_positive = prior + absent_miss + present_hit + absent_miss;

  REQUIRE(std::abs(scores[0] - expected_negative) <= 1e-9);
  REQUIRE(std::abs(scores[2] - expected_positive) <= 1e-9);
  REQUIRE(nb.predict(query) == Sentiment::positive);
}

TEST_CASE("naive bayes handles an absent class via prior smoothing") {
  std::vector<std::vector<std::uint8_t>> vectors{{1, 0}, {0, 1}};
  std::vector<Sentiment> labels{Sentiment::negative, Sentiment::positive};
  NaiveBayes nb = NaiveBayes::train(vectors, labels, 0.1);
  REQUIRE(nb.predict({1, 0}) == Sentiment::negative);
  REQUIRE(nb.predict({0, 1}) == Sentiment::positive);
}

TEST_CASE("averaged F1") {
  ConfusionCounts perfect{3, 0, 0, 2, 0, 0};
  REQUIRE(averaged_f1(perfect) == 1.0);

  ConfusionCounts hand{2, 1, 0, 1, 0, 1};
  REQUIRE(std::abs(averaged_f1(hand) - 11.0 / 15.0) <= 1e-12);

  ConfusionCounts empty_pos{0, 0, 0, 1, 0, 0};
  REQUIRE(averaged_f1(empty_pos) == 0.5);  // F_pos falls back to 0

  ConfusionCounts swapped{1, 0, 1, 2, 1, 0};  // hand with pos/neg roles exchanged
  REQUIRE(std::abs(averaged_f1(swapped) - averaged_f1(hand)) <= 1e-15);
}

TEST_CASE("confusion counting") {
  std::vector<Sentiment> truth{Sentiment::positive, Sentiment::positive, Sentiment::negative,
                               Sentiment::neutral};
  std::vector<Sentiment> predicted{Sentiment::positive, Sentiment::neutral, Sentiment::positive,
                                   Sentiment::negative};
  ConfusionCounts c = count_confusion(truth, predicted);
  REQUIRE(c.tp_pos == 1);
  REQUIRE(c.fp_pos == 1);
  REQUIRE(c.fn_pos == 1);
  REQUIRE(c.tp_neg == 0);
  REQUIRE(c.fp_neg == 1);
  REQUIRE(c.fn_neg == 1);
}

TEST_CASE("filter selection ranks by mutual information") {
  // feature 0 mirrors the label exactly, features 1..3 are constants/noise
  std::vector<std::vector<std::uint8_t>> vectors;
  std::vector<Sentiment> labels;
  for (int i = 0; i < 30; ++i) {
    Sentiment label = static_cast<Sentiment>(i % 3);
    std::vector<std::uint8_t> v(4, 0);
    v[0] = label == Sentiment::positive ? 1 : 0;
    v[1] = 1;
    v[2] = static_cast<std::uint8_t>(i % 2);
    labels.push_back(label);
    vectors.push_back(v);
  }
  FeaturizedCorpus corpus;
  corpus.space.vocabulary = {"aa", "bb", "cc", "dd"};
  corpus.space.max_n = 1;
  corpus.vectors = vectors;

  FeatureSpace one = filter_select(corpus, labels, 1);
  REQUIRE(one.vocabulary == std::vector<std::string>{"aa"});
  REQUIRE(one.origin == SpaceOrigin::filter);

  FeatureSpace all = filter_select(corpus, labels, 4);
  REQUIRE(all.vocabulary == corpus.space.vocabulary);

  REQUIRE_THROWS_AS(filter_select(corpus, labels, 0), std::invalid_argument);
  REQUIRE_THROWS_AS(filter_select(corpus, labels, 5), std::invalid_argument);
}

TEST_CASE("filter recovers 5 informative features among 50 noise features") {
  lmq::Rng rng(86);
  std::vector<std::vector<std::uint8_t>> vectors;
  std::vector<Sentiment> labels;
  for (int i = 0; i < 90; ++i) {
    Sentiment label = static_cast<Sentiment>(i % 3);
    std::vector<std::uint8_t> v(55, 0);
    // features 0..4 fire on deterministic class-dependent patterns
    v[0] = label == Sentiment::positive ? 1 : 0;
    v[1] = label == Sentiment::negative ? 1 : 0;
    v[2] = label == Sentiment::neutral ? 1 : 0;
    v[3] = label != Sentiment::neutral ? 1 : 0;
    v[4] = label == Sentiment::positive ? 0 : 1;
    for (int f = 5; f < 55; ++f) v[static_cast<std::size_t>(f)] = rng.next_bool() ? 1 : 0;
    labels.push_back(label);
    vectors.push_back(v);
  }
  FeaturizedCorpus corpus;
  corpus.space.max_n = 1;
  for (int f = 0; f < 55; ++f)
    corpus.space.vocabulary.push_back((f < 5 ? "sig" : f < 10 ? "zz0" : "zz") +
                                      std::to_string(f));
  corpus.vectors = vectors;

  FeatureSpace selected = filter_select(corpus, labels, 5);
  REQUIRE(selected.vocabulary ==
          std::vector<std::string>{"sig0", "sig1", "sig2", "sig3", "sig4"});
}

TEST_CASE("filter recovers planted informative features among noise") {
  lmq::Rng rng(82);
  std::vector<RichDocument> corpus = testsupport::synthetic_corpus(120, rng);
  FeaturizedCorpus base = featurize(corpus, 1, 0);
  std::vector<Sentiment> labels;
  for (const RichDocument& d : corpus) labels.push_back(d.label);

  FeatureSpace user = user_feature_space(corpus, base.space);
  REQUIRE(user.size() == 10);  // the five positive and five negative signal words

  FeatureSpace selected = filter_select(base, labels, user.size());
  for (const std::string& gram : user.vocabulary)
    REQUIRE(std::find(selected.vocabulary.begin(), selected.vocabulary.end(), gram) !=
            selected.vocabulary.end());
}

TEST_CASE("backward elimination removes uninformative features first") {
  std::vector<std::vector<std::uint8_t>> vectors;
  std::vector<Sentiment> labels;
  lmq::Rng rng(83);
  for (int i = 0; i < 42; ++i) {
    // three classes so that neither indicator feature is redundant
    Sentiment label = static_cast<Sentiment>(i % 3);
    std::vector<std::uint8_t> v(3, 0);
    v[0] = label == Sentiment::negative ? 1 : 0;
    v[1] = static_cast<std::uint8_t>(rng.next_bool() ? 1 : 0);
    v[2] = label == Sentiment::positive ? 1 : 0;
    labels.push_back(label);
    vectors.push_back(v);
  }
  FeaturizedCorpus corpus;
  corpus.space.vocabulary = {"neg", "noise", "pos"};
  corpus.space.max_n = 1;
  corpus.vectors = vectors;

  FeatureSpace kept = backward_eliminate(corpus, labels, 2, 0.2, 7, 0.1);
  REQUIRE(kept.vocabulary == std::vector<std::string>{"neg", "pos"});
  REQUIRE(kept.origin == SpaceOrigin::backward_elimination);

  FeatureSpace identity = backward_eliminate(corpus, labels, 3, 0.2, 7, 0.1);
  REQUIRE(identity.vocabulary == corpus.space.vocabulary);

  REQUIRE_THROWS_AS(backward_eliminate(corpus, labels, 0), std::invalid_argument);
}

TEST_CASE("corpus files round-trip and report malformed lines") {
  std::vector<RichDocument> corpus{
      doc("so good :)", Sentiment::positive, {{"good", Sentiment::positive}}),
      doc("meh", Sentiment::neutral)};
  std::string path = "richlabel_corpus_roundtrip.jsonl";
  save_corpus(corpus, path);
  std::vector<RichDocument> loaded = load_corpus(path);
  REQUIRE(loaded.size() == 2);
  REQUIRE(loaded[0].text == "so good :)");
  REQUIRE(loaded[0].label == Sentiment::positive);
  REQUIRE(loaded[0].indicative.size() == 1);
  REQUIRE(loaded[0].indicative[0].phrase == "good");
  REQUIRE(loaded[1].indicative.empty());
  std::remove(path.c_str());

  std::string bad_path = "richlabel_corpus_bad.jsonl";
  {
    std::ofstream out(bad_path);
    out << R"({"text": "fine", "label": "neutral", "indicative": []})" << '\n';
    out << "{not json}\n";
  }
  try {
    load_corpus(bad_path);
    FAIL("expected parse_error");
  } catch (const lmq::parse_error& e) {
    REQUIRE(e.line() == 2);
  }
  std::remove(bad_path.c_str());

  std::string unknown_path = "richlabel_corpus_unknown.jsonl";
  {
    std::ofstream out(unknown_path);
    out << R"({"text": "x", "label": "angry", "indicative": []})" << '\n';
  }
  REQUIRE_THROWS_AS(load_corpus(unknown_path), lmq::parse_error);
  std::remove(unknown_path.c_str());
}

TEST_CASE("sweep produces one row per fraction and restricted spaces shrink") {
  lmq::Rng rng(84);
  std::vector<RichDocument> corpus = testsupport::synthetic_corpus(90, rng);

  SweepOptions options;
  options.train_fractions = {0.5, 1.0};
  options.seed = 11;
  options.selection = Selection::user;
  std::vector<SweepRow> rows = run_sweep(corpus, options);
  REQUIRE(rows.size() == 2);
  REQUIRE(rows[0].space == "user-acquired");
  REQUIRE(rows[0].size <= rows[1].size);
  for (const SweepRow& row : rows) {
    REQUIRE(row.train_f1 >= 0.0);
    REQUIRE(row.train_f1 <= 1.0);
    REQUIRE(row.test_f1 >= 0.0);
    REQUIRE(row.test_f1 <= 1.0);
  }
}

TEST_CASE("estimation gap: user-acquired features overfit less than the full space") {
  lmq::Rng rng(85);
  std::vector<RichDocument> corpus = testsupport::synthetic_corpus(240, rng);

  SweepOptions options;
  options.train_fractions = {0.2, 0.5, 1.0};
  options.seed = 17;

  options.selection = Selection::none;
  std::vector<SweepRow> full = run_sweep(corpus, options);
  options.selection = Selection::user;
  std::vector<SweepRow> user = run_sweep(corpus, options);

  REQUIRE(full.size() == user.size());
  for (std::size_t i = 0; i < full.size(); ++i) {
    double full_gap = full[i].train_f1 - full[i].test_f1;
    double user_gap = user[i].train_f1 - user[i].test_f1;
    REQUIRE(user_gap <= full_gap);
  }
}

TEST_CASE("most informative features ranking") {
  std::vector<RichDocument> corpus{doc("good win", Sentiment::positive),
                                   doc("good great", Sentiment::positive),
                                   doc("bad sad", Sentiment::negative),
                                   doc("table", Sentiment::neutral)};
  FeaturizedCorpus base = featurize(corpus, 1, 0);
  std::vector<Sentiment> labels{Sentiment::positive, Sentiment::positive, Sentiment::negative,
                                Sentiment::neutral};
  NaiveBayes nb = NaiveBayes::train(base.vectors, labels, 0.1);
  auto top = most_informative(nb, base.space, Sentiment::positive, 1);
  REQUIRE(top.size() == 1);
  REQUIRE(top[0].first == "good");  // present in both positive documents
}
