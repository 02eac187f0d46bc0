#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "lmq/error.hpp"
#include "lmq/numeric.hpp"
#include "lmq/rng.hpp"

namespace lmq::richlabel {

enum class Sentiment { negative = 0, neutral = 1, positive = 2 };

inline std::string to_string(Sentiment s) {
  switch (s) {
    case Sentiment::negative:
      return "negative";
    case Sentiment::neutral:
      return "neutral";
    default:
      return "positive";
  }
}

inline Sentiment parse_sentiment(std::string_view text) {
  if (text == "negative") return Sentiment::negative;
  if (text == "neutral") return Sentiment::neutral;
  if (text == "positive") return Sentiment::positive;
  throw parse_error("unknown label '" + std::string(text) + "'");
}

struct IndicativePhrase {
  std::string phrase;
  Sentiment polarity;  // negative or positive only
};

struct RichDocument {
  std::string text;
  Sentiment label = Sentiment::neutral;
  std::vector<IndicativePhrase> indicative;
};

/// Smileys that survive punctuation stripping. The set is a documented
/// default, not a claim; extend via the overload taking a custom set.
inline const std::vector<std::string>& default_smileys() {
  static const std::vector<std::string> smileys{":)", ":(", ":D", ":P", ";)", ":/", "<3"};
  return smileys;
}

namespace detail {

inline bool has_prefix_ci(std::string_view s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i)
    if (std::tolower(static_cast<unsigned char>(s[i])) != prefix[i]) return false;
  return true;
}

}  // namespace detail

/// Tokenization rules, applied per whitespace token: hyperlinks become the
/// meta-word URL, @-mentions become USR, a leading '#' is stripped, smileys
/// are preserved verbatim, everything else is lowercased with punctuation
/// removed. Idempotent on its own output (URL/USR pass through unchanged).
inline std::vector<std::string> preprocess(std::string_view text,
                                           const std::vector<std::string>& smileys =
                                               default_smileys()) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i == start) break;
    std::string_view token = text.substr(start, i - start);

    if (token == "URL" || token == "USR") {
      out.emplace_back(token);
      continue;
    }
    if (detail::has_prefix_ci(token, "http://") || detail::has_prefix_ci(token, "https://") ||
        detail::has_prefix_ci(token, "www.")) {
      out.emplace_back("URL");
      continue;
    }
    if (token.size() > 1 && token.front() == '@') {
      out.emplace_back("USR");
      continue;
    }
    while (!token.empty() && token.front() == '#') token.remove_prefix(1);
    if (std::find(smileys.begin(), smileys.end(), token) != smileys.end()) {
      out.emplace_back(token);
      continue;
    }
    std::string cleaned;
    for (char c : token) {
      unsigned char u = static_cast<unsigned char>(c);
      if (std::isalnum(u) || u >= 0x80) cleaned.push_back(static_cast<char>(std::tolower(u)));
    }
    if (!cleaned.empty()) out.push_back(std::move(cleaned));
  }
  return out;
}

enum class SpaceOrigin { full_after_cutoff, user_acquired, filter, backward_elimination };

inline std::string to_string(SpaceOrigin origin) {
  switch (origin) {
    case SpaceOrigin::full_after_cutoff:
      return "full-after-cutoff";
    case SpaceOrigin::user_acquired:
      return "user-acquired";
    case SpaceOrigin::filter:
      return "filter";
    default:
      return "backward-elimination";
  }
}

/// Ordered n-gram vocabulary. Lexicographic order keeps every downstream
/// ranking and report deterministic.
struct FeatureSpace {
  std::vector<std::string> vocabulary;  // sorted, no duplicates
  SpaceOrigin origin = SpaceOrigin::full_after_cutoff;
  int max_n = 1;

  std::size_t size() const { return vocabulary.size(); }
};

namespace detail {

inline std::vector<std::string> ngrams(const std::vector<std::string>& tokens, int max_n) {
  std::vector<std::string> grams;
  for (int g = 1; g <= max_n; ++g) {
    if (tokens.size() + 1 < static_cast<std::size_t>(g) + 1) break;
    for (std::size_t i = 0; i + static_cast<std::size_t>(g) <= tokens.size(); ++i) {
      std::string gram = tokens[i];
      for (std::size_t k = 1; k < static_cast<std::size_t>(g); ++k) {
        gram += ' ';
        gram += tokens[i + k];
      }
      grams.push_back(std::move(gram));
    }
  }
  return grams;
}

}  // namespace detail

/// Binary presence vector of a document over a feature space.
inline std::vector<std::uint8_t> vectorize(const RichDocument& doc, const FeatureSpace& space) {
  std::unordered_set<std::string> present;
  for (std::string& g : detail::ngrams(preprocess(doc.text), space.max_n))
    present.insert(std::move(g));
  std::vector<std::uint8_t> v(space.vocabulary.size(), 0);
  for (std::size_t i = 0; i < space.vocabulary.size(); ++i)
    v[i] = present.count(space.vocabulary[i]) ? 1 : 0;
  return v;
}

struct FeaturizedCorpus {
  FeatureSpace space;
  std::vector<std::vector<std::uint8_t>> vectors;  // one presence vector per document
};

/// Vocabulary of all n-grams appearing in more than `cutoff` distinct
/// documents, plus the presence vectors of the corpus.
inline FeaturizedCorpus featurize(const std::vector<RichDocument>& corpus, int max_n, int cutoff) {
  if (corpus.empty()) throw std::invalid_argument("featurize: empty corpus");
  if (max_n < 1 || max_n > 3) throw std::invalid_argument("featurize: max_n must be 1, 2 or 3");
  if (cutoff < 0) throw std::invalid_argument("featurize: cutoff must be >= 0");

  std::map<std::string, int> document_frequency;  // ordered: vocabulary comes out sorted
  for (const RichDocument& doc : corpus) {
    std::unordered_set<std::string> in_doc;
    for (std::string& g : detail::ngrams(preprocess(doc.text), max_n))
      in_doc.insert(std::move(g));
    for (const std::string& g : in_doc) ++document_frequency[g];
  }

  FeaturizedCorpus out;
  out.space.origin = SpaceOrigin::full_after_cutoff;
  out.space.max_n = max_n;
  for (const auto& [gram, df] : document_frequency)
    if (df > cutoff) out.space.vocabulary.push_back(gram);

  out.vectors.reserve(corpus.size());
  for (const RichDocument& doc : corpus) out.vectors.push_back(vectorize(doc, out.space));
  return out;
}

/// Intersection of the base vocabulary with the n-grams derivable from the
/// documents' indicative phrases (same preprocessing, same n-gram orders).
inline FeatureSpace user_feature_space(const std::vector<RichDocument>& corpus,
                                       const FeatureSpace& base) {
  std::unordered_set<std::string> marked;
  for (const RichDocument& doc : corpus)
    for (const IndicativePhrase& ip : doc.indicative)
      for (std::string& g : detail::ngrams(preprocess(ip.phrase), base.max_n))
        marked.insert(std::move(g));
  FeatureSpace out;
  out.origin = SpaceOrigin::user_acquired;
  out.max_n = base.max_n;
  for (const std::string& gram : base.vocabulary)
    if (marked.count(gram)) out.vocabulary.push_back(gram);
  return out;
}

/// Columns of `vectors` restricted to a subspace of `base`.
inline std::vector<std::vector<std::uint8_t>> restrict_vectors(
    const std::vector<std::vector<std::uint8_t>>& vectors, const FeatureSpace& base,
    const FeatureSpace& sub) {
  std::vector<std::size_t> columns;
  columns.reserve(sub.vocabulary.size());
  for (const std::string& gram : sub.vocabulary) {
    auto it = std::lower_bound(base.vocabulary.begin(), base.vocabulary.end(), gram);
    if (it == base.vocabulary.end() || *it != gram)
      throw std::invalid_argument("restrict_vectors: feature '" + gram + "' not in base space");
    columns.push_back(static_cast<std::size_t>(it - base.vocabulary.begin()));
  }
  std::vector<std::vector<std::uint8_t>> out;
  out.reserve(vectors.size());
  for (const auto& v : vectors) {
    std::vector<std::uint8_t> row;
    row.reserve(columns.size());
    for (std::size_t c : columns) row.push_back(v.at(c));
    out.push_back(std::move(row));
  }
  return out;
}

inline constexpr std::size_t kClassCount = 3;

/// Bernoulli Naive Bayes over presence bits, three classes, additive
/// smoothing on both the per-feature likelihoods and the class priors.
/// Ties break toward the smaller class index (negative < neutral < positive).
class NaiveBayes {
 public:
  static NaiveBayes train(const std::vector<std::vector<std::uint8_t>>& vectors,
                          const std::vector<Sentiment>& labels, double alpha) {
    if (vectors.size() != labels.size())
      throw std::invalid_argument("NaiveBayes: vectors/labels size mismatch");
    if (vectors.empty()) throw std::invalid_argument("NaiveBayes: empty training data");
    if (!(alpha > 0.0)) throw std::invalid_argument("NaiveBayes: alpha must be positive");
    std::size_t features = vectors.front().size();
    for (const auto& v : vectors)
      if (v.size() != features)
        throw std::invalid_argument("NaiveBayes: inconsistent vector widths");

    NaiveBayes nb;
    nb.feature_count_ = features;
    std::array<double, kClassCount> class_docs{};
    std::array<std::vector<double>, kClassCount> present_docs;
    for (auto& p : present_docs) p.assign(features, 0.0);
    for (std::size_t i = 0; i < vectors.size(); ++i) {
      std::size_t c = static_cast<std::size_t>(labels[i]);
      class_docs[c] += 1.0;
      for (std::size_t f = 0; f < features; ++f)
        if (vectors[i][f]) present_docs[c][f] += 1.0;
    }
    double total = static_cast<double>(vectors.size());
    for (std::size_t c = 0; c < kClassCount; ++c) {
      nb.log_prior_[c] =
          std::log((class_docs[c] + alpha) / (total + alpha * static_cast<double>(kClassCount)));
      nb.present_probability_[c].resize(features);
      nb.log_present_[c].resize(features);
      nb.log_absent_[c].resize(features);
      for (std::size_t f = 0; f < features; ++f) {
        double p = (present_docs[c][f] + alpha) / (class_docs[c] + 2.0 * alpha);
        nb.present_probability_[c][f] = p;
        nb.log_present_[c][f] = std::log(p);
        nb.log_absent_[c][f] = std::log(1.0 - p);
      }
    }
    return nb;
  }

  std::array<double, kClassCount> class_log_scores(const std::vector<std::uint8_t>& v) const {
    if (v.size() != feature_count_)
      throw std::invalid_argument("NaiveBayes: vector width mismatch");
    std::array<double, kClassCount> scores{};
    for (std::size_t c = 0; c < kClassCount; ++c) {
      double score = log_prior_[c];
      for (std::size_t f = 0; f < feature_count_; ++f)
        score += v[f] ? log_present_[c][f] : log_absent_[c][f];
      scores[c] = score;
    }
    return scores;
  }

  Sentiment predict(const std::vector<std::uint8_t>& v) const {
    std::array<double, kClassCount> scores = class_log_scores(v);
    std::size_t best = 0;
    for (std::size_t c = 1; c < kClassCount; ++c)
      if (scores[c] > scores[best]) best = c;
    return static_cast<Sentiment>(best);
  }

  /// Smoothed P(feature | class); the informativeness diagnostic sorts on it.
  double feature_given_class(std::size_t feature, Sentiment c) const {
    return present_probability_[static_cast<std::size_t>(c)].at(feature);
  }

  std::size_t feature_count() const { return feature_count_; }

 private:
  std::size_t feature_count_ = 0;
  std::array<double, kClassCount> log_prior_{};
  std::array<std::vector<double>, kClassCount> present_probability_;
  std::array<std::vector<double>, kClassCount> log_present_;
  std::array<std::vector<double>, kClassCount> log_absent_;
};

struct ConfusionCounts {
  long long tp_pos = 0, fp_pos = 0, fn_pos = 0;
  long long tp_neg = 0, fp_neg = 0, fn_neg = 0;
};

inline ConfusionCounts count_confusion(const std::vector<Sentiment>& truth,
                                       const std::vector<Sentiment>& predicted) {
  if (truth.size() != predicted.size())
    throw std::invalid_argument("count_confusion: size mismatch");
  ConfusionCounts c;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (predicted[i] == Sentiment::positive) {
      (truth[i] == Sentiment::positive ? c.tp_pos : c.fp_pos) += 1;
    }
    if (truth[i] == Sentiment::positive && predicted[i] != Sentiment::positive) c.fn_pos += 1;
    if (predicted[i] == Sentiment::negative) {
      (truth[i] == Sentiment::negative ? c.tp_neg : c.fp_neg) += 1;
    }
    if (truth[i] == Sentiment::negative && predicted[i] != Sentiment::negative) c.fn_neg += 1;
  }
  return c;
}

namespace detail {
// zero denominators yield 0 by convention
inline double ratio(long long num, long long den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

inline double f_score(long long tp, long long fp, long long fn) {
  double p = ratio(tp, tp + fp);
  double r = ratio(tp, tp + fn);
  return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}
}  // namespace detail

inline double precision_pos(const ConfusionCounts& c) {
  return detail::ratio(c.tp_pos, c.tp_pos + c.fp_pos);
}
inline double recall_pos(const ConfusionCounts& c) {
  return detail::ratio(c.tp_pos, c.tp_pos + c.fn_pos);
}
inline double precision_neg(const ConfusionCounts& c) {
  return detail::ratio(c.tp_neg, c.tp_neg + c.fp_neg);
}
inline double recall_neg(const ConfusionCounts& c) {
  return detail::ratio(c.tp_neg, c.tp_neg + c.fn_neg);
}

/// Mean of the positive-class and negative-class F1 scores.
inline double averaged_f1(const ConfusionCounts& c) {
  double f_pos = detail::f_score(c.tp_pos, c.fp_pos, c.fn_pos);
  double f_neg = detail::f_score(c.tp_neg, c.fp_neg, c.fn_neg);
  return 0.5 * (f_pos + f_neg);
}

/// Mutual information between a binary feature and the 3-class label,
/// estimated from counts; 0 log 0 terms are dropped.
inline double mutual_information(const std::vector<std::vector<std::uint8_t>>& vectors,
                                 const std::vector<Sentiment>& labels, std::size_t feature) {
  double total = static_cast<double>(vectors.size());
  std::array<std::array<double, kClassCount>, 2> joint{};
  for (std::size_t i = 0; i < vectors.size(); ++i)
    joint[vectors[i][feature] ? 1 : 0][static_cast<std::size_t>(labels[i])] += 1.0;
  std::array<double, 2> value_marginal{};
  std::array<double, kClassCount> class_marginal{};
  for (int v = 0; v < 2; ++v)
    for (std::size_t c = 0; c < kClassCount; ++c) {
      value_marginal[static_cast<std::size_t>(v)] += joint[static_cast<std::size_t>(v)][c];
      class_marginal[c] += joint[static_cast<std::size_t>(v)][c];
    }
  double mi = 0.0;
  for (int v = 0; v < 2; ++v)
    for (std::size_t c = 0; c < kClassCount; ++c) {
      double j = joint[static_cast<std::size_t>(v)][c];
      if (j == 0.0) continue;
      mi += (j / total) *
            std::log(j * total / (value_marginal[static_cast<std::size_t>(v)] * class_marginal[c]));
    }
  return mi;
}

/// Keeps the k features with the largest mutual information with the label;
/// ties break toward the lexicographically smaller feature.
inline FeatureSpace filter_select(const FeaturizedCorpus& corpus,
                                  const std::vector<Sentiment>& labels, std::size_t k) {
  if (k < 1 || k > corpus.space.size())
    throw std::invalid_argument("filter_select: k out of range 1..|base|");
  if (corpus.vectors.size() != labels.size())
    throw std::invalid_argument("filter_select: vectors/labels size mismatch");
  std::vector<std::pair<double, std::size_t>> ranked;
  ranked.reserve(corpus.space.size());
  for (std::size_t f = 0; f < corpus.space.size(); ++f)
    ranked.emplace_back(mutual_information(corpus.vectors, labels, f), f);
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;  // vocabulary is sorted, so index order is lexicographic
  });
  std::vector<std::size_t> chosen;
  chosen.reserve(k);
  for (std::size_t i = 0; i < k; ++i) chosen.push_back(ranked[i].second);
  std::sort(chosen.begin(), chosen.end());
  FeatureSpace out;
  out.origin = SpaceOrigin::filter;
  out.max_n = corpus.space.max_n;
  for (std::size_t f : chosen) out.vocabulary.push_back(corpus.space.vocabulary[f]);
  return out;
}

/// Greedy backward elimination on a seeded holdout split: repeatedly removes
/// the feature whose removal maximizes holdout averaged F1 until k remain
/// (|base| - k steps). Ties remove the lexicographically largest feature.
inline FeatureSpace backward_eliminate(const FeaturizedCorpus& corpus,
                                       const std::vector<Sentiment>& labels, std::size_t k,
                                       double holdout_fraction = 0.2,
                                       std::uint64_t seed = 0, double alpha = 0.1) {
  if (k < 1 || k > corpus.space.size())
    throw std::invalid_argument("backward_eliminate: k out of range 1..|base|");
  if (corpus.vectors.size() != labels.size())
    throw std::invalid_argument("backward_eliminate: vectors/labels size mismatch");
  if (!(holdout_fraction > 0.0) || !(holdout_fraction < 1.0))
    throw std::invalid_argument("backward_eliminate: holdout fraction must lie in (0,1)");

  std::size_t docs = corpus.vectors.size();
  std::vector<std::size_t> order(docs);
  for (std::size_t i = 0; i < docs; ++i) order[i] = i;
  Rng rng(seed);
  for (std::size_t i = docs; i > 1; --i)
    std::swap(order[i - 1], order[rng.next_below(i)]);
  std::size_t holdout_size =
      std::max<std::size_t>(1, static_cast<std::size_t>(holdout_fraction * static_cast<double>(docs)));
  if (holdout_size >= docs) holdout_size = docs - 1;

  std::vector<std::size_t> active(corpus.space.size());
  for (std::size_t f = 0; f < active.size(); ++f) active[f] = f;

  auto holdout_f1 = [&](const std::vector<std::size_t>& features) {
    std::vector<std::vector<std::uint8_t>> train_vectors, holdout_vectors;
    std::vector<Sentiment> train_labels, holdout_labels;
    for (std::size_t i = 0; i < docs; ++i) {
      std::vector<std::uint8_t> row;
      row.reserve(features.size());
      for (std::size_t f : features) row.push_back(corpus.vectors[order[i]][f]);
      if (i < holdout_size) {
        holdout_vectors.push_back(std::move(row));
        holdout_labels.push_back(labels[order[i]]);
      } else {
        train_vectors.push_back(std::move(row));
        train_labels.push_back(labels[order[i]]);
      }
    }
    NaiveBayes nb = NaiveBayes::train(train_vectors, train_labels, alpha);
    std::vector<Sentiment> predicted;
    predicted.reserve(holdout_vectors.size());
    for (const auto& v : holdout_vectors) predicted.push_back(nb.predict(v));
    return averaged_f1(count_confusion(holdout_labels, predicted));
  };

  while (active.size() > k) {
    double best_score = -1.0;
    std::size_t best_position = 0;
    for (std::size_t p = 0; p < active.size(); ++p) {
      std::vector<std::size_t> candidate = active;
      candidate.erase(candidate.begin() + static_cast<std::ptrdiff_t>(p));
      double score = holdout_f1(candidate);
      if (score > best_score || (score == best_score && active[p] > active[best_position])) {
        best_score = score;
        best_position = p;
      }
    }
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(best_position));
  }

  FeatureSpace out;
  out.origin = SpaceOrigin::backward_elimination;
  out.max_n = corpus.space.max_n;
  for (std::size_t f : active) out.vocabulary.push_back(corpus.space.vocabulary[f]);
  return out;
}

// --- corpus files: one JSON object per line -------------------------------

inline std::vector<RichDocument> load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open corpus file " + path);
  std::vector<RichDocument> corpus;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw parse_error(std::string("corpus: ") + e.what(), line_number, e.byte);
    }
    try {
      RichDocument doc;
      doc.text = j.at("text").get<std::string>();
      doc.label = parse_sentiment(j.at("label").get<std::string>());
      if (j.contains("indicative")) {
        for (const auto& item : j.at("indicative")) {
          IndicativePhrase ip;
          ip.phrase = item.at("phrase").get<std::string>();
          if (ip.phrase.empty()) throw parse_error("indicative phrase must be non-empty");
          Sentiment polarity = parse_sentiment(item.at("polarity").get<std::string>());
          if (polarity == Sentiment::neutral)
            throw parse_error("indicative polarity must be negative or positive");
          ip.polarity = polarity;
          doc.indicative.push_back(std::move(ip));
        }
      }
      corpus.push_back(std::move(doc));
    } catch (const nlohmann::json::exception& e) {
      throw parse_error(std::string("corpus: ") + e.what(), line_number, 1);
    } catch (const parse_error& e) {
      throw parse_error(std::string("corpus: ") + e.what(), line_number, 1);
    }
  }
  return corpus;
}

inline void save_corpus(const std::vector<RichDocument>& corpus, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write corpus file " + path);
  for (const RichDocument& doc : corpus) {
    nlohmann::ordered_json j;
    j["text"] = doc.text;
    j["label"] = to_string(doc.label);
    nlohmann::ordered_json marks = nlohmann::ordered_json::array();
    for (const IndicativePhrase& ip : doc.indicative)
      marks.push_back({{"phrase", ip.phrase}, {"polarity", to_string(ip.polarity)}});
    j["indicative"] = marks;
    out << j.dump() << '\n';
  }
}

// --- learning-curve sweep ---------------------------------------------------

enum class Selection { none, user, filter, backward };

inline Selection parse_selection(std::string_view text) {
  if (text == "none") return Selection::none;
  if (text == "user") return Selection::user;
  if (text == "filter") return Selection::filter;
  if (text == "backward") return Selection::backward;
  throw parse_error("unknown selection '" + std::string(text) + "'");
}

struct SweepOptions {
  int max_n = 1;
  int cutoff = 0;
  Selection selection = Selection::none;
  double alpha = 0.1;
  std::vector<double> train_fractions{1.0};
  std::uint64_t seed = 0;
  double test_fraction = 0.3;  // fixed seeded split, documented default
};

struct SweepRow {
  std::size_t size = 0;
  std::string space;
  double train_f1 = 0, test_f1 = 0;
  double train_p_pos = 0, train_r_pos = 0, train_p_neg = 0, train_r_neg = 0;
  double test_p_pos = 0, test_r_pos = 0, test_p_neg = 0, test_r_neg = 0;
};

inline std::string sweep_csv_header() {
  return "size,space,train_f1,test_f1,train_p_pos,train_r_pos,train_p_neg,train_r_neg,"
         "test_p_pos,test_r_pos,test_p_neg,test_r_neg";
}

inline std::string to_csv_row(const SweepRow& r) {
  std::string row = std::to_string(r.size) + ',' + r.space;
  for (double v : {r.train_f1, r.test_f1, r.train_p_pos, r.train_r_pos, r.train_p_neg,
                   r.train_r_neg, r.test_p_pos, r.test_r_pos, r.test_p_neg, r.test_r_neg}) {
    row += ',';
    row += format_double(v);
  }
  return row;
}

/// One row per training fraction: shuffles once (seeded), holds out the test
/// split, then featurizes, selects features and trains on growing prefixes of
/// the training pool. For filter/backward the selection budget k equals the
/// size of the user-acquired space on the same prefix.
inline std::vector<SweepRow> run_sweep(const std::vector<RichDocument>& corpus,
                                       const SweepOptions& options) {
  if (corpus.size() < 4) throw std::invalid_argument("run_sweep: corpus too small");
  for (double f : options.train_fractions)
    if (!(f > 0.0) || f > 1.0)
      throw std::invalid_argument("run_sweep: train fractions must lie in (0,1]");

  std::vector<std::size_t> order(corpus.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(options.seed);
  for (std::size_t i = order.size(); i > 1; --i)
    std::swap(order[i - 1], order[rng.next_below(i)]);

  std::size_t test_size = std::max<std::size_t>(
      1, static_cast<std::size_t>(options.test_fraction * static_cast<double>(corpus.size())));
  if (test_size >= corpus.size()) test_size = corpus.size() - 1;
  std::vector<RichDocument> test_docs, pool;
  for (std::size_t i = 0; i < order.size(); ++i)
    (i < test_size ? test_docs : pool).push_back(corpus[order[i]]);

  std::vector<SweepRow> rows;
  for (double fraction : options.train_fractions) {
    std::size_t size = std::max<std::size_t>(
        2, static_cast<std::size_t>(fraction * static_cast<double>(pool.size())));
    size = std::min(size, pool.size());
    std::vector<RichDocument> subset(pool.begin(),
                                     pool.begin() + static_cast<std::ptrdiff_t>(size));

    FeaturizedCorpus base = featurize(subset, options.max_n, options.cutoff);
    FeatureSpace user = user_feature_space(subset, base.space);
    std::vector<Sentiment> labels;
    labels.reserve(subset.size());
    for (const RichDocument& doc : subset) labels.push_back(doc.label);

    FeatureSpace space = base.space;
    if (options.selection == Selection::user) {
      space = user;
    } else if (options.selection == Selection::filter) {
      space = user.size() == 0 ? FeatureSpace{{}, SpaceOrigin::filter, base.space.max_n}
                               : filter_select(base, labels, user.size());
    } else if (options.selection == Selection::backward) {
      space = user.size() == 0
                  ? FeatureSpace{{}, SpaceOrigin::backward_elimination, base.space.max_n}
                  : backward_eliminate(base, labels, user.size(), 0.2, options.seed,
                                       options.alpha);
    }

    std::vector<std::vector<std::uint8_t>> train_vectors =
        restrict_vectors(base.vectors, base.space, space);
    NaiveBayes nb = NaiveBayes::train(train_vectors, labels, options.alpha);

    std::vector<Sentiment> train_predicted;
    train_predicted.reserve(train_vectors.size());
    for (const auto& v : train_vectors) train_predicted.push_back(nb.predict(v));
    ConfusionCounts train_counts = count_confusion(labels, train_predicted);

    std::vector<Sentiment> test_truth, test_predicted;
    test_truth.reserve(test_docs.size());
    for (const RichDocument& doc : test_docs) {
      test_truth.push_back(doc.label);
      test_predicted.push_back(nb.predict(vectorize(doc, space)));
    }
    ConfusionCounts test_counts = count_confusion(test_truth, test_predicted);

    SweepRow row;
    row.size = size;
    row.space = to_string(space.origin);
    row.train_f1 = averaged_f1(train_counts);
    row.test_f1 = averaged_f1(test_counts);
    row.train_p_pos = precision_pos(train_counts);
    row.train_r_pos = recall_pos(train_counts);
    row.train_p_neg = precision_neg(train_counts);
    row.train_r_neg = recall_neg(train_counts);
    row.test_p_pos = precision_pos(test_counts);
    row.test_r_pos = recall_pos(test_counts);
    row.test_p_neg = precision_neg(test_counts);
    row.test_r_neg = recall_neg(test_counts);
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Top-k features per class by smoothed P(f|c); diagnostic only.
inline std::vector<std::pair<std::string, double>> most_informative(
    const NaiveBayes& nb, const FeatureSpace& space, Sentiment c, std::size_t k) {
  std::vector<std::pair<std::string, double>> ranked;
  ranked.reserve(space.size());
  for (std::size_t f = 0; f < space.size(); ++f)
    ranked.emplace_back(space.vocabulary[f], nb.feature_given_class(f, c));
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (ranked.size() > k) ranked.resize(k);
  return ranked;
}

}  // namespace lmq::richlabel
