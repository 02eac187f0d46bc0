#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "lmq/boolcube.hpp"
#include "lmq/error.hpp"

namespace lmq {

/// One possibly-negated variable. A negated literal is satisfied when the
/// coordinate is -1.
struct Literal {
  int variable;  // 1-based
  bool negated;

  friend bool operator==(const Literal&, const Literal&) = default;
  friend bool operator<(const Literal& a, const Literal& b) {
    if (a.variable != b.variable) return a.variable < b.variable;
    return a.negated < b.negated;  // positive literal sorts first
  }
};

/// Conjunction of literals, stored as a pair of variable masks. The empty term
/// is always true. A term may hold both x_j and !x_j; it then evaluates false
/// on every point (the learner's starting term is exactly of this kind).
class Term {
 public:
  Term() = default;

  static Term of(std::initializer_list<Literal> literals) {
    Term t;
    for (const Literal& l : literals) t.add(l);
    return t;
  }

  /// x_1 & !x_1 & ... & x_n & !x_n.
  static Term full(int n) {
    if (n < 1 || n > Example::max_dimension)
      throw std::invalid_argument("Term::full: bad dimension");
    Term t;
    t.pos_ = t.neg_ = mask(n);
    return t;
  }

  void add(Literal l) {
    check_variable(l.variable);
    (l.negated ? neg_ : pos_) |= bit(l.variable);
  }

  void remove(Literal l) {
    check_variable(l.variable);
    (l.negated ? neg_ : pos_) &= ~bit(l.variable);
  }

  void remove_variable(int variable) {
    check_variable(variable);
    pos_ &= ~bit(variable);
    neg_ &= ~bit(variable);
  }

  bool has(Literal l) const {
    check_variable(l.variable);
    return ((l.negated ? neg_ : pos_) >> (l.variable - 1)) & 1;
  }

  bool contains_variable(int variable) const {
    check_variable(variable);
    return ((pos_ | neg_) >> (variable - 1)) & 1;
  }

  bool empty() const { return (pos_ | neg_) == 0; }
  bool contradictory() const { return (pos_ & neg_) != 0; }
  int literal_count() const { return std::popcount(pos_) + std::popcount(neg_); }
  int max_variable() const { return std::bit_width(pos_ | neg_); }

  std::vector<Literal> literals() const {
    std::vector<Literal> out;
    out.reserve(static_cast<std::size_t>(literal_count()));
    for (int j = 1; j <= max_variable(); ++j) {
      if ((pos_ >> (j - 1)) & 1) out.push_back({j, false});
      if ((neg_ >> (j - 1)) & 1) out.push_back({j, true});
    }
    return out;  // already sorted by (variable, polarity)
  }

  friend bool operator==(const Term&, const Term&) = default;
  friend bool operator<(const Term& a, const Term& b) {
    if (a.pos_ != b.pos_) return a.pos_ < b.pos_;
    return a.neg_ < b.neg_;
  }

  std::uint64_t positive_mask() const { return pos_; }
  std::uint64_t negative_mask() const { return neg_; }

 private:
  static std::uint64_t bit(int variable) { return std::uint64_t{1} << (variable - 1); }
  static std::uint64_t mask(int n) { return n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1; }
  static void check_variable(int variable) {
    if (variable < 1 || variable > Example::max_dimension)
      throw std::invalid_argument("Term: variable index " + std::to_string(variable) +
                                  " out of range");
  }

  std::uint64_t pos_ = 0;  // bit j-1: literal x_j present
  std::uint64_t neg_ = 0;  // bit j-1: literal !x_j present
};

inline bool eval_term(const Term& t, const Example& x) {
  if (t.max_variable() > x.dimension())
    throw std::invalid_argument("eval_term: term variable " + std::to_string(t.max_variable()) +
                                " exceeds example dimension " + std::to_string(x.dimension()));
  // All positive literals need their bit set, all negated ones need it clear.
  return (x.bits() & t.positive_mask()) == t.positive_mask() &&
         (x.bits() & t.negative_mask()) == 0;
}

/// Disjunction of terms over a fixed dimension. The empty formula is always
/// false; duplicate terms are allowed and do not change semantics.
class DnfFormula {
 public:
  explicit DnfFormula(int n, std::vector<Term> terms = {}) : n_(n), terms_(std::move(terms)) {
    if (n < 1 || n > Example::max_dimension)
      throw std::invalid_argument("DnfFormula: bad dimension");
    for (const Term& t : terms_)
      if (t.max_variable() > n_)
        throw std::invalid_argument("DnfFormula: term variable exceeds dimension " +
                                    std::to_string(n_));
  }

  static DnfFormula always_false(int n) { return DnfFormula(n); }

  int dimension() const { return n_; }
  const std::vector<Term>& terms() const { return terms_; }
  std::size_t term_count() const { return terms_.size(); }

  int max_term_size() const {
    int m = 0;
    for (const Term& t : terms_) m = std::max(m, t.literal_count());
    return m;
  }

  /// Copy with duplicate terms removed (first occurrence kept).
  DnfFormula deduplicated() const {
    std::vector<Term> unique;
    for (const Term& t : terms_)
      if (std::find(unique.begin(), unique.end(), t) == unique.end()) unique.push_back(t);
    return DnfFormula(n_, std::move(unique));
  }

  friend bool operator==(const DnfFormula&, const DnfFormula&) = default;

 private:
  int n_;
  std::vector<Term> terms_;
};

inline Label eval_dnf(const DnfFormula& f, const Example& x) {
  if (f.dimension() != x.dimension())
    throw std::invalid_argument("eval_dnf: dimension mismatch (" +
                                std::to_string(f.dimension()) + " vs " +
                                std::to_string(x.dimension()) + ")");
  for (const Term& t : f.terms())
    if (eval_term(t, x)) return 1;
  return 0;
}

/// True iff x satisfies term i of f, satisfies no other term, and no single
/// coordinate flip that keeps f true activates any term other than i.
/// Checked exhaustively over all n flips; purely combinatorial, independent of
/// any distribution support.
inline bool satisfies_evidently(const DnfFormula& f, std::size_t term_index, const Example& x) {
  if (term_index >= f.term_count())
    throw std::invalid_argument("satisfies_evidently: term index out of range");
  if (f.dimension() != x.dimension())
    throw std::invalid_argument("satisfies_evidently: dimension mismatch");
  const auto& terms = f.terms();
  if (!eval_term(terms[term_index], x)) return false;
  for (std::size_t k = 0; k < terms.size(); ++k)
    if (k != term_index && eval_term(terms[k], x)) return false;
  for (int j = 1; j <= f.dimension(); ++j) {
    Example y = flip(x, j);
    if (eval_dnf(f, y) == 0) continue;
    if (!eval_term(terms[term_index], y)) return false;
    for (std::size_t k = 0; k < terms.size(); ++k)
      if (k != term_index && eval_term(terms[k], y)) return false;
  }
  return true;
}

/// The vector (h_f(x^flip 1), ..., h_f(x^flip n)). For an x that satisfies
/// term i evidently, entry j is 1 exactly when variable j does not occur in
/// that term.
inline std::vector<Label> neighbor_membership_signature(const DnfFormula& f, const Example& x) {
  if (f.dimension() != x.dimension())
    throw std::invalid_argument("neighbor_membership_signature: dimension mismatch");
  std::vector<Label> sig;
  sig.reserve(static_cast<std::size_t>(f.dimension()));
  for (int j = 1; j <= f.dimension(); ++j) sig.push_back(eval_dnf(f, flip(x, j)));
  return sig;
}

/// Binary decision tree: internal nodes test a variable (left = -1 branch,
/// right = +1 branch), leaves carry a {0,1} label.
class DecisionTree {
 public:
  struct Node {
    int variable = 0;  // 0 for leaves
    Label label = 0;
    std::unique_ptr<Node> left;
    std::unique_ptr<Node> right;

    bool is_leaf() const { return !left; }
  };

  static DecisionTree leaf(int n, Label label) {
    check_dim(n);
    if (!is_valid_label(label)) throw std::invalid_argument("DecisionTree: label must be 0 or 1");
    DecisionTree t(n);
    t.root_ = std::make_unique<Node>();
    t.root_->label = label;
    return t;
  }

  static DecisionTree split(int variable, DecisionTree minus_branch, DecisionTree plus_branch) {
    if (minus_branch.n_ != plus_branch.n_)
      throw std::invalid_argument("DecisionTree::split: child dimension mismatch");
    int n = minus_branch.n_;
    if (variable < 1 || variable > n)
      throw std::invalid_argument("DecisionTree::split: variable out of range");
    DecisionTree t(n);
    t.root_ = std::make_unique<Node>();
    t.root_->variable = variable;
    t.root_->left = std::move(minus_branch.root_);
    t.root_->right = std::move(plus_branch.root_);
    return t;
  }

  DecisionTree(const DecisionTree& other) : n_(other.n_), root_(clone(other.root_.get())) {}
  DecisionTree& operator=(const DecisionTree& other) {
    if (this != &other) {
      n_ = other.n_;
      root_ = clone(other.root_.get());
    }
    return *this;
  }
  DecisionTree(DecisionTree&&) = default;
  DecisionTree& operator=(DecisionTree&&) = default;

  int dimension() const { return n_; }
  const Node& root() const { return *root_; }

  std::size_t leaf_count() const { return count_leaves(*root_); }

 private:
  explicit DecisionTree(int n) : n_(n) {}

  static void check_dim(int n) {
    if (n < 1 || n > Example::max_dimension)
      throw std::invalid_argument("DecisionTree: bad dimension");
  }

  static std::unique_ptr<Node> clone(const Node* node) {
    if (!node) return nullptr;
    auto copy = std::make_unique<Node>();
    copy->variable = node->variable;
    copy->label = node->label;
    copy->left = clone(node->left.get());
    copy->right = clone(node->right.get());
    return copy;
  }

  static std::size_t count_leaves(const Node& node) {
    if (node.is_leaf()) return 1;
    return count_leaves(*node.left) + count_leaves(*node.right);
  }

  int n_;
  std::unique_ptr<Node> root_;
};

inline Label eval_tree(const DecisionTree& t, const Example& x) {
  if (t.dimension() != x.dimension())
    throw std::invalid_argument("eval_tree: dimension mismatch");
  const DecisionTree::Node* node = &t.root();
  while (!node->is_leaf())
    node = x.coordinate(node->variable) == -1 ? node->left.get() : node->right.get();
  return node->label;
}

// --- canonical text forms ------------------------------------------------
//
// term:    "x3 & !x7" (literals sorted by variable then polarity); the empty
//          term prints "true"
// formula: "T1 | T2 | ..."; the empty formula prints "false"
// tree:    "(x1 (x2 0 1) 0)" with bare 0/1 for leaves

inline std::string to_string(const Term& t) {
  if (t.empty()) return "true";
  std::string s;
  bool first = true;
  for (const Literal& l : t.literals()) {
    if (!first) s += " & ";
    first = false;
    if (l.negated) s += '!';
    s += 'x';
    s += std::to_string(l.variable);
  }
  return s;
}

inline std::string to_string(const DnfFormula& f) {
  if (f.terms().empty()) return "false";
  std::string s;
  bool first = true;
  for (const Term& t : f.terms()) {
    if (!first) s += " | ";
    first = false;
    s += to_string(t);
  }
  return s;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      parts.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return parts;
}

inline Literal parse_literal(std::string_view token) {
  std::string_view t = trim(token);
  bool negated = false;
  if (!t.empty() && t.front() == '!') {
    negated = true;
    t.remove_prefix(1);
    t = trim(t);
  }
  if (t.size() < 2 || t.front() != 'x')
    throw parse_error("expected literal of the form x<k> or !x<k>, got '" + std::string(token) +
                      "'");
  int variable = 0;
  for (char c : t.substr(1)) {
    if (c < '0' || c > '9')
      throw parse_error("bad variable index in literal '" + std::string(token) + "'");
    variable = variable * 10 + (c - '0');
    if (variable > Example::max_dimension) throw parse_error("variable index too large");
  }
  if (variable == 0) throw parse_error("variable indices are 1-based");
  return Literal{variable, negated};
}

}  // namespace detail

inline Term parse_term(std::string_view text) {
  std::string_view t = detail::trim(text);
  if (t == "true") return Term();
  Term term;
  for (std::string_view part : detail::split(t, '&')) term.add(detail::parse_literal(part));
  return term;
}

inline DnfFormula parse_dnf(std::string_view text, int n) {
  std::string_view t = detail::trim(text);
  if (t == "false") return DnfFormula::always_false(n);
  std::vector<Term> terms;
  for (std::string_view part : detail::split(t, '|')) terms.push_back(parse_term(part));
  return DnfFormula(n, std::move(terms));
}

inline std::string to_string(const DecisionTree& t) {
  std::string out;
  auto emit = [&](const DecisionTree::Node& node, auto&& self) -> void {
    if (node.is_leaf()) {
      out += node.label ? '1' : '0';
      return;
    }
    out += "(x";
    out += std::to_string(node.variable);
    out += ' ';
    self(*node.left, self);
    out += ' ';
    self(*node.right, self);
    out += ')';
  };
  emit(t.root(), emit);
  return out;
}

inline DecisionTree parse_decision_tree(std::string_view text, int n) {
  std::size_t pos = 0;
  auto skip_ws = [&] {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
  };
  auto fail = [&](const std::string& msg) -> DecisionTree {
    throw parse_error("decision tree: " + msg, 1, pos + 1);
  };
  auto parse_node = [&](auto&& self) -> DecisionTree {
    skip_ws();
    if (pos >= text.size()) return fail("unexpected end of input");
    char c = text[pos];
    if (c == '0' || c == '1') {
      ++pos;
      return DecisionTree::leaf(n, c - '0');
    }
    if (c != '(') return fail(std::string("expected '(', '0' or '1', got '") + c + "'");
    ++pos;
    skip_ws();
    if (pos >= text.size() || text[pos] != 'x') return fail("expected variable after '('");
    ++pos;
    int variable = 0;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
      variable = variable * 10 + (text[pos] - '0');
      ++pos;
    }
    if (variable < 1) return fail("bad variable index");
    DecisionTree minus = self(self);
    DecisionTree plus = self(self);
    skip_ws();
    if (pos >= text.size() || text[pos] != ')') return fail("expected ')'");
    ++pos;
    return DecisionTree::split(variable, std::move(minus), std::move(plus));
  };
  DecisionTree result = parse_node(parse_node);
  skip_ws();
  if (pos != text.size()) throw parse_error("decision tree: trailing characters", 1, pos + 1);
  return result;
}

}  // namespace lmq
