#pragma once

#include <bit>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lmq/error.hpp"

namespace lmq {

using Label = int;  // {0, 1}

inline bool is_valid_label(Label y) { return y == 0 || y == 1; }

/// A point of {-1,+1}^n. Coordinates are 1-indexed; bit j-1 of the packed word
/// is set iff coordinate j equals +1. Immutable value type.
class Example {
 public:
  static constexpr int max_dimension = 64;

  explicit Example(const std::vector<int>& coordinates) {
    check_dimension(static_cast<int>(coordinates.size()));
    n_ = static_cast<int>(coordinates.size());
    bits_ = 0;
    for (int j = 1; j <= n_; ++j) {
      int c = coordinates[static_cast<std::size_t>(j - 1)];
      if (c == 1) {
        bits_ |= std::uint64_t{1} << (j - 1);
      } else if (c != -1) {
        throw std::invalid_argument("Example: coordinate " + std::to_string(j) +
                                    " is not -1 or +1");
      }
    }
  }

  static Example from_bits(int n, std::uint64_t bits) {
    check_dimension(n);
    if (n < 64 && (bits >> n) != 0)
      throw std::invalid_argument("Example::from_bits: bits set above dimension");
    return Example(n, bits);
  }

  int dimension() const { return n_; }
  std::uint64_t bits() const { return bits_; }

  /// Coordinate j in 1..n, returned as -1 or +1.
  int coordinate(int j) const {
    check_index(j);
    return ((bits_ >> (j - 1)) & 1) ? 1 : -1;
  }

  /// Copy with coordinate j negated.
  Example with_flipped(int j) const {
    check_index(j);
    return Example(n_, bits_ ^ (std::uint64_t{1} << (j - 1)));
  }

  friend bool operator==(const Example&, const Example&) = default;

  /// Order: by dimension, then coordinate-lexicographic with -1 before +1.
  friend bool operator<(const Example& a, const Example& b) {
    if (a.n_ != b.n_) return a.n_ < b.n_;
    for (int j = 1; j <= a.n_; ++j) {
      int ca = a.coordinate(j), cb = b.coordinate(j);
      if (ca != cb) return ca < cb;
    }
    return false;
  }

 private:
  Example(int n, std::uint64_t bits) : bits_(bits), n_(n) {}

  static void check_dimension(int n) {
    if (n < 1) throw std::invalid_argument("Example: dimension must be positive");
    if (n > max_dimension)
      throw capacity_error("Example: dimension " + std::to_string(n) + " exceeds cap " +
                           std::to_string(max_dimension));
  }

  void check_index(int j) const {
    if (j < 1 || j > n_)
      throw std::invalid_argument("coordinate index " + std::to_string(j) +
                                  " out of range 1.." + std::to_string(n_));
  }

  std::uint64_t bits_;
  int n_;
};

inline Example flip(const Example& x, int j) { return x.with_flipped(j); }

inline int hamming(const Example& x, const Example& y) {
  if (x.dimension() != y.dimension())
    throw std::invalid_argument("hamming: dimension mismatch (" +
                                std::to_string(x.dimension()) + " vs " +
                                std::to_string(y.dimension()) + ")");
  return std::popcount(x.bits() ^ y.bits());
}

/// "+-+" text form, coordinate 1 first.
inline std::string to_string(const Example& x) {
  std::string s;
  s.reserve(static_cast<std::size_t>(x.dimension()));
  for (int j = 1; j <= x.dimension(); ++j) s.push_back(x.coordinate(j) == 1 ? '+' : '-');
  return s;
}

inline Example parse_example(std::string_view text) {
  if (text.empty()) throw std::invalid_argument("parse_example: empty text");
  if (text.size() > Example::max_dimension)
    throw capacity_error("parse_example: dimension exceeds cap");
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '+') {
      bits |= std::uint64_t{1} << i;
    } else if (text[i] != '-') {
      throw std::invalid_argument(std::string("parse_example: invalid character '") + text[i] +
                                  "' at position " + std::to_string(i + 1));
    }
  }
  return Example::from_bits(static_cast<int>(text.size()), bits);
}

namespace detail {
// Maps enumeration rank to packed bits so that rank order is lexicographic on
// coordinates with -1 < +1: coordinate j is bit (n-j) of the rank.
inline std::uint64_t bits_for_rank(std::uint64_t rank, int n) {
  std::uint64_t bits = 0;
  for (int j = 1; j <= n; ++j)
    if ((rank >> (n - j)) & 1) bits |= std::uint64_t{1} << (j - 1);
  return bits;
}
}  // namespace detail

/// Lazy range over all 2^n points in canonical (lexicographic) order.
class CubeRange {
 public:
  static constexpr int max_enumeration_dimension = 24;

  explicit CubeRange(int n) : n_(n) {
    if (n < 1) throw std::invalid_argument("enumerate_cube: dimension must be positive");
    if (n > max_enumeration_dimension)
      throw capacity_error("enumerate_cube: dimension " + std::to_string(n) +
                           " exceeds exhaustive cap " +
                           std::to_string(max_enumeration_dimension));
  }

  class iterator {
   public:
    using value_type = Example;
    using difference_type = std::ptrdiff_t;

    iterator(int n, std::uint64_t rank) : n_(n), rank_(rank) {}
    Example operator*() const { return Example::from_bits(n_, detail::bits_for_rank(rank_, n_)); }
    iterator& operator++() {
      ++rank_;
      return *this;
    }
    iterator operator++(int) {
      iterator old = *this;
      ++rank_;
      return old;
    }
    friend bool operator==(const iterator&, const iterator&) = default;

   private:
    int n_;
    std::uint64_t rank_;
  };

  iterator begin() const { return iterator(n_, 0); }
  iterator end() const { return iterator(n_, size()); }
  std::uint64_t size() const { return std::uint64_t{1} << n_; }
  int dimension() const { return n_; }

 private:
  int n_;
};

inline CubeRange enumerate_cube(int n) { return CubeRange(n); }

}  // namespace lmq

template <>
struct std::hash<lmq::Example> {
  std::size_t operator()(const lmq::Example& x) const noexcept {
    std::uint64_t h = x.bits() * 0x9E3779B97F4A7C15ULL;
    h ^= static_cast<std::uint64_t>(x.dimension()) << 56;
    return std::hash<std::uint64_t>{}(h);
  }
};
