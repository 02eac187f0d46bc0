#pragma once

#include <stdexcept>
#include <string>

namespace lmq {

/// Requested work exceeds a hard implementation bound (dimension caps etc).
class capacity_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A membership query fell outside the oracle's locality radius.
class non_local_query_error : public std::runtime_error {
 public:
  non_local_query_error(int distance, int radius)
      : std::runtime_error("non-local query: nearest reference example at hamming distance " +
                           std::to_string(distance) + " > radius " + std::to_string(radius)),
        distance_(distance),
        radius_(radius) {}

  int distance() const noexcept { return distance_; }
  int radius() const noexcept { return radius_; }

 private:
  int distance_;
  int radius_;
};

/// A randomized generator could not produce a valid object within its retry budget.
class generation_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sample labels contradict the supplied target function.
class consistency_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A formula exceeds the "small" convention (more than n^2 terms).
class not_small_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed textual input; carries a 1-based position when known.
class parse_error : public std::runtime_error {
 public:
  explicit parse_error(const std::string& what, std::size_t line = 0, std::size_t column = 0)
      : std::runtime_error(line == 0 ? what
                                     : what + " (line " + std::to_string(line) + ", column " +
                                           std::to_string(column) + ")"),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace lmq
