#pragma once

#include <charconv>
#include <cstdio>
#include <string>

namespace lmq {

/// Kahan compensated accumulator for probability masses.
class KahanSum {
 public:
  void add(double x) {
    double y = x - compensation_;
    double t = sum_ + y;
    compensation_ = (t - sum_) - y;
    sum_ = t;
  }

  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

/// Shortest round-trip decimal form; used everywhere a double reaches a report
/// file so re-runs are byte-identical.
inline std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) {
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return std::string(buf);
  }
  return std::string(buf, ptr);
}

}  // namespace lmq
