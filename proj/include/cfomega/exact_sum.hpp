#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace cfomega {

/// Running sum of doubles kept as a nonoverlapping expansion (Shewchuk's
/// partials), so the represented total is exact and `value()` is correctly
/// rounded. Adding and later subtracting the same term restores the previous
/// total bit-for-bit.
class ExactSum {
 public:
  void add(double x) {
    std::size_t i = 0;
    for (double y : partials_) {
      if (std::fabs(x) < std::fabs(y)) std::swap(x, y);
      const double hi = x + y;
      const double lo = y - (hi - x);
      if (lo != 0.0) partials_[i++] = lo;
      x = hi;
    }
    partials_.resize(i);
    partials_.push_back(x);
  }

  void add(std::span<const double> xs) {
    for (double x : xs) add(x);
  }

  double value() const {
    if (partials_.empty()) return 0.0;
    std::size_t n = partials_.size();
    double hi = partials_[--n];
    double lo = 0.0;
    while (n > 0) {
      const double x = hi;
      const double y = partials_[--n];
      hi = x + y;
      lo = y - (hi - x);
      if (lo != 0.0) break;
    }
    // Round-half-even correction when the remaining partials push the
    // discarded remainder past a tie.
    if (n > 0 && ((lo < 0.0 && partials_[n - 1] < 0.0) ||
                  (lo > 0.0 && partials_[n - 1] > 0.0))) {
      const double y = lo * 2.0;
      const double x = hi + y;
      if (y == x - hi) hi = x;
    }
    return hi;
  }

  void clear() { partials_.clear(); }

 private:
  std::vector<double> partials_;
};

inline double exact_sum(std::span<const double> xs) {
  ExactSum s;
  s.add(xs);
  return s.value();
}

}  // namespace cfomega
