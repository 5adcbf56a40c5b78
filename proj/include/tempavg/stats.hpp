#pragma once

#include <cmath>
#include <cstdint>

namespace tempavg {

// Welford accumulator; merge() combines disjoint batches.
struct RunningMoments {
  std::uint64_t count = 0;
  double mean = 0;
  double m2 = 0;

  void add(double v) {
    ++count;
    const double d = v - mean;
    mean += d / static_cast<double>(count);
    m2 += d * (v - mean);
  }

  void merge(const RunningMoments& o) {
    if (o.count == 0) return;
    if (count == 0) {
      *this = o;
      return;
    }
    const double total = static_cast<double>(count + o.count);
    const double d = o.mean - mean;
    mean += d * static_cast<double>(o.count) / total;
    m2 += o.m2 + d * d * static_cast<double>(count) * static_cast<double>(o.count) / total;
    count += o.count;
  }

  /// Unbiased sample variance (0 for fewer than two samples).
  double variance() const { return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0; }
  double stderr_mean() const { return count > 0 ? std::sqrt(variance() / static_cast<double>(count)) : 0.0; }
};

}  // namespace tempavg
