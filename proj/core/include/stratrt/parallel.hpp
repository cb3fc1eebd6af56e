#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace stratrt {

/// Worker count for a request: positive values are taken as is; 0 means the
/// STRATRT_THREADS environment variable if set, else the hardware concurrency.
unsigned resolve_threads(int requested);

/// Runs fn(i) for i in [0, n) on up to `threads` workers with static block
/// partitioning. Iterations must be independent. The first exception thrown
/// by any worker is rethrown on the calling thread after all workers join.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

/// Compensated (Neumaier) accumulation; order-dependent by design, so callers
/// feed terms in a fixed index order to keep reductions reproducible.
class CompensatedSum {
 public:
  void add(double v);
  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

double compensated_sum(std::span<const double> values);

}  // namespace stratrt
