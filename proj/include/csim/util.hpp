#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "csim/linalg.hpp"

namespace csim {

/// Deterministic low-discrepancy point source (Halton sequence).
/// The seed offsets the start index, so different seeds give different
/// but reproducible streams.
class HaltonSampler {
 public:
  explicit HaltonSampler(int dim, std::uint64_t seed = 0);

  /// Next point in [0,1)^dim.
  Vec next();

  /// Next point in the box [lo, hi] (componentwise).
  Vec next_in_box(const Vec& lo, const Vec& hi);

 private:
  int dim_;
  std::uint64_t index_;
};

/// Runs fn(i) for i in [0, count). Worker count is capped by the
/// CSIM_THREADS environment variable (default: hardware concurrency).
/// Each index writes only its own outputs, so results are independent
/// of the thread count.
void parallel_for(int count, const std::function<void(int)>& fn);

/// Worker cap currently in effect.
int worker_count();

}  // namespace csim
