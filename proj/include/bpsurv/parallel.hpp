#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace bpsurv {

// Deterministic pairwise summation over a contiguous buffer. The reduction
// tree depends only on n, so the result is bit-identical for any thread count
// used to fill the buffer.
double pairwise_sum(const double* data, std::size_t n);

inline double pairwise_sum(const std::vector<double>& v) {
  return pairwise_sum(v.data(), v.size());
}

// Fills out[i] = fn(i) for i in [0, n), in parallel when n is large enough to
// pay for it. Each element is computed independently, so the buffer contents
// do not depend on scheduling.
void parallel_fill(std::size_t n, double* out,
                   const std::function<double(std::size_t)>& fn);

// Plain parallel loop over [0, n).
void parallel_for_index(std::size_t n,
                        const std::function<void(std::size_t)>& fn);

int max_threads();
void set_threads(int n);

}  // namespace bpsurv
