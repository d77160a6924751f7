#pragma once

#include <cstddef>
#include <vector>

namespace jamdof {

// Pairwise (cascade) summation: O(log n) rounding-error growth and a
// result independent of how the inputs were produced, which keeps
// aggregation deterministic across thread counts.
double pairwise_sum(const double* data, std::size_t n);
double pairwise_sum(const std::vector<double>& v);

}  // namespace jamdof
