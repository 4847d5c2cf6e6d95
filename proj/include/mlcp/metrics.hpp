#pragma once

#include <vector>

namespace mlcp {

/// Boundaries 0 = c_0 < c_1 < ... < c_{K+1} = T of the intervals (c_i, c_{i+1}].
struct Partition
{
  std::vector<int> boundaries;

  /// Partition of (0, T] induced by change points (deduplicated, sorted).
  static Partition from_change_points(std::vector<int> change_points, int T);

  int horizon() const { return boundaries.empty() ? 0 : boundaries.back(); }
};

/// | |est| - |truth| | on deduplicated sets.
int count_error(const std::vector<int> &est, const std::vector<int> &truth);

/// max_{c ∈ C} min_{c' ∈ C'} |c' - c|; +∞ if either set is empty.
double hausdorff_one_sided(const std::vector<int> &c_prime, const std::vector<int> &c);

/// Length-weighted best-Jaccard agreement between two partitions of (0, T].
double coverage(const Partition &truth, const Partition &est);

} // namespace mlcp
