#include "mlcp/metrics.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <stdexcept>

namespace mlcp {

namespace {

std::vector<int> as_set(std::vector<int> v)
{
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

void check_partition(const Partition &p)
{
  if (p.boundaries.size() < 2 || p.boundaries.front() != 0)
    throw std::invalid_argument("partition must start at 0 and contain at least one interval");
  for (std::size_t i = 1; i < p.boundaries.size(); ++i)
    if (p.boundaries[i] <= p.boundaries[i - 1])
      throw std::invalid_argument("partition boundaries must be strictly increasing");
}

} // namespace

Partition Partition::from_change_points(std::vector<int> change_points, int T)
{
  if (T < 1)
    throw std::invalid_argument("partition horizon must be >= 1");
  Partition p;
  p.boundaries.push_back(0);
  for (int c : as_set(std::move(change_points))) {
    if (c <= 0 || c >= T)
      throw std::invalid_argument("change point outside (0, T)");
    p.boundaries.push_back(c);
  }
  p.boundaries.push_back(T);
  return p;
}

int count_error(const std::vector<int> &est, const std::vector<int> &truth)
{
  const auto a = static_cast<int>(as_set(est).size());
  const auto b = static_cast<int>(as_set(truth).size());
  return std::abs(a - b);
}

double hausdorff_one_sided(const std::vector<int> &c_prime, const std::vector<int> &c)
{
  if (c_prime.empty() || c.empty())
    return std::numeric_limits<double>::infinity();
  const std::vector<int> targets = as_set(c_prime);
  long long worst = 0;
  for (int x : c) {
    auto it = std::lower_bound(targets.begin(), targets.end(), x);
    long long nearest = std::numeric_limits<long long>::max();
    if (it != targets.end())
      nearest = static_cast<long long>(*it) - x;
    if (it != targets.begin())
      nearest = std::min(nearest, static_cast<long long>(x) - *std::prev(it));
    worst = std::max(worst, nearest);
  }
  return static_cast<double>(worst);
}

double coverage(const Partition &truth, const Partition &est)
{
  check_partition(truth);
  check_partition(est);
  if (truth.horizon() != est.horizon())
    throw std::invalid_argument("coverage: partitions have different horizons");

  double total = 0.0;
  for (std::size_t i = 0; i + 1 < truth.boundaries.size(); ++i) {
    const int a0 = truth.boundaries[i], a1 = truth.boundaries[i + 1];
    double best = 0.0;
    for (std::size_t j = 0; j + 1 < est.boundaries.size(); ++j) {
      const int b0 = est.boundaries[j], b1 = est.boundaries[j + 1];
      const int overlap = std::max(0, std::min(a1, b1) - std::max(a0, b0));
      const int uni = (a1 - a0) + (b1 - b0) - overlap;
      best = std::max(best, static_cast<double>(overlap) / uni);
    }
    total += (a1 - a0) * best;
  }
  return total / truth.horizon();
}

} // namespace mlcp
