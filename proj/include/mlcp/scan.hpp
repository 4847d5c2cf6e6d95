#pragma once

#include "mlcp/lowrank.hpp"
#include "mlcp/tensor.hpp"

#include <vector>

namespace mlcp {

/// Half-open integer interval (left, right].
struct Interval
{
  int left = 0;
  int right = 0;
  int scale = 0; ///< 1-based dyadic scale that produced it, 0 if not seeded

  int length() const { return right - left; }
  bool contained_in(int s, int e) const { return s <= left && right <= e; }
  bool operator==(const Interval &o) const { return left == o.left && right == o.right; }
};

/// Multiscale seeded intervals over (0, T], ordered by scale then left end.
struct SeededIntervalSet
{
  int horizon = 0;
  double c_J = 1.0;
  int scales = 0;
  std::vector<Interval> intervals;
};

SeededIntervalSet seeded_intervals(int T, double c_J = 1.0);

/// CUSUM contrast weights for split t in window (s, e]; weights[u - s - 1]
/// belongs to time u.
struct CusumWeights
{
  int s = 0;
  int t = 0;
  int e = 0;
  Vector<double> weights;

  double at(int u) const { return weights[u - s - 1]; }
};

CusumWeights cusum_weights(int s, int t, int e);

/// Weighted before/after contrast of the series at split t over (s, e].
Tensor3d cusum_transform(const SeriesD &series, int s, int t, int e);

/// ⟨Ã(t), B̃(t)⟩ over (alpha, beta] for t = alpha+1 .. beta-1 (entry t-alpha-1).
Vector<double> cusum_inner_profile(const SeriesD &a, const SeriesD &b, int alpha, int beta);

struct RefinedScan
{
  /// |⟨P̂/‖P̂‖, Ã'(t)⟩| for t = s+1 .. e-1 (entry t-s-1)
  Vector<double> values;
  bool degenerate = false;
  bool rank_deficient = false;
};

/// Low-rank-projected scan statistic around the candidate b in (s, e].
RefinedScan refined_scan_profile(const SeriesD &a_prime, const SeriesD &b_prime, int s, int b, int e,
                                 const TuckerRanks &ranks, const HpcaConfig &cfg = {});

/// Position of the maximum with the smallest index winning ties.
Index first_argmax(const Vector<double> &v);

} // namespace mlcp
